#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsr/pipeline.hpp"

namespace hsr {

struct MetricsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One IterationReport as a single JSON line (no trailing newline).
std::string iteration_report_json(const IterationReport& rep);

// Parses one JSON line back into a report; throws MetricsError.
IterationReport parse_iteration_report(const std::string& line);

// Appends reports to a JSON-lines file.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path);
  void write(const IterationReport& rep);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Whole-file read; throws MetricsError on missing file or corrupt lines.
std::vector<IterationReport> read_metrics(const std::string& path);

// CSV with the plotting columns: iteration, new_P_correct, new_OP_correct,
// old_P_correct, old_OP_correct, mean_states, coverage_ratio. Absent values
// are empty fields.
void export_csv(const std::vector<IterationReport>& reports,
                std::ostream& out);

}  // namespace hsr
