#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "hsr/runconfig.hpp"

namespace hsr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIO = 3;
inline constexpr int kExitBudget = 4;

struct CommandIO {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

// Self-play training run: writes config snapshot, seed, JSONL metrics, and
// checkpoints into cfg.out_dir; resumes from the latest checkpoint pair when
// one is present.
int cmd_train(const RunConfig& cfg, const CommandIO& io);

// One printed game between two agents. Agent specs: "oracle", "uniform",
// "human", or "net:<run dir>".
int cmd_play(const RunConfig& cfg, const std::string& first_agent,
             const std::string& second_agent, const CommandIO& io);

// Solution triangle (no n), correct test/decision sets (n), or correct
// answer set (n and m).
int cmd_oracle(int k, int q, std::optional<std::int64_t> n,
               std::optional<std::int64_t> m, const CommandIO& io);

// Reachable-state count of the refutation game rooted at (k, q, n).
int cmd_enumerate(int k, int q, std::int64_t n, std::int64_t budget,
                  const CommandIO& io);

// metrics.jsonl -> CSV. Empty out_path writes <run_dir>/metrics.csv; "-"
// writes to io.out.
int cmd_export(const std::string& run_dir, const std::string& out_path,
               const CommandIO& io);

}  // namespace hsr
