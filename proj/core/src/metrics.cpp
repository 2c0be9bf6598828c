#include "hsr/metrics.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace hsr {

namespace {

using nlohmann::json;

json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

json opt_json(const std::optional<std::int64_t>& v) {
  if (!v) return nullptr;
  return *v;
}

std::optional<double> opt_double(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

std::optional<std::int64_t> opt_int(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::int64_t>();
}

}  // namespace

std::string iteration_report_json(const IterationReport& rep) {
  json j;
  j["iteration"] = rep.iteration;
  j["episodes"] = rep.episodes;
  j["new_P_correct"] = opt_json(rep.new_p_correct);
  j["new_OP_correct"] = opt_json(rep.new_op_correct);
  j["old_P_correct"] = opt_json(rep.old_p_correct);
  j["old_OP_correct"] = opt_json(rep.old_op_correct);
  j["selfplay_P_correct"] = opt_json(rep.selfplay_p_correct);
  j["selfplay_OP_correct"] = opt_json(rep.selfplay_op_correct);
  j["arena_new_wins"] = rep.arena_new_wins;
  j["arena_old_wins"] = rep.arena_old_wins;
  j["arena_games"] = rep.arena_games;
  j["new_as_P_wins"] = rep.new_as_p_wins;
  j["new_as_P_games"] = rep.new_as_p_games;
  j["new_as_OP_wins"] = rep.new_as_op_wins;
  j["new_as_OP_games"] = rep.new_as_op_games;
  j["mean_states"] = rep.mean_states;
  j["max_states"] = rep.max_states;
  j["coverage_ratio"] = opt_json(rep.coverage_ratio);
  j["total_states"] = opt_json(rep.total_states);
  j["proposal_buffer"] = rep.proposal_buffer;
  j["refutation_buffer"] = rep.refutation_buffer;
  j["proposal_loss"] = opt_json(rep.proposal_loss);
  j["refutation_loss"] = opt_json(rep.refutation_loss);
  j["propose_optimal_rate"] = opt_json(rep.propose_optimal_rate);
  j["accepted"] = rep.accepted;
  return j.dump();
}

IterationReport parse_iteration_report(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw MetricsError("metrics: unparseable line: " + line);
  }
  IterationReport rep;
  try {
    rep.iteration = j.at("iteration").get<int>();
    rep.episodes = j.at("episodes").get<int>();
    rep.new_p_correct = opt_double(j, "new_P_correct");
    rep.new_op_correct = opt_double(j, "new_OP_correct");
    rep.old_p_correct = opt_double(j, "old_P_correct");
    rep.old_op_correct = opt_double(j, "old_OP_correct");
    rep.selfplay_p_correct = opt_double(j, "selfplay_P_correct");
    rep.selfplay_op_correct = opt_double(j, "selfplay_OP_correct");
    rep.arena_new_wins = j.value("arena_new_wins", 0);
    rep.arena_old_wins = j.value("arena_old_wins", 0);
    rep.arena_games = j.value("arena_games", 0);
    rep.new_as_p_wins = j.value("new_as_P_wins", 0);
    rep.new_as_p_games = j.value("new_as_P_games", 0);
    rep.new_as_op_wins = j.value("new_as_OP_wins", 0);
    rep.new_as_op_games = j.value("new_as_OP_games", 0);
    rep.mean_states = j.value("mean_states", 0.0);
    rep.max_states = j.value("max_states", std::int64_t{0});
    rep.coverage_ratio = opt_double(j, "coverage_ratio");
    rep.total_states = opt_int(j, "total_states");
    rep.proposal_buffer =
        static_cast<std::size_t>(j.value("proposal_buffer", std::int64_t{0}));
    rep.refutation_buffer = static_cast<std::size_t>(
        j.value("refutation_buffer", std::int64_t{0}));
    rep.proposal_loss = opt_double(j, "proposal_loss");
    rep.refutation_loss = opt_double(j, "refutation_loss");
    rep.propose_optimal_rate = opt_double(j, "propose_optimal_rate");
    rep.accepted = j.value("accepted", true);
  } catch (const json::exception& e) {
    throw MetricsError(std::string("metrics: bad record: ") + e.what());
  }
  return rep;
}

MetricsWriter::MetricsWriter(const std::string& path) : path_(path) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw MetricsError("metrics: cannot open for append: " + path_);
}

void MetricsWriter::write(const IterationReport& rep) {
  std::ofstream out(path_, std::ios::app);
  if (!out) throw MetricsError("metrics: cannot open for append: " + path_);
  out << iteration_report_json(rep) << '\n';
  if (!out.good()) throw MetricsError("metrics: write failed: " + path_);
}

std::vector<IterationReport> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MetricsError("metrics: cannot open: " + path);
  std::vector<IterationReport> reports;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    reports.push_back(parse_iteration_report(line));
  }
  return reports;
}

namespace {

void csv_field(std::ostream& out, const std::optional<double>& v) {
  if (v) out << std::setprecision(12) << *v;
}

}  // namespace

void export_csv(const std::vector<IterationReport>& reports,
                std::ostream& out) {
  out << "iteration,new_P_correct,new_OP_correct,old_P_correct,"
         "old_OP_correct,mean_states,coverage_ratio\n";
  for (const IterationReport& rep : reports) {
    out << rep.iteration << ',';
    csv_field(out, rep.new_p_correct);
    out << ',';
    csv_field(out, rep.new_op_correct);
    out << ',';
    csv_field(out, rep.old_p_correct);
    out << ',';
    csv_field(out, rep.old_op_correct);
    out << ',' << std::setprecision(12) << rep.mean_states << ',';
    csv_field(out, rep.coverage_ratio);
    out << '\n';
  }
}

}  // namespace hsr
