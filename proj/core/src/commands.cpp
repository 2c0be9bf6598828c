#include "hsr/commands.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "hsr/metrics.hpp"
#include "hsr/oracle.hpp"

namespace hsr {

namespace fs = std::filesystem;

namespace {

struct RunPaths {
  fs::path dir;
  fs::path config;
  fs::path seed;
  fs::path metrics;
  fs::path proposal;
  fs::path refutation;
  fs::path state;
  fs::path summary;
};

RunPaths run_paths(const std::string& out_dir) {
  RunPaths p;
  p.dir = out_dir;
  p.config = p.dir / "config.txt";
  p.seed = p.dir / "seed.txt";
  p.metrics = p.dir / "metrics.jsonl";
  p.proposal = p.dir / "proposal_latest.ckpt";
  p.refutation = p.dir / "refutation_latest.ckpt";
  p.state = p.dir / "state.txt";
  p.summary = p.dir / "summary.txt";
  return p;
}

std::optional<int> read_state_iteration(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("iteration=", 0) == 0) {
      try {
        return std::stoi(line.substr(10));
      } catch (const std::exception&) {
        return std::nullopt;
      }
    }
  }
  return std::nullopt;
}

void write_state(const fs::path& path, int iteration) {
  std::ofstream out(path);
  if (!out) throw MetricsError("cannot write run state: " + path.string());
  out << "iteration=" << iteration << '\n';
}

bool converged(const IterationReport& rep, const RunConfig& cfg) {
  if (!rep.new_p_correct || *rep.new_p_correct < cfg.early_stop_correct) {
    return false;
  }
  if (rep.new_as_p_games == 0) return false;
  double win_rate =
      static_cast<double>(rep.new_as_p_wins) / rep.new_as_p_games;
  return win_rate >= cfg.early_stop_winrate;
}

std::string report_line(const IterationReport& rep) {
  std::ostringstream os;
  os << "iteration " << rep.iteration;
  auto ratio = [&](const char* name, const std::optional<double>& v) {
    os << ' ' << name << '=';
    if (v) {
      os << std::fixed << std::setprecision(3) << *v;
    } else {
      os << '-';
    }
  };
  ratio("new_P", rep.new_p_correct);
  ratio("new_OP", rep.new_op_correct);
  ratio("old_P", rep.old_p_correct);
  ratio("old_OP", rep.old_op_correct);
  os << " wins=" << rep.arena_new_wins << '/' << rep.arena_games;
  os << " mean_states=" << std::fixed << std::setprecision(1)
     << rep.mean_states;
  if (rep.coverage_ratio) {
    os << " coverage=" << std::fixed << std::setprecision(3)
       << *rep.coverage_ratio;
  }
  if (rep.propose_optimal_rate) {
    os << " optimal_proposals=" << std::fixed << std::setprecision(3)
       << *rep.propose_optimal_rate;
  }
  if (!rep.accepted) os << " rejected";
  return os.str();
}

int run_guarded(const CommandIO& io, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetExceeded& e) {
    io.err << "budget error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const CheckpointError& e) {
    io.err << "checkpoint error: " << e.what() << '\n';
    return kExitIO;
  } catch (const MetricsError& e) {
    io.err << "metrics error: " << e.what() << '\n';
    return kExitIO;
  } catch (const fs::filesystem_error& e) {
    io.err << "filesystem error: " << e.what() << '\n';
    return kExitIO;
  } catch (const std::invalid_argument& e) {
    io.err << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return kExitIO;
  }
}

}  // namespace

int cmd_train(const RunConfig& cfg, const CommandIO& io) {
  return run_guarded(io, [&]() -> int {
    if (cfg.mode != RunMode::Complete && cfg.mode != RunMode::Refutation) {
      io.err << "config error: train requires mode=complete or "
                "mode=refutation\n";
      return kExitConfig;
    }
    std::vector<std::string> problems = validate_config(cfg);
    if (cfg.out_dir.empty()) problems.push_back("out_dir must be set");
    if (!problems.empty()) {
      for (const std::string& p : problems) {
        io.err << "config error: " << p << '\n';
      }
      return kExitConfig;
    }

    RunPaths paths = run_paths(cfg.out_dir);
    fs::create_directories(paths.dir);
    save_config_file(cfg, paths.config.string());
    {
      std::ofstream seed_out(paths.seed);
      if (!seed_out) {
        throw MetricsError("cannot write seed file: " + paths.seed.string());
      }
      seed_out << cfg.seed << '\n';
    }

    Pipeline pipeline(pipeline_config(cfg));
    std::optional<int> resume_iter = read_state_iteration(paths.state);
    if (resume_iter && fs::exists(paths.proposal) &&
        fs::exists(paths.refutation)) {
      Network proposal = Network::load(paths.proposal.string());
      Network refutation = Network::load(paths.refutation.string());
      pipeline.restore(std::move(proposal), std::move(refutation),
                       *resume_iter);
      io.out << "resuming from iteration " << *resume_iter << '\n';
    }

    MetricsWriter metrics(paths.metrics.string());
    IterationReport last;
    bool stopped_early = false;
    while (pipeline.iteration() < cfg.iterations) {
      last = pipeline.run_iteration();
      metrics.write(last);
      pipeline.proposal_net().save(paths.proposal.string());
      pipeline.refutation_net().save(paths.refutation.string());
      write_state(paths.state, pipeline.iteration());
      io.out << report_line(last) << '\n';
      if (cfg.early_stop && converged(last, cfg)) {
        io.out << "early stop: convergence target reached\n";
        stopped_early = true;
        break;
      }
    }

    std::ofstream summary(paths.summary);
    if (!summary) {
      throw MetricsError("cannot write summary: " + paths.summary.string());
    }
    summary << "iterations_completed=" << pipeline.iteration() << '\n'
            << "iterations_requested=" << cfg.iterations << '\n'
            << "early_stop=" << (stopped_early ? "true" : "false") << '\n';
    if (pipeline.iteration() > 0) {
      summary << "last_report=" << iteration_report_json(last) << '\n';
    }
    return kExitOk;
  });
}

namespace {

using ChooseFn = std::function<Action(const GameState&)>;

struct Agent {
  std::string label;
  ChooseFn choose;
  // Keeps loaded networks / evaluators alive for the closure.
  std::shared_ptr<void> storage;
};

struct NetBundle {
  Network proposal;
  Network refutation;
  std::unique_ptr<NetworkPairEvaluator> eval;
};

Action parse_human_action(const std::string& line) {
  std::istringstream in(line);
  std::string word;
  if (!(in >> word)) throw std::invalid_argument("empty input");
  for (char& c : word) c = static_cast<char>(std::tolower(c));
  auto need_value = [&]() {
    int v = 0;
    if (!(in >> v)) throw std::invalid_argument("expected a number");
    return v;
  };
  if (word == "propose") return Action::propose(need_value());
  if (word == "test") return Action::test(need_value());
  if (word == "accept") return Action::accept();
  if (word == "reject") return Action::reject();
  if (word == "break") return Action::jar_breaks();
  if (word == "notbreak" || word == "survive" || word == "survives") {
    return Action::jar_survives();
  }
  throw std::invalid_argument("unrecognized action: " + word);
}

Agent make_agent(const std::string& spec, const GameSpec& game,
                 const SearchConfig& search_cfg, const CommandIO& io) {
  SearchConfig cfg = search_cfg;
  cfg.temperature = 0.0;
  if (spec == "oracle") {
    return Agent{"oracle", [](const GameState& s) { return optimal_action(s); },
                 nullptr};
  }
  if (spec == "uniform") {
    auto eval = std::make_shared<UniformEvaluator>(game.head_p_size());
    ChooseFn choose = [eval, cfg](const GameState& s) {
      SearchResult res = search(s, *eval, cfg);
      return res.actions[static_cast<std::size_t>(res.argmax_index)];
    };
    return Agent{"uniform", std::move(choose), eval};
  }
  if (spec == "human") {
    std::istream* in = &io.in;
    std::ostream* out = &io.out;
    ChooseFn choose = [in, out](const GameState& s) {
      for (;;) {
        *out << "your move (";
        std::vector<Action> legal = legal_actions(s);
        for (std::size_t i = 0; i < legal.size(); ++i) {
          if (i > 0) *out << ", ";
          if (i >= 6 && legal.size() > 8) {
            *out << "... " << to_string(legal.back());
            break;
          }
          *out << to_string(legal[i]);
        }
        *out << "): " << std::flush;
        std::string line;
        if (!std::getline(*in, line)) {
          throw std::runtime_error("input closed before the game ended");
        }
        try {
          Action a = parse_human_action(line);
          if (!is_legal(s, a)) {
            *out << "illegal move: " << to_string(a) << '\n';
            continue;
          }
          return a;
        } catch (const std::invalid_argument& e) {
          *out << "could not read that (" << e.what() << "); try again\n";
        }
      }
    };
    return Agent{"human", std::move(choose), nullptr};
  }
  if (spec.rfind("net:", 0) == 0) {
    std::string dir = spec.substr(4);
    RunPaths paths = run_paths(dir);
    auto bundle = std::make_shared<NetBundle>(NetBundle{
        Network::load(paths.proposal.string()),
        Network::load(paths.refutation.string()), nullptr});
    if (bundle->refutation.config().head_p_size != game.head_p_size()) {
      throw ConfigError("checkpoint head size does not match the game (" +
                        std::to_string(bundle->refutation.config().head_p_size) +
                        " vs " + std::to_string(game.head_p_size()) + ")");
    }
    bundle->eval = std::make_unique<NetworkPairEvaluator>(
        &bundle->proposal, &bundle->refutation, game.scale());
    ChooseFn choose = [bundle, cfg](const GameState& s) {
      SearchResult res = search(s, *bundle->eval, cfg);
      return res.actions[static_cast<std::size_t>(res.argmax_index)];
    };
    return Agent{"net(" + dir + ")", std::move(choose), bundle};
  }
  throw ConfigError("unknown agent spec: " + spec +
                    " (expected oracle, uniform, human, or net:<dir>)");
}

}  // namespace

int cmd_play(const RunConfig& cfg, const std::string& first_agent,
             const std::string& second_agent, const CommandIO& io) {
  return run_guarded(io, [&]() -> int {
    GameSpec game = game_spec(cfg);
    SearchConfig scfg = search_config(cfg);
    Agent first = make_agent(first_agent, game, scfg, io);
    Agent second = make_agent(second_agent, game, scfg, io);
    io.out << "First: " << first.label << "  Second: " << second.label << '\n';

    GameState s = game.root_state();
    int move_no = 0;
    while (s.phase != Phase::Terminal) {
      PlayerId actor = mover(s);
      const Agent& agent = (actor == PlayerId::First) ? first : second;
      Action a = agent.choose(s);
      if (!is_legal(s, a)) {
        io.err << "agent " << agent.label << " produced an illegal move "
               << to_string(a) << " at " << to_string(s) << '\n';
        return kExitIO;
      }
      MoveRecord rec{s, actor, role_of(s, actor), a};
      ++move_no;
      io.out << std::setw(2) << move_no << ". " << to_string(s) << " | "
             << to_string(actor) << " (" << to_string(rec.actor_role) << ") "
             << to_string(a) << " | " << to_string(classify_move(rec)) << '\n';
      s = apply(s, a);
    }
    io.out << "winner: " << to_string(*s.winner) << " ("
           << to_string(role_of(s, *s.winner)) << ")\n";
    return kExitOk;
  });
}

int cmd_oracle(int k, int q, std::optional<std::int64_t> n,
               std::optional<std::int64_t> m, const CommandIO& io) {
  return run_guarded(io, [&]() -> int {
    if (k < 0 || q < 0) {
      throw ConfigError("k and q must be non-negative");
    }
    if (!n) {
      Triangle triangle(k, q);
      io.out << triangle.pretty();
      return kExitOk;
    }
    if (m) {
      AnswerSet set =
          correct_answers(k, q, static_cast<int>(*n), static_cast<int>(*m));
      io.out << "correct answers: {";
      bool first = true;
      if (set.jar_breaks) {
        io.out << "Break";
        first = false;
      }
      if (set.survives) {
        if (!first) io.out << ",";
        io.out << "NotBreak";
      }
      io.out << "}\n";
      return kExitOk;
    }
    bool wins = claimer_wins(k, q, *n);
    io.out << "claimer wins: " << (wins ? "yes" : "no") << " (N(" << k << ","
           << q << ")=" << bernoulli(k, q) << ", n=" << *n << ")\n";
    if (k >= 1 && q >= 1 && *n >= 2) {
      TestRange range = correct_tests(k, q, static_cast<int>(*n));
      if (range.empty()) {
        io.out << "correct tests: none\n";
      } else {
        io.out << "correct tests: [" << range.lo << "," << range.hi << "]\n";
      }
    }
    DecisionSet decision = correct_decision(k, q, *n);
    io.out << "correct decision: {";
    bool first = true;
    if (decision.accept) {
      io.out << "Accept";
      first = false;
    }
    if (decision.reject) {
      if (!first) io.out << ",";
      io.out << "Reject";
    }
    io.out << "}\n";
    return kExitOk;
  });
}

int cmd_enumerate(int k, int q, std::int64_t n, std::int64_t budget,
                  const CommandIO& io) {
  return run_guarded(io, [&]() -> int {
    if (k < 0 || q < 0 || n < 1) {
      throw ConfigError("need k >= 0, q >= 0, n >= 1");
    }
    EnumerationResult result =
        enumerate_states(k, q, static_cast<int>(n), budget);
    io.out << "states(" << k << "," << q << "," << n << ") = " << result.count
           << '\n'
           << "  test positions:    " << result.claimer_test_states << '\n'
           << "  answer positions:  " << result.refuter_answer_states << '\n'
           << "  terminal positions: " << result.terminal_states << '\n';
    return kExitOk;
  });
}

int cmd_export(const std::string& run_dir, const std::string& out_path,
               const CommandIO& io) {
  return run_guarded(io, [&]() -> int {
    fs::path metrics_path = fs::path(run_dir) / "metrics.jsonl";
    std::vector<IterationReport> reports = read_metrics(metrics_path.string());
    if (out_path == "-") {
      export_csv(reports, io.out);
      return kExitOk;
    }
    fs::path target = out_path.empty()
                          ? fs::path(run_dir) / "metrics.csv"
                          : fs::path(out_path);
    std::ofstream out(target);
    if (!out) throw MetricsError("cannot write CSV: " + target.string());
    export_csv(reports, out);
    if (!out.good()) throw MetricsError("CSV write failed: " + target.string());
    io.out << "wrote " << reports.size() << " rows to " << target.string()
           << '\n';
    return kExitOk;
  });
}

}  // namespace hsr
