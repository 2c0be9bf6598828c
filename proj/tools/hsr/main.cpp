#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsr/commands.hpp"
#include "hsr/runconfig.hpp"

namespace {

struct ConfigArgs {
  std::string preset;
  std::string config_file;
  std::vector<std::string> sets;
  std::string out_dir;
  std::string seed;
};

void add_config_options(CLI::App* sub, ConfigArgs& args) {
  sub->add_option("--preset", args.preset, "Start from a named preset")
      ->check(CLI::IsMember(hsr::preset_names()));
  sub->add_option("--config", args.config_file,
                  "Load a key=value config file on top of the preset")
      ->check(CLI::ExistingFile);
  sub->add_option("--set", args.sets,
                  "Override one config key (key=value); repeatable, applied "
                  "last");
  sub->add_option("--out", args.out_dir, "Run directory (key out_dir)");
  sub->add_option("--seed", args.seed, "Master seed (key seed)");
}

// Preset -> config file -> --set overrides -> --out / --seed shorthands.
hsr::RunConfig build_config(const ConfigArgs& args) {
  hsr::RunConfig cfg;
  if (!args.preset.empty()) cfg = hsr::preset(args.preset);
  if (!args.config_file.empty()) {
    cfg = hsr::load_config_file(args.config_file, cfg);
  }
  for (const std::string& kv : args.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw hsr::ConfigError("--set expects key=value, got: " + kv);
    }
    hsr::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!args.out_dir.empty()) hsr::apply_override(cfg, "out_dir", args.out_dir);
  if (!args.seed.empty()) hsr::apply_override(cfg, "seed", args.seed);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-play solver for the highest-safe-rung testing game"};
  app.require_subcommand(1);
  hsr::CommandIO io{std::cin, std::cout, std::cerr};

  ConfigArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train", "Run the self-play training loop into a run directory");
  add_config_options(train, train_args);

  ConfigArgs play_args;
  std::string first_agent = "oracle";
  std::string second_agent = "oracle";
  CLI::App* play = app.add_subcommand(
      "play",
      "Play one game between two agents and print every move with its "
      "ground-truth judgment");
  add_config_options(play, play_args);
  play->add_option("--first", first_agent,
                   "First player: oracle | uniform | human | net:<run dir>");
  play->add_option("--second", second_agent,
                   "Second player: oracle | uniform | human | net:<run dir>");

  int oracle_k = 0;
  int oracle_q = 0;
  std::optional<std::int64_t> oracle_n;
  std::optional<std::int64_t> oracle_m;
  CLI::App* oracle = app.add_subcommand(
      "oracle",
      "Print the solution-count triangle up to (k,q), or the correct move "
      "sets for position n (and answer sets for split m)");
  oracle->add_option("k", oracle_k, "Jars available")->required();
  oracle->add_option("q", oracle_q, "Tests available")->required();
  oracle->add_option("n", oracle_n, "Candidate count to analyze");
  oracle->add_option("m", oracle_m, "Split point to analyze");

  int enum_k = 0;
  int enum_q = 0;
  std::int64_t enum_n = 0;
  std::int64_t enum_budget = 50'000'000;
  CLI::App* enumerate = app.add_subcommand(
      "enumerate", "Count reachable states of the refutation game at (k,q,n)");
  enumerate->add_option("k", enum_k, "Jars available")->required();
  enumerate->add_option("q", enum_q, "Tests available")->required();
  enumerate->add_option("n", enum_n, "Root candidate count")->required();
  enumerate->add_option("--budget", enum_budget,
                        "Abort after visiting this many states");

  std::string export_dir;
  std::string export_out;
  CLI::App* export_cmd = app.add_subcommand(
      "export", "Convert a run directory's metrics.jsonl to CSV");
  export_cmd->add_option("run_dir", export_dir, "Run directory")->required();
  export_cmd->add_option("--out", export_out,
                         "CSV path; default <run_dir>/metrics.csv, '-' for "
                         "stdout");

  CLI::App* presets =
      app.add_subcommand("presets", "List the built-in experiment presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? hsr::kExitOk : hsr::kExitConfig;
  }

  try {
    if (train->parsed()) {
      return hsr::cmd_train(build_config(train_args), io);
    }
    if (play->parsed()) {
      return hsr::cmd_play(build_config(play_args), first_agent, second_agent,
                           io);
    }
    if (oracle->parsed()) {
      return hsr::cmd_oracle(oracle_k, oracle_q, oracle_n, oracle_m, io);
    }
    if (enumerate->parsed()) {
      return hsr::cmd_enumerate(enum_k, enum_q, enum_n, enum_budget, io);
    }
    if (export_cmd->parsed()) {
      return hsr::cmd_export(export_dir, export_out, io);
    }
    if (presets->parsed()) {
      for (const std::string& name : hsr::preset_names()) {
        io.out << name << "\n    " << hsr::preset_summary(name) << '\n';
      }
      return hsr::kExitOk;
    }
  } catch (const hsr::ConfigError& e) {
    io.err << "config error: " << e.what() << '\n';
    return hsr::kExitConfig;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return hsr::kExitIO;
  }
  return hsr::kExitConfig;
}
