#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hsr/pipeline.hpp"

namespace hsr {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode : std::uint8_t {
  Complete,
  Refutation,
  Arena,
  Play,
  Oracle,
  Enumerate
};

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& text);

// Flat, fully serializable run description; the single source of truth for
// training and playing commands.
struct RunConfig {
  RunMode mode = RunMode::Refutation;
  int k0 = 2;
  int q0 = 6;
  std::int64_t n = 22;     // refutation root size
  std::int64_t n_max = 0;  // proposal bound; 0 = derive (refutation: = n)
  int episodes = 100;
  int iterations = 30;
  int arena_rounds = 20;
  double gate_threshold = 0.0;
  int simulations = 50;
  double c_puct = 1.0;
  double temperature = 1.0;
  bool theoretical_exploration = false;
  double dirichlet_epsilon = 0.0;
  double dirichlet_alpha = 0.3;
  int buffer_iterations = 20;
  int epochs = 10;
  int batch_size = 64;
  double learning_rate = 1e-2;
  double momentum = 0.9;
  int conv_layers = 4;
  int conv_channels = 16;
  int dense_layers = 2;
  int dense_width = 64;
  int workers = 1;
  std::uint64_t seed = 0;
  bool early_stop = false;
  double early_stop_correct = 0.95;
  double early_stop_winrate = 0.95;
  std::string out_dir;

  bool operator==(const RunConfig&) const = default;

  // n_max with the refutation default applied.
  std::int64_t effective_n_max() const;
};

// Applies one key=value override; unknown keys or unparseable values throw
// ConfigError.
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// key=value lines; '#' starts a comment, blank lines ignored.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});

// Deterministic key order; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);
void save_config_file(const RunConfig& cfg, const std::string& path);

// Empty when valid; otherwise one message per problem.
std::vector<std::string> validate_config(const RunConfig& cfg);

std::vector<std::string> preset_names();
bool has_preset(const std::string& name);
// Throws ConfigError for unknown names.
RunConfig preset(const std::string& name);
std::string preset_summary(const std::string& name);

GameSpec game_spec(const RunConfig& cfg);
SearchConfig search_config(const RunConfig& cfg);
PipelineConfig pipeline_config(const RunConfig& cfg);

}  // namespace hsr
