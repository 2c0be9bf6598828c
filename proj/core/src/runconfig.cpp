#include "hsr/runconfig.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace hsr {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Complete: return "complete";
    case RunMode::Refutation: return "refutation";
    case RunMode::Arena: return "arena";
    case RunMode::Play: return "play";
    case RunMode::Oracle: return "oracle";
    case RunMode::Enumerate: return "enumerate";
  }
  return "?";
}

RunMode parse_run_mode(const std::string& text) {
  if (text == "complete") return RunMode::Complete;
  if (text == "refutation") return RunMode::Refutation;
  if (text == "arena") return RunMode::Arena;
  if (text == "play") return RunMode::Play;
  if (text == "oracle") return RunMode::Oracle;
  if (text == "enumerate") return RunMode::Enumerate;
  throw ConfigError("unknown mode: " + text);
}

std::int64_t RunConfig::effective_n_max() const {
  if (n_max > 0) return n_max;
  return mode == RunMode::Complete ? 0 : n;
}

namespace {

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    std::int64_t v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: '" + value + "'");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size() || value.find('-') != std::string::npos) {
      throw std::invalid_argument("bad");
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a non-negative integer: '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": not a boolean: '" + value + "'");
}

int narrow(const std::string& key, std::int64_t v) {
  if (v < INT32_MIN || v > INT32_MAX) {
    throw ConfigError(key + ": out of range");
  }
  return static_cast<int>(v);
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "mode") {
    cfg.mode = parse_run_mode(value);
  } else if (key == "k0") {
    cfg.k0 = narrow(key, parse_int(key, value));
  } else if (key == "q0") {
    cfg.q0 = narrow(key, parse_int(key, value));
  } else if (key == "n") {
    cfg.n = parse_int(key, value);
  } else if (key == "n_max") {
    cfg.n_max = parse_int(key, value);
  } else if (key == "episodes") {
    cfg.episodes = narrow(key, parse_int(key, value));
  } else if (key == "iterations") {
    cfg.iterations = narrow(key, parse_int(key, value));
  } else if (key == "arena_rounds") {
    cfg.arena_rounds = narrow(key, parse_int(key, value));
  } else if (key == "gate_threshold") {
    cfg.gate_threshold = parse_double(key, value);
  } else if (key == "simulations") {
    cfg.simulations = narrow(key, parse_int(key, value));
  } else if (key == "c_puct") {
    cfg.c_puct = parse_double(key, value);
  } else if (key == "temperature") {
    cfg.temperature = parse_double(key, value);
  } else if (key == "theoretical_exploration") {
    cfg.theoretical_exploration = parse_bool(key, value);
  } else if (key == "dirichlet_epsilon") {
    cfg.dirichlet_epsilon = parse_double(key, value);
  } else if (key == "dirichlet_alpha") {
    cfg.dirichlet_alpha = parse_double(key, value);
  } else if (key == "buffer_iterations") {
    cfg.buffer_iterations = narrow(key, parse_int(key, value));
  } else if (key == "epochs") {
    cfg.epochs = narrow(key, parse_int(key, value));
  } else if (key == "batch_size") {
    cfg.batch_size = narrow(key, parse_int(key, value));
  } else if (key == "learning_rate") {
    cfg.learning_rate = parse_double(key, value);
  } else if (key == "momentum") {
    cfg.momentum = parse_double(key, value);
  } else if (key == "conv_layers") {
    cfg.conv_layers = narrow(key, parse_int(key, value));
  } else if (key == "conv_channels") {
    cfg.conv_channels = narrow(key, parse_int(key, value));
  } else if (key == "dense_layers") {
    cfg.dense_layers = narrow(key, parse_int(key, value));
  } else if (key == "dense_width") {
    cfg.dense_width = narrow(key, parse_int(key, value));
  } else if (key == "workers") {
    cfg.workers = narrow(key, parse_int(key, value));
  } else if (key == "seed") {
    cfg.seed = parse_uint(key, value);
  } else if (key == "early_stop") {
    cfg.early_stop = parse_bool(key, value);
  } else if (key == "early_stop_correct") {
    cfg.early_stop_correct = parse_double(key, value);
  } else if (key == "early_stop_winrate") {
    cfg.early_stop_winrate = parse_double(key, value);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "line " << lineno << ": expected key=value, got '" << line << "'";
      throw ConfigError(os.str());
    }
    apply_override(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(base));
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  os << "mode=" << to_string(c.mode) << '\n'
     << "k0=" << c.k0 << '\n'
     << "q0=" << c.q0 << '\n'
     << "n=" << c.n << '\n'
     << "n_max=" << c.n_max << '\n'
     << "episodes=" << c.episodes << '\n'
     << "iterations=" << c.iterations << '\n'
     << "arena_rounds=" << c.arena_rounds << '\n'
     << "gate_threshold=" << fmt_double(c.gate_threshold) << '\n'
     << "simulations=" << c.simulations << '\n'
     << "c_puct=" << fmt_double(c.c_puct) << '\n'
     << "temperature=" << fmt_double(c.temperature) << '\n'
     << "theoretical_exploration=" << (c.theoretical_exploration ? "true" : "false")
     << '\n'
     << "dirichlet_epsilon=" << fmt_double(c.dirichlet_epsilon) << '\n'
     << "dirichlet_alpha=" << fmt_double(c.dirichlet_alpha) << '\n'
     << "buffer_iterations=" << c.buffer_iterations << '\n'
     << "epochs=" << c.epochs << '\n'
     << "batch_size=" << c.batch_size << '\n'
     << "learning_rate=" << fmt_double(c.learning_rate) << '\n'
     << "momentum=" << fmt_double(c.momentum) << '\n'
     << "conv_layers=" << c.conv_layers << '\n'
     << "conv_channels=" << c.conv_channels << '\n'
     << "dense_layers=" << c.dense_layers << '\n'
     << "dense_width=" << c.dense_width << '\n'
     << "workers=" << c.workers << '\n'
     << "seed=" << c.seed << '\n'
     << "early_stop=" << (c.early_stop ? "true" : "false") << '\n'
     << "early_stop_correct=" << fmt_double(c.early_stop_correct) << '\n'
     << "early_stop_winrate=" << fmt_double(c.early_stop_winrate) << '\n'
     << "out_dir=" << c.out_dir << '\n';
  return os.str();
}

void save_config_file(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << serialize_config(cfg);
  if (!out.good()) throw ConfigError("config write failed: " + path);
}

std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> problems;
  auto complain = [&](const std::string& msg) { problems.push_back(msg); };
  if (c.k0 < 1) complain("k0 must be >= 1");
  if (c.q0 < 1) complain("q0 must be >= 1");
  bool train_mode =
      c.mode == RunMode::Complete || c.mode == RunMode::Refutation;
  if (c.mode == RunMode::Complete) {
    if (c.n_max < 1) complain("complete mode requires n_max >= 1");
  } else {
    if (c.n < 1) complain("n must be >= 1");
    if (c.n_max != 0 && c.n_max != c.n) {
      complain("refutation mode fixes n_max = n; leave n_max at 0");
    }
    if (c.n > c.effective_n_max() + 1) {
      complain("n must be <= n_max + 1");
    }
  }
  if (train_mode) {
    if (c.seed == 0) complain("seed must be set (nonzero) for training runs");
    if (c.episodes < 0) complain("episodes must be >= 0");
    if (c.iterations < 0) complain("iterations must be >= 0");
    if (c.buffer_iterations < 1) complain("buffer_iterations must be >= 1");
    if (c.epochs < 1) complain("epochs must be >= 1");
    if (c.batch_size < 1) complain("batch_size must be >= 1");
    if (!(c.learning_rate > 0)) complain("learning_rate must be > 0");
    if (c.momentum < 0 || c.momentum >= 1) {
      complain("momentum must be in [0, 1)");
    }
    if (c.conv_layers < 0) complain("conv_layers must be >= 0");
    if (c.conv_channels < 1) complain("conv_channels must be >= 1");
    if (c.dense_layers < 0) complain("dense_layers must be >= 0");
    if (c.dense_width < 1) complain("dense_width must be >= 1");
  }
  if (c.arena_rounds < 0) complain("arena_rounds must be >= 0");
  if (c.simulations < 1) complain("simulations must be >= 1");
  if (!(c.c_puct > 0)) complain("c_puct must be > 0");
  if (c.temperature < 0) complain("temperature must be >= 0");
  if (c.gate_threshold < 0 || c.gate_threshold > 1) {
    complain("gate_threshold must be in [0, 1]");
  }
  if (c.dirichlet_epsilon < 0 || c.dirichlet_epsilon > 1) {
    complain("dirichlet_epsilon must be in [0, 1]");
  }
  if (c.dirichlet_epsilon > 0 && !(c.dirichlet_alpha > 0)) {
    complain("dirichlet_alpha must be > 0 when noise is enabled");
  }
  if (c.workers < 1) complain("workers must be >= 1");
  return problems;
}

namespace {

struct PresetDef {
  std::string name;
  std::string summary;
  std::function<void(RunConfig&)> build;
};

const std::vector<PresetDef>& preset_defs() {
  static const std::vector<PresetDef> defs = {
      {"hsr-7-7",
       "complete game, k=7 q=7, proposals up to 130 (large; not desk-scale)",
       [](RunConfig& c) {
         c.mode = RunMode::Complete;
         c.k0 = 7;
         c.q0 = 7;
         c.n_max = 130;
         c.n = 1;
         c.iterations = 80;
         c.seed = 7007;
       }},
      {"hsr-7-7-128",
       "refutation game at the solvability boundary: k=7 q=7 n=128",
       [](RunConfig& c) {
         c.mode = RunMode::Refutation;
         c.k0 = 7;
         c.q0 = 7;
         c.n = 128;
         c.n_max = 0;
         c.iterations = 30;
         c.seed = 77128;
       }},
      {"hsr-7-7-129",
       "unsolvable refutation game: k=7 q=7 n=129 (claimer is doomed)",
       [](RunConfig& c) {
         c.mode = RunMode::Refutation;
         c.k0 = 7;
         c.q0 = 7;
         c.n = 129;
         c.n_max = 0;
         c.iterations = 30;
         c.seed = 77129;
       }},
      {"hsr-3-7-64",
       "refutation game k=3 q=7 n=64: boundary instance with a unique "
       "correct line",
       [](RunConfig& c) {
         c.mode = RunMode::Refutation;
         c.k0 = 3;
         c.q0 = 7;
         c.n = 64;
         c.n_max = 0;
         c.iterations = 30;
         c.seed = 3764;
       }},
      {"hsr-3-7-63",
       "refutation game k=3 q=7 n=63: one below the boundary",
       [](RunConfig& c) {
         c.mode = RunMode::Refutation;
         c.k0 = 3;
         c.q0 = 7;
         c.n = 63;
         c.n_max = 0;
         c.iterations = 30;
         c.seed = 3763;
       }},
      {"desk-2-6-22",
       "desk-scale boundary refutation game: k=2 q=6 n=22",
       [](RunConfig& c) {
         c.mode = RunMode::Refutation;
         c.k0 = 2;
         c.q0 = 6;
         c.n = 22;
         c.n_max = 0;
         c.iterations = 30;
         c.episodes = 100;
         c.seed = 2622;
         c.early_stop = true;
       }},
      {"desk-2-2-5",
       "desk-scale unsolvable refutation game: k=2 q=2 n=5",
       [](RunConfig& c) {
         c.mode = RunMode::Refutation;
         c.k0 = 2;
         c.q0 = 2;
         c.n = 5;
         c.n_max = 0;
         c.iterations = 8;
         c.episodes = 100;
         c.seed = 225;
       }},
      {"desk-2-3-complete",
       "desk-scale complete game: k=2 q=3, proposals up to 10",
       [](RunConfig& c) {
         c.mode = RunMode::Complete;
         c.k0 = 2;
         c.q0 = 3;
         c.n_max = 10;
         c.n = 1;
         c.iterations = 40;
         c.episodes = 100;
         c.seed = 2310;
       }},
  };
  return defs;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& def : preset_defs()) names.push_back(def.name);
  return names;
}

bool has_preset(const std::string& name) {
  for (const auto& def : preset_defs()) {
    if (def.name == name) return true;
  }
  return false;
}

RunConfig preset(const std::string& name) {
  for (const auto& def : preset_defs()) {
    if (def.name == name) {
      RunConfig cfg;
      def.build(cfg);
      return cfg;
    }
  }
  throw ConfigError("unknown preset: " + name);
}

std::string preset_summary(const std::string& name) {
  for (const auto& def : preset_defs()) {
    if (def.name == name) return def.summary;
  }
  throw ConfigError("unknown preset: " + name);
}

GameSpec game_spec(const RunConfig& cfg) {
  GameSpec spec;
  spec.complete = (cfg.mode == RunMode::Complete);
  spec.k0 = cfg.k0;
  spec.q0 = cfg.q0;
  spec.n = cfg.n;
  spec.n_max = cfg.effective_n_max();
  return spec;
}

SearchConfig search_config(const RunConfig& cfg) {
  SearchConfig sc;
  sc.simulations = cfg.simulations;
  sc.c_puct = cfg.c_puct;
  sc.temperature = cfg.temperature;
  sc.theoretical_exploration = cfg.theoretical_exploration;
  sc.dirichlet_epsilon = cfg.dirichlet_epsilon;
  sc.dirichlet_alpha = cfg.dirichlet_alpha;
  sc.seed = cfg.seed;
  return sc;
}

PipelineConfig pipeline_config(const RunConfig& cfg) {
  PipelineConfig pc;
  pc.game = game_spec(cfg);
  pc.search = search_config(cfg);
  pc.episodes = cfg.episodes;
  pc.arena_rounds = cfg.arena_rounds;
  pc.buffer_iterations = cfg.buffer_iterations;
  pc.epochs = cfg.epochs;
  pc.batch_size = cfg.batch_size;
  pc.hyper.learning_rate = cfg.learning_rate;
  pc.hyper.momentum = cfg.momentum;
  pc.gate_threshold = cfg.gate_threshold;
  pc.workers = cfg.workers;
  pc.seed = cfg.seed;
  pc.net_template.input_len = 5;
  pc.net_template.conv_channels.assign(
      static_cast<std::size_t>(cfg.conv_layers), cfg.conv_channels);
  pc.net_template.kernel = 3;
  pc.net_template.dense_widths.assign(
      static_cast<std::size_t>(cfg.dense_layers), cfg.dense_width);
  return pc;
}

}  // namespace hsr
