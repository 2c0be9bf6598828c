#include "hsr/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hsr/rng.hpp"
#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

namespace hsr {

namespace {

constexpr char kMagic[8] = {'H', 'S', 'R', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

int padding_of(int kernel) { return kernel / 2; }

std::size_t numel(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

struct SoftmaxResult {
  std::vector<double> probs;
  double log_z = 0.0;
  double max_logit = 0.0;
};

SoftmaxResult softmax(const std::vector<double>& logits) {
  SoftmaxResult r;
  r.max_logit = logits[0];
  for (double v : logits) r.max_logit = std::max(r.max_logit, v);
  r.probs.resize(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.probs[i] = std::exp(logits[i] - r.max_logit);
    total += r.probs[i];
  }
  for (double& p : r.probs) p /= total;
  r.log_z = r.max_logit + std::log(total);
  return r;
}

double relu(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

struct Network::Activations {
  std::vector<std::vector<double>> conv_in;   // [0] = input signal
  std::vector<std::vector<double>> conv_pre;
  std::vector<std::vector<double>> dense_in;  // [0] = flattened conv output
  std::vector<std::vector<double>> dense_pre;
  std::vector<double> logits_p;
  std::vector<double> logits_op;
  double value_pre = 0.0;
  double value = 0.0;
};

Network::Network(const NetConfig& cfg) : cfg_(cfg) {
  if (cfg_.input_len < 1 || cfg_.kernel < 1 || cfg_.kernel % 2 == 0) {
    throw std::invalid_argument("NetConfig: bad input_len/kernel");
  }
  if (cfg_.head_p_size < 2 || cfg_.head_op_size != 2) {
    throw std::invalid_argument("NetConfig: bad head sizes");
  }
  for (int c : cfg_.conv_channels) {
    if (c < 1) throw std::invalid_argument("NetConfig: bad conv channels");
  }
  for (int w : cfg_.dense_widths) {
    if (w < 1) throw std::invalid_argument("NetConfig: bad dense widths");
  }

  Rng rng(cfg_.init_seed);
  auto add = [&](const std::string& name, std::vector<int> shape,
                 int fan_in) {
    ParamTensor t;
    t.name = name;
    t.shape = std::move(shape);
    std::size_t n = numel(t.shape);
    t.w.resize(n);
    t.vel.assign(n, 0.0f);
    t.grad.assign(n, 0.0);
    if (fan_in > 0) {
      double limit = std::sqrt(6.0 / fan_in);
      for (auto& v : t.w) {
        v = static_cast<float>(rng.uniform_in(-limit, limit));
      }
    } else {
      for (auto& v : t.w) v = 0.0f;
    }
    params_.push_back(std::move(t));
  };

  int in_ch = 1;
  for (std::size_t l = 0; l < cfg_.conv_channels.size(); ++l) {
    int out_ch = cfg_.conv_channels[l];
    std::ostringstream name;
    name << "conv" << l;
    add(name.str() + ".weight", {out_ch, in_ch, cfg_.kernel},
        in_ch * cfg_.kernel);
    add(name.str() + ".bias", {out_ch}, 0);
    in_ch = out_ch;
  }
  int width = in_ch * cfg_.input_len;
  for (std::size_t d = 0; d < cfg_.dense_widths.size(); ++d) {
    int out = cfg_.dense_widths[d];
    std::ostringstream name;
    name << "dense" << d;
    add(name.str() + ".weight", {out, width}, width);
    add(name.str() + ".bias", {out}, 0);
    width = out;
  }
  add("head_p.weight", {cfg_.head_p_size, width}, width);
  add("head_p.bias", {cfg_.head_p_size}, 0);
  add("head_op.weight", {cfg_.head_op_size, width}, width);
  add("head_op.bias", {cfg_.head_op_size}, 0);
  add("value.weight", {1, width}, width);
  add("value.bias", {1}, 0);
  rng_state_ = rng.state();
}

void Network::forward(const std::array<double, 5>& x, Activations& act) const {
  const int len = cfg_.input_len;
  const int kern = cfg_.kernel;
  const int pad = padding_of(kern);
  const std::size_t conv_n = cfg_.conv_channels.size();
  const std::size_t dense_n = cfg_.dense_widths.size();

  act.conv_in.resize(conv_n + 1);
  act.conv_pre.resize(conv_n);
  act.conv_in[0].assign(x.begin(), x.begin() + len);

  std::size_t pi = 0;  // parameter cursor, matches construction order
  int in_ch = 1;
  for (std::size_t l = 0; l < conv_n; ++l) {
    const int out_ch = cfg_.conv_channels[l];
    const std::vector<float>& w = params_[pi].w;
    const std::vector<float>& b = params_[pi + 1].w;
    pi += 2;
    const std::vector<double>& in = act.conv_in[l];
    std::vector<double>& pre = act.conv_pre[l];
    pre.assign(static_cast<std::size_t>(out_ch) * len, 0.0);
    for (int oc = 0; oc < out_ch; ++oc) {
      for (int t = 0; t < len; ++t) {
        double sum = b[static_cast<std::size_t>(oc)];
        for (int ic = 0; ic < in_ch; ++ic) {
          for (int dk = 0; dk < kern; ++dk) {
            int u = t + dk - pad;
            if (u < 0 || u >= len) continue;
            sum += static_cast<double>(
                       w[(static_cast<std::size_t>(oc) * in_ch + ic) * kern +
                         dk]) *
                   in[static_cast<std::size_t>(ic) * len + u];
          }
        }
        pre[static_cast<std::size_t>(oc) * len + t] = sum;
      }
    }
    std::vector<double>& out = act.conv_in[l + 1];
    out.resize(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) out[i] = relu(pre[i]);
    in_ch = out_ch;
  }

  act.dense_in.resize(dense_n + 1);
  act.dense_pre.resize(dense_n);
  act.dense_in[0] = act.conv_in[conv_n];
  for (std::size_t d = 0; d < dense_n; ++d) {
    const std::vector<float>& w = params_[pi].w;
    const std::vector<float>& b = params_[pi + 1].w;
    const int out_n = params_[pi].shape[0];
    const int in_n = params_[pi].shape[1];
    pi += 2;
    const std::vector<double>& in = act.dense_in[d];
    std::vector<double>& pre = act.dense_pre[d];
    pre.resize(static_cast<std::size_t>(out_n));
    for (int o = 0; o < out_n; ++o) {
      double sum = b[static_cast<std::size_t>(o)];
      const std::size_t row = static_cast<std::size_t>(o) * in_n;
      for (int i = 0; i < in_n; ++i) {
        sum += static_cast<double>(w[row + i]) * in[static_cast<std::size_t>(i)];
      }
      pre[static_cast<std::size_t>(o)] = sum;
    }
    std::vector<double>& out = act.dense_in[d + 1];
    out.resize(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) out[i] = relu(pre[i]);
  }

  const std::vector<double>& trunk = act.dense_in[dense_n];
  auto head = [&](std::size_t wi, std::vector<double>& logits) {
    const std::vector<float>& w = params_[wi].w;
    const std::vector<float>& b = params_[wi + 1].w;
    const int out_n = params_[wi].shape[0];
    const int in_n = params_[wi].shape[1];
    logits.resize(static_cast<std::size_t>(out_n));
    for (int o = 0; o < out_n; ++o) {
      double sum = b[static_cast<std::size_t>(o)];
      const std::size_t row = static_cast<std::size_t>(o) * in_n;
      for (int i = 0; i < in_n; ++i) {
        sum += static_cast<double>(w[row + i]) *
               trunk[static_cast<std::size_t>(i)];
      }
      logits[static_cast<std::size_t>(o)] = sum;
    }
  };
  head(pi, act.logits_p);
  std::vector<double> value_out;
  head(pi + 2, act.logits_op);
  head(pi + 4, value_out);
  act.value_pre = value_out[0];
  act.value = std::tanh(act.value_pre);
}

PolicyValue Network::evaluate(const std::array<double, 5>& x) const {
  thread_local Activations act;
  forward(x, act);
  PolicyValue pv;
  pv.policy_p = softmax(act.logits_p).probs;
  SoftmaxResult op = softmax(act.logits_op);
  pv.policy_op = {op.probs[0], op.probs[1]};
  pv.value = act.value;
  return pv;
}

double Network::example_loss(const NetExample& ex) const {
  Activations act;
  forward(ex.input, act);
  double mse = (ex.z - act.value) * (ex.z - act.value);
  const std::vector<double>& logits = ex.p_head ? act.logits_p : act.logits_op;
  if (ex.pi.size() != logits.size()) {
    throw std::invalid_argument("example_loss: pi size mismatch");
  }
  SoftmaxResult sm = softmax(logits);
  double ce = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (ex.pi[i] != 0.0) ce += ex.pi[i] * (sm.log_z - logits[i]);
  }
  return mse + ce;
}

TrainStats Network::compute_gradients(const std::vector<NetExample>& batch) {
  if (batch.empty()) {
    throw std::invalid_argument("compute_gradients: empty batch");
  }
  for (ParamTensor& t : params_) {
    std::fill(t.grad.begin(), t.grad.end(), 0.0);
  }
  const int len = cfg_.input_len;
  const int kern = cfg_.kernel;
  const int pad = padding_of(kern);
  const std::size_t conv_n = cfg_.conv_channels.size();
  const std::size_t dense_n = cfg_.dense_widths.size();
  const std::size_t dense_base = 2 * conv_n;
  const std::size_t head_p_base = dense_base + 2 * dense_n;
  const std::size_t head_op_base = head_p_base + 2;
  const std::size_t value_base = head_op_base + 2;

  TrainStats stats;
  stats.examples = static_cast<int>(batch.size());
  Activations act;
  std::vector<double> delta_trunk, delta_in, delta_pre;

  for (const NetExample& ex : batch) {
    forward(ex.input, act);
    const std::vector<double>& trunk = act.dense_in[dense_n];

    double mse = (ex.z - act.value) * (ex.z - act.value);
    stats.value_mse += mse;

    delta_trunk.assign(trunk.size(), 0.0);

    // Value head: d/dpre [(z - tanh(pre))^2] = 2(V - z)(1 - V^2).
    double dvp = 2.0 * (act.value - ex.z) * (1.0 - act.value * act.value);
    {
      ParamTensor& vw = params_[value_base];
      ParamTensor& vb = params_[value_base + 1];
      for (std::size_t i = 0; i < trunk.size(); ++i) {
        vw.grad[i] += dvp * trunk[i];
        delta_trunk[i] += static_cast<double>(vw.w[i]) * dvp;
      }
      vb.grad[0] += dvp;
    }

    // Mover's policy head: d(CE)/dlogits = softmax - pi.
    {
      const std::vector<double>& logits =
          ex.p_head ? act.logits_p : act.logits_op;
      if (ex.pi.size() != logits.size()) {
        throw std::invalid_argument("compute_gradients: pi size mismatch");
      }
      SoftmaxResult sm = softmax(logits);
      double ce = 0.0;
      for (std::size_t i = 0; i < logits.size(); ++i) {
        if (ex.pi[i] != 0.0) ce += ex.pi[i] * (sm.log_z - logits[i]);
      }
      stats.policy_ce += ce;
      std::size_t base = ex.p_head ? head_p_base : head_op_base;
      ParamTensor& hw = params_[base];
      ParamTensor& hb = params_[base + 1];
      const int in_n = hw.shape[1];
      for (std::size_t o = 0; o < logits.size(); ++o) {
        double dl = sm.probs[o] - ex.pi[o];
        const std::size_t row = o * static_cast<std::size_t>(in_n);
        for (std::size_t i = 0; i < trunk.size(); ++i) {
          hw.grad[row + i] += dl * trunk[i];
          delta_trunk[i] += static_cast<double>(hw.w[row + i]) * dl;
        }
        hb.grad[o] += dl;
      }
    }

    // Dense trunk, top down.
    for (std::size_t d = dense_n; d-- > 0;) {
      ParamTensor& dw = params_[dense_base + 2 * d];
      ParamTensor& db = params_[dense_base + 2 * d + 1];
      const int out_n = dw.shape[0];
      const int in_n = dw.shape[1];
      const std::vector<double>& in = act.dense_in[d];
      delta_pre.resize(static_cast<std::size_t>(out_n));
      for (int o = 0; o < out_n; ++o) {
        double g = act.dense_pre[d][static_cast<std::size_t>(o)] > 0.0
                       ? delta_trunk[static_cast<std::size_t>(o)]
                       : 0.0;
        delta_pre[static_cast<std::size_t>(o)] = g;
        db.grad[static_cast<std::size_t>(o)] += g;
      }
      delta_in.assign(static_cast<std::size_t>(in_n), 0.0);
      for (int o = 0; o < out_n; ++o) {
        double g = delta_pre[static_cast<std::size_t>(o)];
        if (g == 0.0) continue;
        const std::size_t row = static_cast<std::size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) {
          dw.grad[row + i] += g * in[static_cast<std::size_t>(i)];
          delta_in[static_cast<std::size_t>(i)] +=
              static_cast<double>(dw.w[row + i]) * g;
        }
      }
      delta_trunk = delta_in;
    }

    // Conv stack, top down; delta_trunk currently holds d/d(flattened conv
    // output).
    for (std::size_t l = conv_n; l-- > 0;) {
      ParamTensor& cw = params_[2 * l];
      ParamTensor& cb = params_[2 * l + 1];
      const int out_ch = cw.shape[0];
      const int in_ch = cw.shape[1];
      const std::vector<double>& in = act.conv_in[l];
      delta_pre.resize(static_cast<std::size_t>(out_ch) * len);
      for (int oc = 0; oc < out_ch; ++oc) {
        for (int t = 0; t < len; ++t) {
          std::size_t idx = static_cast<std::size_t>(oc) * len + t;
          double g = act.conv_pre[l][idx] > 0.0 ? delta_trunk[idx] : 0.0;
          delta_pre[idx] = g;
          cb.grad[static_cast<std::size_t>(oc)] += g;
        }
      }
      delta_in.assign(static_cast<std::size_t>(in_ch) * len, 0.0);
      for (int oc = 0; oc < out_ch; ++oc) {
        for (int t = 0; t < len; ++t) {
          double g = delta_pre[static_cast<std::size_t>(oc) * len + t];
          if (g == 0.0) continue;
          for (int ic = 0; ic < in_ch; ++ic) {
            for (int dk = 0; dk < kern; ++dk) {
              int u = t + dk - pad;
              if (u < 0 || u >= len) continue;
              std::size_t widx =
                  (static_cast<std::size_t>(oc) * in_ch + ic) * kern + dk;
              cw.grad[widx] += g * in[static_cast<std::size_t>(ic) * len + u];
              delta_in[static_cast<std::size_t>(ic) * len + u] +=
                  static_cast<double>(cw.w[widx]) * g;
            }
          }
        }
      }
      delta_trunk = delta_in;
    }
  }

  double inv = 1.0 / static_cast<double>(batch.size());
  double norm_sq = 0.0;
  for (ParamTensor& t : params_) {
    for (double& g : t.grad) {
      g *= inv;
      norm_sq += g * g;
    }
  }
  stats.grad_norm = std::sqrt(norm_sq);
  stats.value_mse *= inv;
  stats.policy_ce *= inv;
  stats.loss = stats.value_mse + stats.policy_ce;
  if (!std::isfinite(stats.loss)) {
    std::ostringstream os;
    os << "train: non-finite loss (value_mse=" << stats.value_mse
       << ", policy_ce=" << stats.policy_ce << ")";
    throw std::runtime_error(os.str());
  }
  return stats;
}

TrainStats Network::train_batch(const std::vector<NetExample>& batch,
                                const TrainHyper& hyper) {
  TrainStats stats = compute_gradients(batch);
  for (ParamTensor& t : params_) {
    for (std::size_t i = 0; i < t.w.size(); ++i) {
      t.vel[i] = static_cast<float>(hyper.momentum * t.vel[i] + t.grad[i]);
      t.w[i] = static_cast<float>(t.w[i] - hyper.learning_rate * t.vel[i]);
    }
  }
  ++training_steps_;
  return stats;
}

void Network::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("checkpoint: cannot open for write: " + path);
  save(out);
  if (!out.good()) throw CheckpointError("checkpoint: write failed: " + path);
}

void Network::save(std::ostream& out) const {
  nlohmann::json header;
  header["config"] = {
      {"input_len", cfg_.input_len},
      {"conv_channels", cfg_.conv_channels},
      {"kernel", cfg_.kernel},
      {"dense_widths", cfg_.dense_widths},
      {"head_p_size", cfg_.head_p_size},
      {"head_op_size", cfg_.head_op_size},
      {"init_seed", cfg_.init_seed},
  };
  header["training_steps"] = training_steps_;
  header["rng_state"] = rng_state_;
  nlohmann::json tensors = nlohmann::json::array();
  for (const ParamTensor& t : params_) {
    tensors.push_back({{"name", t.name}, {"shape", t.shape}});
  }
  header["tensors"] = std::move(tensors);
  std::string head_str = header.dump();

  out.write(kMagic, sizeof(kMagic));
  std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  std::uint32_t head_len = static_cast<std::uint32_t>(head_str.size());
  out.write(reinterpret_cast<const char*>(&head_len), sizeof(head_len));
  out.write(head_str.data(), static_cast<std::streamsize>(head_str.size()));
  for (const ParamTensor& t : params_) {
    out.write(reinterpret_cast<const char*>(t.w.data()),
              static_cast<std::streamsize>(t.w.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(t.vel.data()),
              static_cast<std::streamsize>(t.vel.size() * sizeof(float)));
  }
}

Network Network::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open: " + path);
  return load(in);
}

Network Network::load(std::istream& in) {
  char magic[8] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("checkpoint: bad magic (corrupt or not a checkpoint)");
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in) throw CheckpointError("checkpoint: truncated version field");
  if (version != kVersion) {
    std::ostringstream os;
    os << "checkpoint: unsupported format version " << version << " (expected "
       << kVersion << ")";
    throw CheckpointVersionError(os.str());
  }
  std::uint32_t head_len = 0;
  in.read(reinterpret_cast<char*>(&head_len), sizeof(head_len));
  if (!in || head_len == 0 || head_len > (1u << 24)) {
    throw CheckpointError("checkpoint: bad header length");
  }
  std::string head_str(head_len, '\0');
  in.read(head_str.data(), head_len);
  if (!in) throw CheckpointError("checkpoint: truncated header");

  nlohmann::json header = nlohmann::json::parse(head_str, nullptr, false);
  if (header.is_discarded()) {
    throw CheckpointError("checkpoint: unparseable header");
  }
  NetConfig cfg;
  try {
    const nlohmann::json& c = header.at("config");
    cfg.input_len = c.at("input_len").get<int>();
    cfg.conv_channels = c.at("conv_channels").get<std::vector<int>>();
    cfg.kernel = c.at("kernel").get<int>();
    cfg.dense_widths = c.at("dense_widths").get<std::vector<int>>();
    cfg.head_p_size = c.at("head_p_size").get<int>();
    cfg.head_op_size = c.at("head_op_size").get<int>();
    cfg.init_seed = c.at("init_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: bad config header: ") +
                          e.what());
  }

  Network net(cfg);
  try {
    net.training_steps_ = header.at("training_steps").get<std::uint64_t>();
    net.rng_state_ = header.at("rng_state").get<std::uint64_t>();
    const nlohmann::json& tensors = header.at("tensors");
    if (tensors.size() != net.params_.size()) {
      throw CheckpointError("checkpoint: tensor count mismatch");
    }
    for (std::size_t i = 0; i < net.params_.size(); ++i) {
      if (tensors[i].at("name").get<std::string>() != net.params_[i].name ||
          tensors[i].at("shape").get<std::vector<int>>() !=
              net.params_[i].shape) {
        throw CheckpointError("checkpoint: tensor descriptor mismatch at " +
                              net.params_[i].name);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint: bad tensor header: ") +
                          e.what());
  }
  for (ParamTensor& t : net.params_) {
    in.read(reinterpret_cast<char*>(t.w.data()),
            static_cast<std::streamsize>(t.w.size() * sizeof(float)));
    in.read(reinterpret_cast<char*>(t.vel.data()),
            static_cast<std::streamsize>(t.vel.size() * sizeof(float)));
    if (!in) {
      throw CheckpointError("checkpoint: truncated weights at " + t.name);
    }
  }
  return net;
}

}  // namespace hsr
