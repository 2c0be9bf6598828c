#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsr {

// Raw network output: full-size policy heads (before legality masking) and a
// mover-perspective scalar value.
struct PolicyValue {
  std::vector<double> policy_p;     // index = proposed n or test point m
  std::array<double, 2> policy_op;  // [Accept, Reject] or [Break, NotBreak]
  double value = 0.0;               // in (-1, 1)
};

struct NetConfig {
  int input_len = 5;
  std::vector<int> conv_channels{16, 16, 16, 16};
  int kernel = 3;  // odd; same-length padding
  std::vector<int> dense_widths{64, 64};
  int head_p_size = 0;  // n_max + 1; index 0 is never a legal action
  int head_op_size = 2;
  std::uint64_t init_seed = 1;

  bool operator==(const NetConfig&) const = default;
};

struct TrainHyper {
  double learning_rate = 1e-2;
  double momentum = 0.9;
};

struct TrainStats {
  double loss = 0.0;  // mean per-example total loss
  double value_mse = 0.0;
  double policy_ce = 0.0;
  double grad_norm = 0.0;  // L2 norm over all parameter gradients
  int examples = 0;
};

// One supervised target: which policy head the mover used, the full
// head-space distribution, and the final outcome from the mover's side.
struct NetExample {
  std::array<double, 5> input{};
  bool p_head = true;
  std::vector<double> pi;
  double z = 0.0;
};

struct ParamTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<float> w;     // master weights
  std::vector<float> vel;   // SGD momentum buffer
  std::vector<double> grad; // scratch, filled by compute_gradients
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckpointVersionError : CheckpointError {
  using CheckpointError::CheckpointError;
};

// Fixed-architecture policy-value net: conv1d stack over the length-5 input
// signal, dense trunk, two policy heads plus a tanh value head. Parameters
// are float32 (portable checkpoints, bit-exact round trips); all arithmetic
// runs in double.
class Network {
 public:
  explicit Network(const NetConfig& cfg);

  const NetConfig& config() const { return cfg_; }

  PolicyValue evaluate(const std::array<double, 5>& x) const;

  // Loss of one example under current weights: (z - V)^2 + cross-entropy of
  // the mover's policy head.
  double example_loss(const NetExample& ex) const;

  // Mean-loss gradients over the batch, written into each tensor's grad.
  TrainStats compute_gradients(const std::vector<NetExample>& batch);

  // compute_gradients followed by one SGD-with-momentum step.
  TrainStats train_batch(const std::vector<NetExample>& batch,
                         const TrainHyper& hyper);

  std::vector<ParamTensor>& tensors() { return params_; }
  const std::vector<ParamTensor>& tensors() const { return params_; }

  std::uint64_t training_steps() const { return training_steps_; }
  std::uint64_t rng_state() const { return rng_state_; }

  void save(const std::string& path) const;
  void save(std::ostream& out) const;
  static Network load(const std::string& path);
  static Network load(std::istream& in);

 private:
  struct Activations;
  void forward(const std::array<double, 5>& x, Activations& act) const;

  NetConfig cfg_;
  std::vector<ParamTensor> params_;
  std::uint64_t training_steps_ = 0;
  std::uint64_t rng_state_ = 0;
};

}  // namespace hsr
