#pragma once

#include <array>
#include <memory>

#include "hsr/game.hpp"
#include "hsr/network.hpp"

namespace hsr {

// Which policy head serves a phase: the claimer's head (Propose/Test logits)
// or the responder's binary head (Accept/Reject, Break/NotBreak).
bool uses_p_head(Phase phase);

// Index of an action inside its policy head.
int head_index(const Action& a);

// Position of a state's policy head given the configured head sizes.
int head_size(Phase phase, int head_p_size);

// Normalization constants shared by both networks: features are
// (k/k0, q/q0, n/(n_max+1), m/(n_max+1), r).
struct InputScale {
  int k0 = 1;
  int q0 = 1;
  std::int64_t n_max = 1;

  std::array<double, 5> normalize(const EncodedState& e) const;
};

class Evaluator {
 public:
  virtual ~Evaluator() = default;
  // Raw full-size heads plus mover-perspective value; legality masking is
  // the search's job. Must be safe to call concurrently.
  virtual PolicyValue evaluate(const GameState& s) const = 0;
};

// Flat priors, zero value: the no-knowledge baseline.
class UniformEvaluator : public Evaluator {
 public:
  explicit UniformEvaluator(int head_p_size) : head_p_size_(head_p_size) {}
  PolicyValue evaluate(const GameState& s) const override;

 private:
  int head_p_size_;
};

// Ground-truth test double: one-hot prior on an optimal action, value +1/-1
// from exact win/loss analysis.
class OracleEvaluator : public Evaluator {
 public:
  explicit OracleEvaluator(int head_p_size) : head_p_size_(head_p_size) {}
  PolicyValue evaluate(const GameState& s) const override;

 private:
  int head_p_size_;
};

// Two trained networks: one serves the proposal/decision phases, the other
// the refutation phases.
class NetworkPairEvaluator : public Evaluator {
 public:
  NetworkPairEvaluator(const Network* proposal, const Network* refutation,
                       InputScale scale)
      : proposal_(proposal), refutation_(refutation), scale_(scale) {}

  PolicyValue evaluate(const GameState& s) const override;

  const Network* proposal_net() const { return proposal_; }
  const Network* refutation_net() const { return refutation_; }
  const InputScale& scale() const { return scale_; }

 private:
  const Network* proposal_;
  const Network* refutation_;
  InputScale scale_;
};

}  // namespace hsr
