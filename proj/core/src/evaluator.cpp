#include "hsr/evaluator.hpp"

#include <stdexcept>

#include "hsr/oracle.hpp"

namespace hsr {

bool uses_p_head(Phase phase) {
  switch (phase) {
    case Phase::Proposal:
    case Phase::ClaimerTest:
      return true;
    case Phase::Decision:
    case Phase::RefuterAnswer:
      return false;
    case Phase::Terminal:
      break;
  }
  throw std::invalid_argument("uses_p_head: terminal phase has no mover");
}

int head_index(const Action& a) {
  switch (a.kind) {
    case ActionKind::Propose:
    case ActionKind::Test:
      return a.value;
    case ActionKind::Accept:
    case ActionKind::Break:
      return 0;
    case ActionKind::Reject:
    case ActionKind::NotBreak:
      return 1;
  }
  throw std::invalid_argument("head_index: unknown action kind");
}

int head_size(Phase phase, int head_p_size) {
  return uses_p_head(phase) ? head_p_size : 2;
}

std::array<double, 5> InputScale::normalize(const EncodedState& e) const {
  if (k0 < 1 || q0 < 1 || n_max < 1) {
    throw std::invalid_argument("InputScale: bad normalization constants");
  }
  double denom = static_cast<double>(n_max + 1);
  return {static_cast<double>(e.k) / k0, static_cast<double>(e.q) / q0,
          static_cast<double>(e.n) / denom, static_cast<double>(e.m) / denom,
          static_cast<double>(e.r)};
}

PolicyValue UniformEvaluator::evaluate(const GameState& s) const {
  (void)s;
  PolicyValue pv;
  pv.policy_p.assign(static_cast<std::size_t>(head_p_size_),
                     1.0 / head_p_size_);
  pv.policy_op = {0.5, 0.5};
  pv.value = 0.0;
  return pv;
}

PolicyValue OracleEvaluator::evaluate(const GameState& s) const {
  if (s.phase == Phase::Terminal) {
    throw std::invalid_argument("OracleEvaluator: terminal state");
  }
  PolicyValue pv;
  pv.policy_p.assign(static_cast<std::size_t>(head_p_size_), 0.0);
  pv.policy_op = {0.0, 0.0};
  Action best = optimal_action(s);
  int idx = head_index(best);
  if (uses_p_head(s.phase)) {
    if (idx < 0 || idx >= head_p_size_) {
      throw std::out_of_range("OracleEvaluator: action outside P head");
    }
    pv.policy_p[static_cast<std::size_t>(idx)] = 1.0;
    pv.policy_op = {0.5, 0.5};
  } else {
    pv.policy_op[static_cast<std::size_t>(idx)] = 1.0;
    double u = 1.0 / head_p_size_;
    for (auto& v : pv.policy_p) v = u;
  }
  pv.value = mover_wins(s) ? 1.0 : -1.0;
  return pv;
}

PolicyValue NetworkPairEvaluator::evaluate(const GameState& s) const {
  const Network* net = nullptr;
  switch (s.phase) {
    case Phase::Proposal:
    case Phase::Decision:
      net = proposal_;
      break;
    case Phase::ClaimerTest:
    case Phase::RefuterAnswer:
      net = refutation_;
      break;
    case Phase::Terminal:
      throw std::invalid_argument("NetworkPairEvaluator: terminal state");
  }
  if (net == nullptr) {
    throw std::logic_error("NetworkPairEvaluator: missing network for phase");
  }
  return net->evaluate(scale_.normalize(encode(s)));
}

}  // namespace hsr
