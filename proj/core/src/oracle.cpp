#include "hsr/oracle.hpp"

#include <algorithm>
#include <deque>
#include <iomanip>
#include <sstream>

namespace hsr {

namespace {

std::int64_t checked_bernoulli(int k, int q, bool& overflowed) {
  overflowed = false;
  try {
    return bernoulli(k, q);
  } catch (const std::overflow_error&) {
    overflowed = true;
    return INT64_MAX;
  }
}

}  // namespace

Triangle::Triangle(int max_k, int max_q) : max_k_(max_k), max_q_(max_q) {
  if (max_k < 0 || max_q < 0) {
    throw std::invalid_argument("Triangle: negative dimensions");
  }
  if (max_q > 62) {
    throw std::overflow_error("Triangle: rows beyond q=62 overflow int64");
  }
  table_.assign(static_cast<std::size_t>(max_q_ + 1) * (max_k_ + 1), 0);
  for (int q = 0; q <= max_q_; ++q) {
    for (int k = 0; k <= max_k_; ++k) {
      std::int64_t v = 0;
      if (k == 0 || q == 0) {
        v = 1;
      } else {
        v = table_[static_cast<std::size_t>(q - 1) * (max_k_ + 1) + (k - 1)] +
            table_[static_cast<std::size_t>(q - 1) * (max_k_ + 1) + k];
      }
      table_[static_cast<std::size_t>(q) * (max_k_ + 1) + k] = v;
    }
  }
}

std::int64_t Triangle::value(int k, int q) const {
  if (k < 0 || q < 0 || k > max_k_ || q > max_q_) {
    std::ostringstream os;
    os << "Triangle::value: (" << k << "," << q << ") outside table "
       << max_k_ << "x" << max_q_;
    throw std::out_of_range(os.str());
  }
  return table_[static_cast<std::size_t>(q) * (max_k_ + 1) + k];
}

std::string Triangle::pretty() const {
  std::size_t width = 1;
  for (std::int64_t v : table_) {
    width = std::max(width, std::to_string(v).size());
  }
  std::ostringstream os;
  os << "q\\k";
  for (int k = 0; k <= max_k_; ++k) {
    os << ' ' << std::setw(static_cast<int>(width)) << k;
  }
  os << '\n';
  for (int q = 0; q <= max_q_; ++q) {
    os << std::setw(3) << q;
    for (int k = 0; k <= max_k_; ++k) {
      os << ' ' << std::setw(static_cast<int>(width)) << value(k, q);
    }
    os << '\n';
  }
  return os.str();
}

std::int64_t bernoulli(int k, int q) {
  if (k < 0 || q < 0) {
    std::ostringstream os;
    os << "bernoulli: negative arguments (" << k << "," << q << ")";
    throw std::invalid_argument(os.str());
  }
  if (q > 62) {
    throw std::overflow_error("bernoulli: q > 62 overflows int64");
  }
  if (k >= q) return std::int64_t{1} << q;
  // Partial binomial sum: sum_{i=0}^{k} C(q,i).
  std::int64_t sum = 0;
  std::int64_t c = 1;  // C(q,0)
  for (int i = 0;; ++i) {
    sum += c;
    if (i == k) break;
    c = static_cast<std::int64_t>(static_cast<__int128>(c) * (q - i) /
                                  (i + 1));
  }
  return sum;
}

std::string to_string(MoveJudgment j) {
  switch (j) {
    case MoveJudgment::Correct: return "correct";
    case MoveJudgment::Incorrect: return "incorrect";
    case MoveJudgment::NoCorrectExists: return "no_correct_exists";
  }
  return "?";
}

bool claimer_wins(int k, int q, std::int64_t n) {
  if (k < 0 || q < 0 || n < 1) {
    std::ostringstream os;
    os << "claimer_wins: bad state (" << k << "," << q << "," << n << ")";
    throw std::invalid_argument(os.str());
  }
  bool overflowed = false;
  std::int64_t cap = checked_bernoulli(k, q, overflowed);
  return overflowed || n <= cap;
}

TestRange correct_tests(int k, int q, int n) {
  if (k < 1 || q < 1 || n < 2) {
    std::ostringstream os;
    os << "correct_tests: not a test position (" << k << "," << q << "," << n
       << ")";
    throw std::invalid_argument(os.str());
  }
  if (!claimer_wins(k, q, n)) return TestRange{1, 0};
  bool of_hi = false;
  bool of_lo = false;
  std::int64_t break_cap = checked_bernoulli(k - 1, q - 1, of_hi);
  std::int64_t survive_cap = checked_bernoulli(k, q - 1, of_lo);
  std::int64_t lo = of_lo ? 1 : std::max<std::int64_t>(1, n - survive_cap);
  std::int64_t hi = of_hi ? n - 1 : std::min<std::int64_t>(n - 1, break_cap);
  return TestRange{static_cast<int>(lo), static_cast<int>(hi)};
}

AnswerSet correct_answers(int k, int q, int n, int m) {
  if (k < 1 || q < 1 || n < 2 || m < 1 || m > n - 1) {
    std::ostringstream os;
    os << "correct_answers: not an answer position (" << k << "," << q << ","
       << n << "," << m << ")";
    throw std::invalid_argument(os.str());
  }
  bool of_b = false;
  bool of_s = false;
  std::int64_t break_cap = checked_bernoulli(k - 1, q - 1, of_b);
  std::int64_t survive_cap = checked_bernoulli(k, q - 1, of_s);
  AnswerSet set;
  set.jar_breaks = !of_b && m > break_cap;
  set.survives = !of_s && (n - m) > survive_cap;
  return set;
}

DecisionSet correct_decision(int k0, int q0, int n) {
  if (k0 < 0 || q0 < 0 || n < 1) {
    std::ostringstream os;
    os << "correct_decision: bad state (" << k0 << "," << q0 << "," << n
       << ")";
    throw std::invalid_argument(os.str());
  }
  bool overflowed = false;
  std::int64_t cap = checked_bernoulli(k0, q0, overflowed);
  DecisionSet set;
  if (overflowed) {
    set.reject = true;  // n is finite, so it undershoots
    return set;
  }
  set.accept = n > cap;
  set.reject = n < cap;
  return set;
}

std::int64_t optimal_proposal(int k0, int q0, std::int64_t n_max) {
  bool overflowed = false;
  std::int64_t v = checked_bernoulli(k0, q0, overflowed);
  if (overflowed || v > n_max) {
    std::ostringstream os;
    os << "optimal_proposal: N(" << k0 << "," << q0
       << ") exceeds the proposal bound " << n_max;
    throw std::domain_error(os.str());
  }
  return v;
}

MoveJudgment classify_move(const MoveRecord& rec) {
  const GameState& s = rec.state_before;
  if (!is_legal(s, rec.action)) {
    throw std::invalid_argument("classify_move: illegal action for state " +
                                to_string(s));
  }
  if (rec.actor != mover(s)) {
    throw std::invalid_argument("classify_move: actor is not the mover in " +
                                to_string(s));
  }
  switch (s.phase) {
    case Phase::Proposal: {
      bool overflowed = false;
      std::int64_t target = checked_bernoulli(s.k, s.q, overflowed);
      if (overflowed || target > s.n_max) return MoveJudgment::NoCorrectExists;
      return rec.action.value == target ? MoveJudgment::Correct
                                        : MoveJudgment::Incorrect;
    }
    case Phase::Decision: {
      DecisionSet set = correct_decision(s.k, s.q, s.n);
      if (set.empty()) return MoveJudgment::NoCorrectExists;
      return set.contains(rec.action.kind) ? MoveJudgment::Correct
                                           : MoveJudgment::Incorrect;
    }
    case Phase::ClaimerTest: {
      TestRange range = correct_tests(s.k, s.q, s.n);
      if (range.empty()) return MoveJudgment::NoCorrectExists;
      return range.contains(rec.action.value) ? MoveJudgment::Correct
                                              : MoveJudgment::Incorrect;
    }
    case Phase::RefuterAnswer: {
      AnswerSet set = correct_answers(s.k, s.q, s.n, s.m);
      if (set.empty()) return MoveJudgment::NoCorrectExists;
      return set.contains(rec.action.kind) ? MoveJudgment::Correct
                                           : MoveJudgment::Incorrect;
    }
    case Phase::Terminal:
      break;
  }
  throw std::invalid_argument("classify_move: terminal state has no moves");
}

bool mover_wins(const GameState& s) {
  switch (s.phase) {
    case Phase::Proposal: {
      bool overflowed = false;
      std::int64_t target = checked_bernoulli(s.k, s.q, overflowed);
      return !overflowed && target <= s.n_max;
    }
    case Phase::Decision: {
      return !correct_decision(s.k, s.q, s.n).empty();
    }
    case Phase::ClaimerTest:
      return claimer_wins(s.k, s.q, s.n);
    case Phase::RefuterAnswer:
      return !correct_answers(s.k, s.q, s.n, s.m).empty();
    case Phase::Terminal:
      break;
  }
  throw std::invalid_argument("mover_wins: terminal state has no mover");
}

Action optimal_action(const GameState& s) {
  switch (s.phase) {
    case Phase::Proposal: {
      bool overflowed = false;
      std::int64_t target = checked_bernoulli(s.k, s.q, overflowed);
      if (!overflowed && target <= s.n_max) {
        return Action::propose(static_cast<int>(target));
      }
      return Action::propose(1);  // doomed: any proposal loses
    }
    case Phase::Decision: {
      DecisionSet set = correct_decision(s.k, s.q, s.n);
      if (set.accept) return Action::accept();
      if (set.reject) return Action::reject();
      return Action::accept();  // dilemma: both choices lose
    }
    case Phase::ClaimerTest: {
      TestRange range = correct_tests(s.k, s.q, s.n);
      if (!range.empty()) return Action::test(range.lo);
      return Action::test(1);  // doomed
    }
    case Phase::RefuterAnswer: {
      AnswerSet set = correct_answers(s.k, s.q, s.n, s.m);
      if (set.jar_breaks) return Action::jar_breaks();
      if (set.survives) return Action::jar_survives();
      return Action::jar_breaks();  // doomed
    }
    case Phase::Terminal:
      break;
  }
  throw std::invalid_argument("optimal_action: terminal state has no moves");
}

PlayerId MinimaxSolver::winner(const GameState& s) {
  if (s.phase == Phase::Terminal) return *s.winner;
  bool cw = claimer_side_wins(s);
  return cw ? s.claimer : opponent(s.claimer);
}

bool MinimaxSolver::claimer_side_wins(const GameState& s) {
  if (static_cast<std::int64_t>(memo_.size()) >= opts_.node_budget) {
    throw BudgetExceeded("minimax: node budget exhausted");
  }
  // Whether the claimer side wins depends only on the position, not on which
  // player holds the claim, so memoize on claimer-dropped keys. Proposal
  // values additionally depend on the proposal bound; they only occur at the
  // root, so recompute them instead of memoizing.
  const bool memoizable = s.phase != Phase::Proposal;
  std::uint64_t key = 0;
  if (memoizable) {
    key = state_key(s, /*with_claimer=*/false);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  PlayerId m = mover(s);
  bool mover_wins = false;
  for (const Action& a : legal_actions(s)) {
    GameState t = apply(s, a);
    if (winner(t) == m) {
      mover_wins = true;
      break;
    }
  }
  bool cw = (m == s.claimer) ? mover_wins : !mover_wins;
  if (memoizable) memo_.emplace(key, cw);
  return cw;
}

PlayerId minimax_value(const GameState& s, const MinimaxOptions& opts) {
  MinimaxSolver solver(opts);
  return solver.winner(s);
}

EnumerationResult enumerate_states(int k, int q, int n, std::int64_t budget) {
  EnumerationResult result;
  GameState root = refutation_state(k, q, n, PlayerId::First);
  std::deque<GameState> frontier;
  auto visit = [&](const GameState& s) {
    std::uint64_t key = state_key(s, /*with_claimer=*/false);
    if (!result.states.insert(key).second) return;
    if (static_cast<std::int64_t>(result.states.size()) > budget) {
      throw BudgetExceeded("enumerate_states: state budget exhausted");
    }
    switch (s.phase) {
      case Phase::ClaimerTest: ++result.claimer_test_states; break;
      case Phase::RefuterAnswer: ++result.refuter_answer_states; break;
      case Phase::Terminal: ++result.terminal_states; break;
      default: break;
    }
    if (s.phase != Phase::Terminal) frontier.push_back(s);
  };
  visit(root);
  while (!frontier.empty()) {
    GameState s = frontier.front();
    frontier.pop_front();
    for (const Action& a : legal_actions(s)) {
      visit(apply(s, a));
    }
  }
  result.count = static_cast<std::int64_t>(result.states.size());
  return result;
}

}  // namespace hsr
