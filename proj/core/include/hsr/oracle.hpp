#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hsr/game.hpp"

namespace hsr {

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solution table N(k,q): the largest candidate count solvable with k jars and
// q tests. Boundary rows are 1; interior follows the Pascal-style recurrence
// N(k,q) = N(k-1,q-1) + N(k,q-1), so rows are partial sums of binomials and
// N(k,q) = 2^q for k >= q.
class Triangle {
 public:
  Triangle(int max_k, int max_q);

  std::int64_t value(int k, int q) const;
  int max_k() const { return max_k_; }
  int max_q() const { return max_q_; }

  // Rows q, columns k.
  std::string pretty() const;

 private:
  int max_k_;
  int max_q_;
  std::vector<std::int64_t> table_;  // (max_q+1) x (max_k+1), row-major by q
};

// N(k,q) without building a table (closed-form partial binomial sum).
std::int64_t bernoulli(int k, int q);

enum class MoveJudgment : std::uint8_t { Correct, Incorrect, NoCorrectExists };

std::string to_string(MoveJudgment j);

bool claimer_wins(int k, int q, std::int64_t n);

struct TestRange {
  int lo = 1;
  int hi = 0;  // empty when hi < lo

  bool empty() const { return hi < lo; }
  bool contains(int m) const { return m >= lo && m <= hi; }
};

// Winning-preserving split points for the claimer at (k,q,n); empty when the
// claimer's position is already lost.
TestRange correct_tests(int k, int q, int n);

struct AnswerSet {
  bool jar_breaks = false;
  bool survives = false;

  bool empty() const { return !jar_breaks && !survives; }
  bool contains(ActionKind a) const {
    return a == ActionKind::Break ? jar_breaks : survives;
  }
};

// Answers that move the claimer into a losing position. Empty means the
// refuter is doomed: both successor positions keep the claim alive.
AnswerSet correct_answers(int k, int q, int n, int m);

struct DecisionSet {
  bool accept = false;
  bool reject = false;

  bool empty() const { return !accept && !reject; }
  bool contains(ActionKind a) const {
    return a == ActionKind::Accept ? accept : reject;
  }
};

// Accept wins iff n overshoots N(k0,q0), Reject wins iff it undershoots.
// At n = N(k0,q0) the decider is in a dilemma: both continuations lose.
DecisionSet correct_decision(int k0, int q0, int n);

// The unique winning proposal N(k0,q0). Throws when it exceeds n_max: the
// game configuration cannot express the optimum.
std::int64_t optimal_proposal(int k0, int q0,
                              std::int64_t n_max = INT64_MAX);

MoveJudgment classify_move(const MoveRecord& rec);

// Whether the player to move holds a winning position (closed-form, no
// search). Terminal states have no mover.
bool mover_wins(const GameState& s);

// A correct action when one exists (smallest split / Break before NotBreak /
// the unique correct proposal); deterministic first legal action otherwise.
Action optimal_action(const GameState& s);

struct MinimaxOptions {
  std::int64_t node_budget = 50'000'000;
};

// Exact winner by exhaustive recursion over legal_actions/apply, memoized on
// canonical states. Independent of the Triangle.
PlayerId minimax_value(const GameState& s, const MinimaxOptions& opts = {});

// Shared memo across many minimax_value calls (the full-sweep tests revisit
// the same positions from thousands of roots).
class MinimaxSolver {
 public:
  explicit MinimaxSolver(MinimaxOptions opts = {}) : opts_(opts) {}

  PlayerId winner(const GameState& s);
  std::size_t memo_size() const { return memo_.size(); }

 private:
  bool claimer_side_wins(const GameState& s);

  MinimaxOptions opts_;
  std::unordered_map<std::uint64_t, bool> memo_;
};

struct EnumerationResult {
  std::int64_t count = 0;
  // Canonical keys (claimer dropped), including RefuterAnswer and Terminal
  // states.
  std::unordered_set<std::uint64_t> states;
  std::int64_t claimer_test_states = 0;
  std::int64_t refuter_answer_states = 0;
  std::int64_t terminal_states = 0;
};

// Exhaustive reachable-state set of the refutation game rooted at (k,q,n).
EnumerationResult enumerate_states(int k, int q, int n,
                                   std::int64_t budget = 50'000'000);

}  // namespace hsr
