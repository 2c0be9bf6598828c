#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <stdexcept>

#include "doctest.h"
#include "hsr/game.hpp"
#include "hsr/oracle.hpp"

using namespace hsr;

TEST_CASE("solution triangle: boundary, recurrence, closed form") {
  Triangle t(12, 12);
  for (int k = 0; k <= 12; ++k) CHECK(t.value(k, 0) == 1);
  for (int q = 0; q <= 12; ++q) CHECK(t.value(0, q) == 1);
  for (int k = 1; k <= 12; ++k) {
    for (int q = 1; q <= 12; ++q) {
      CHECK(t.value(k, q) == t.value(k - 1, q - 1) + t.value(k, q - 1));
      CHECK(t.value(k, q) == bernoulli(k, q));
    }
  }
  // With at least as many jars as tests, every outcome tree is binary.
  for (int q = 0; q <= 12; ++q) {
    CHECK(t.value(12, q) == (std::int64_t{1} << q));
    CHECK(t.value(q, q) == (std::int64_t{1} << q));
  }
}

TEST_CASE("triangle spot values") {
  CHECK(bernoulli(7, 7) == 128);
  CHECK(bernoulli(3, 7) == 64);
  CHECK(bernoulli(2, 6) == 22);
  CHECK(bernoulli(2, 3) == 7);
  CHECK(bernoulli(2, 2) == 4);
  CHECK(bernoulli(6, 6) == 64);
  CHECK(bernoulli(1, 5) == 6);
  CHECK(bernoulli(2, 5) == 16);
  CHECK(bernoulli(1, 1) == 2);
  CHECK(bernoulli(4, 7) == 99);
  CHECK(bernoulli(2, 7) == 29);
  // One jar forces linear scanning: q tests distinguish q + 1 candidates.
  for (int q = 0; q <= 20; ++q) CHECK(bernoulli(1, q) == q + 1);
}

TEST_CASE("triangle edge behavior") {
  CHECK_THROWS_AS(Triangle(-1, 3), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli(-1, 3), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli(2, 63), std::overflow_error);
  Triangle t(3, 3);
  CHECK_THROWS_AS(t.value(4, 1), std::out_of_range);
  // Large-but-safe values stay exact.
  CHECK(bernoulli(62, 62) == (std::int64_t{1} << 62));
  CHECK(bernoulli(1, 62) == 63);
}

TEST_CASE("pretty triangle lists rows by tests") {
  Triangle t(7, 7);
  std::string text = t.pretty();
  CHECK(text.find("128") != std::string::npos);
  CHECK(text.find("127") != std::string::npos);
  CHECK(text.find("22") != std::string::npos);
}

TEST_CASE("claimer_wins is the n <= N(k,q) threshold") {
  CHECK(claimer_wins(7, 7, 128));
  CHECK_FALSE(claimer_wins(7, 7, 129));
  CHECK(claimer_wins(2, 6, 22));
  CHECK_FALSE(claimer_wins(2, 6, 23));
  CHECK_FALSE(claimer_wins(2, 2, 5));
  CHECK(claimer_wins(2, 2, 4));
  CHECK(claimer_wins(0, 0, 1));
  CHECK_FALSE(claimer_wins(0, 5, 2));
  CHECK_FALSE(claimer_wins(5, 0, 2));
  CHECK(claimer_wins(1, 62, 63));
}

TEST_CASE("correct_tests: winning window, singletons at the boundary") {
  TestRange r = correct_tests(7, 7, 128);
  CHECK(r.lo == 64);
  CHECK(r.hi == 64);
  CHECK(r.contains(64));
  CHECK_FALSE(r.contains(63));
  CHECK_FALSE(r.empty());

  r = correct_tests(3, 7, 64);
  CHECK(r.lo == 22);
  CHECK(r.hi == 22);

  r = correct_tests(2, 6, 22);
  CHECK(r.lo == 6);
  CHECK(r.hi == 6);

  r = correct_tests(1, 1, 2);
  CHECK(r.lo == 1);
  CHECK(r.hi == 1);

  // Off-boundary instances have slack: n = 20 with (2,6).
  r = correct_tests(2, 6, 20);
  CHECK(r.lo == 4);  // n - N(2,5) = 20 - 16
  CHECK(r.hi == 6);  // N(1,5)

  // Losing positions have no correct test.
  CHECK(correct_tests(2, 2, 5).empty());
  CHECK(correct_tests(7, 7, 129).empty());

  CHECK_THROWS_AS(correct_tests(1, 1, 1), std::invalid_argument);
}

TEST_CASE("correct_answers: answers that doom the claim") {
  AnswerSet s = correct_answers(2, 2, 5, 2);
  CHECK_FALSE(s.jar_breaks);  // Break leaves (1,1,2), still winnable
  CHECK(s.survives);          // NotBreak leaves (2,1,3) > N(2,1)=2
  CHECK(s.contains(ActionKind::NotBreak));
  CHECK_FALSE(s.contains(ActionKind::Break));

  // Boundary position split optimally: the refuter is doomed.
  CHECK(correct_answers(7, 7, 128, 64).empty());
  CHECK(correct_answers(2, 6, 22, 6).empty());

  // A bad split hands the refuter both answers or one.
  AnswerSet t = correct_answers(7, 7, 128, 65);
  CHECK(t.jar_breaks);  // 65 > N(6,6)=64
  CHECK_FALSE(t.survives);

  AnswerSet u = correct_answers(2, 6, 22, 10);
  CHECK(u.jar_breaks);  // 10 > N(1,5)=6
  CHECK_FALSE(u.survives);

  CHECK_THROWS_AS(correct_answers(2, 2, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(correct_answers(2, 2, 5, 0), std::invalid_argument);
}

TEST_CASE("correct_decision: accept overshoots, reject undershoots") {
  DecisionSet d = correct_decision(2, 3, 8);
  CHECK(d.accept);
  CHECK_FALSE(d.reject);

  d = correct_decision(2, 3, 6);
  CHECK_FALSE(d.accept);
  CHECK(d.reject);

  // Exactly N: the decider's dilemma; both continuations lose.
  d = correct_decision(2, 3, 7);
  CHECK(d.empty());
  CHECK_FALSE(d.contains(ActionKind::Accept));
  CHECK_FALSE(d.contains(ActionKind::Reject));

  CHECK(correct_decision(7, 7, 129).accept);
  CHECK(correct_decision(7, 7, 127).reject);
  CHECK(correct_decision(7, 7, 128).empty());
}

TEST_CASE("optimal_proposal is N(k0,q0), bounded by n_max") {
  CHECK(optimal_proposal(2, 3) == 7);
  CHECK(optimal_proposal(7, 7) == 128);
  CHECK(optimal_proposal(2, 3, 10) == 7);
  CHECK_THROWS_AS(optimal_proposal(2, 3, 6), std::domain_error);
  CHECK_THROWS_AS(optimal_proposal(7, 7, 100), std::domain_error);
}

TEST_CASE("classify_move across phases") {
  GameState prop = initial_state(2, 3, 10);
  auto judge = [](const GameState& s, Action a) {
    return classify_move({s, mover(s), role_of(s, mover(s)), a});
  };

  CHECK(judge(prop, Action::propose(7)) == MoveJudgment::Correct);
  CHECK(judge(prop, Action::propose(6)) == MoveJudgment::Incorrect);
  CHECK(judge(prop, Action::propose(8)) == MoveJudgment::Incorrect);

  GameState dec_low = apply(prop, Action::propose(6));
  CHECK(judge(dec_low, Action::reject()) == MoveJudgment::Correct);
  CHECK(judge(dec_low, Action::accept()) == MoveJudgment::Incorrect);

  GameState dec_high = apply(prop, Action::propose(8));
  CHECK(judge(dec_high, Action::accept()) == MoveJudgment::Correct);
  CHECK(judge(dec_high, Action::reject()) == MoveJudgment::Incorrect);

  GameState dec_exact = apply(prop, Action::propose(7));
  CHECK(judge(dec_exact, Action::accept()) == MoveJudgment::NoCorrectExists);
  CHECK(judge(dec_exact, Action::reject()) == MoveJudgment::NoCorrectExists);

  GameState test = refutation_state(7, 7, 128, PlayerId::First);
  CHECK(judge(test, Action::test(64)) == MoveJudgment::Correct);
  CHECK(judge(test, Action::test(63)) == MoveJudgment::Incorrect);
  CHECK(judge(test, Action::test(65)) == MoveJudgment::Incorrect);

  GameState doomed = refutation_state(2, 2, 5, PlayerId::First);
  CHECK(judge(doomed, Action::test(1)) == MoveJudgment::NoCorrectExists);
  CHECK(judge(doomed, Action::test(4)) == MoveJudgment::NoCorrectExists);

  GameState pending = apply(doomed, Action::test(2));
  CHECK(judge(pending, Action::jar_survives()) == MoveJudgment::Correct);
  CHECK(judge(pending, Action::jar_breaks()) == MoveJudgment::Incorrect);

  // Optimal boundary split: the refuter has no correct answer left.
  GameState boundary = apply(test, Action::test(64));
  CHECK(judge(boundary, Action::jar_breaks()) ==
        MoveJudgment::NoCorrectExists);
  CHECK(judge(boundary, Action::jar_survives()) ==
        MoveJudgment::NoCorrectExists);
}

TEST_CASE("classify_move validates the record") {
  GameState test = refutation_state(2, 6, 22, PlayerId::First);
  // Wrong actor.
  CHECK_THROWS_AS(
      classify_move({test, PlayerId::Second, Role::OP, Action::test(6)}),
      std::invalid_argument);
  // Illegal action.
  CHECK_THROWS_AS(
      classify_move({test, PlayerId::First, Role::P, Action::test(22)}),
      std::invalid_argument);
  GameState done = refutation_state(1, 1, 1, PlayerId::First);
  CHECK_THROWS_AS(
      classify_move({done, PlayerId::First, Role::P, Action::test(1)}),
      std::invalid_argument);
}

TEST_CASE("mover_wins by phase") {
  CHECK(mover_wins(initial_state(2, 3, 10)));        // 7 is proposable
  CHECK_FALSE(mover_wins(initial_state(2, 3, 6)));   // optimum out of range

  GameState dec_low = apply(initial_state(2, 3, 10), Action::propose(6));
  CHECK(mover_wins(dec_low));  // reject wins
  GameState dec_exact = apply(initial_state(2, 3, 10), Action::propose(7));
  CHECK_FALSE(mover_wins(dec_exact));  // dilemma

  CHECK(mover_wins(refutation_state(7, 7, 128, PlayerId::First)));
  CHECK_FALSE(mover_wins(refutation_state(7, 7, 129, PlayerId::First)));

  GameState pending =
      apply(refutation_state(2, 2, 5, PlayerId::First), Action::test(2));
  CHECK(mover_wins(pending));  // refuter moves and holds NotBreak
  GameState doomed_ref =
      apply(refutation_state(7, 7, 128, PlayerId::First), Action::test(64));
  CHECK_FALSE(mover_wins(doomed_ref));
}

TEST_CASE("optimal_action plays a correct move whenever one exists") {
  CHECK(optimal_action(refutation_state(7, 7, 128, PlayerId::First)) ==
        Action::test(64));
  CHECK(optimal_action(refutation_state(2, 6, 22, PlayerId::First)) ==
        Action::test(6));
  CHECK(optimal_action(initial_state(2, 3, 10)) == Action::propose(7));

  GameState dec_low = apply(initial_state(2, 3, 10), Action::propose(6));
  CHECK(optimal_action(dec_low) == Action::reject());
  GameState dec_high = apply(initial_state(2, 3, 10), Action::propose(8));
  CHECK(optimal_action(dec_high) == Action::accept());

  GameState pending =
      apply(refutation_state(2, 2, 5, PlayerId::First), Action::test(2));
  CHECK(optimal_action(pending) == Action::jar_survives());

  // Doomed states still return a legal action.
  GameState doomed = refutation_state(2, 2, 5, PlayerId::First);
  CHECK(is_legal(doomed, optimal_action(doomed)));
  GameState dec_exact = apply(initial_state(2, 3, 10), Action::propose(7));
  CHECK(is_legal(dec_exact, optimal_action(dec_exact)));

  CHECK_THROWS_AS(optimal_action(refutation_state(1, 1, 1, PlayerId::First)),
                  std::invalid_argument);
}

TEST_CASE("minimax agrees with the closed form on a small sweep") {
  MinimaxSolver solver;
  for (int k = 0; k <= 2; ++k) {
    for (int q = 0; q <= 4; ++q) {
      std::int64_t cap = bernoulli(k, q) + 3;
      for (std::int64_t n = 1; n <= cap; ++n) {
        GameState root =
            refutation_state(k, q, static_cast<int>(n), PlayerId::First);
        PlayerId winner = root.is_terminal() ? *root.winner
                                             : solver.winner(root);
        bool claimer_won = (winner == PlayerId::First);
        CHECK_MESSAGE(claimer_won == claimer_wins(k, q, n),
                      "k=", k, " q=", q, " n=", n);
      }
    }
  }
  CHECK(solver.memo_size() > 0);
}

TEST_CASE("minimax handles the complete game and respects claimer identity") {
  CHECK(minimax_value(initial_state(2, 3, 10)) == PlayerId::First);
  CHECK(minimax_value(initial_state(2, 3, 6)) == PlayerId::Second);
  CHECK(minimax_value(refutation_state(2, 2, 4, PlayerId::Second)) ==
        PlayerId::Second);
  CHECK(minimax_value(refutation_state(2, 2, 5, PlayerId::Second)) ==
        PlayerId::First);
  GameState pending =
      apply(refutation_state(2, 2, 5, PlayerId::First), Action::test(2));
  CHECK(minimax_value(pending) == PlayerId::Second);
}

TEST_CASE("minimax node budget") {
  MinimaxOptions opts;
  opts.node_budget = 3;
  CHECK_THROWS_AS(
      minimax_value(refutation_state(3, 6, 40, PlayerId::First), opts),
      BudgetExceeded);
}

TEST_CASE("enumerate_states ground truths") {
  EnumerationResult r = enumerate_states(1, 1, 2);
  CHECK(r.count == 4);
  CHECK(r.states.size() == 4);
  CHECK(r.claimer_test_states == 1);
  CHECK(r.refuter_answer_states == 1);
  CHECK(r.terminal_states == 2);

  // Terminal root: a single state.
  EnumerationResult solo = enumerate_states(1, 1, 1);
  CHECK(solo.count == 1);
  CHECK(solo.terminal_states == 1);

  EnumerationResult bigger = enumerate_states(2, 2, 4);
  CHECK(bigger.count ==
        bigger.claimer_test_states + bigger.refuter_answer_states +
            bigger.terminal_states);
  CHECK(static_cast<std::int64_t>(bigger.states.size()) == bigger.count);
  CHECK(bigger.count > 4);

  CHECK_THROWS_AS(enumerate_states(2, 6, 22, 10), BudgetExceeded);
}
