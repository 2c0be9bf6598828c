#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <stdexcept>

#include "doctest.h"
#include "hsr/game.hpp"

using namespace hsr;

TEST_CASE("initial_state starts the proposal phase") {
  GameState s = initial_state(2, 3, 10);
  CHECK(s.phase == Phase::Proposal);
  CHECK(s.k == 2);
  CHECK(s.q == 3);
  CHECK(s.n_max == 10);
  CHECK(s.claimer == PlayerId::First);
  CHECK_FALSE(s.is_terminal());
  CHECK(mover(s) == PlayerId::First);
  CHECK(role_of(s, PlayerId::First) == Role::P);
  CHECK(role_of(s, PlayerId::Second) == Role::OP);

  CHECK_THROWS_AS(initial_state(0, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(initial_state(2, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(initial_state(2, 3, 1), std::invalid_argument);
}

TEST_CASE("refutation_state folds terminal evaluation into construction") {
  GameState live = refutation_state(2, 6, 22, PlayerId::First);
  CHECK(live.phase == Phase::ClaimerTest);
  CHECK(live.n_max == 22);
  CHECK(mover(live) == PlayerId::First);

  GameState won = refutation_state(3, 2, 1, PlayerId::Second);
  CHECK(won.phase == Phase::Terminal);
  CHECK(won.winner == PlayerId::Second);

  GameState no_jars = refutation_state(0, 4, 2, PlayerId::First);
  CHECK(no_jars.phase == Phase::Terminal);
  CHECK(no_jars.winner == PlayerId::Second);

  GameState no_tests = refutation_state(3, 0, 5, PlayerId::Second);
  CHECK(no_tests.phase == Phase::Terminal);
  CHECK(no_tests.winner == PlayerId::First);

  // n = 1 wins for the claimer even with nothing left to spend.
  GameState solved = refutation_state(0, 0, 1, PlayerId::First);
  CHECK(solved.phase == Phase::Terminal);
  CHECK(solved.winner == PlayerId::First);

  CHECK_THROWS_AS(refutation_state(1, 1, 0, PlayerId::First),
                  std::invalid_argument);
  CHECK_THROWS_AS(refutation_state(-1, 1, 2, PlayerId::First),
                  std::invalid_argument);
}

TEST_CASE("legal actions per phase") {
  GameState prop = initial_state(2, 3, 10);
  auto props = legal_actions(prop);
  REQUIRE(props.size() == 10);
  CHECK(props.front() == Action::propose(1));
  CHECK(props.back() == Action::propose(10));
  CHECK(is_legal(prop, Action::propose(7)));
  CHECK_FALSE(is_legal(prop, Action::propose(0)));
  CHECK_FALSE(is_legal(prop, Action::propose(11)));
  CHECK_FALSE(is_legal(prop, Action::test(1)));

  GameState dec = apply(prop, Action::propose(7));
  CHECK(dec.phase == Phase::Decision);
  CHECK(dec.n == 7);
  auto decisions = legal_actions(dec);
  REQUIRE(decisions.size() == 2);
  CHECK(decisions[0] == Action::accept());
  CHECK(decisions[1] == Action::reject());
  CHECK_FALSE(is_legal(dec, Action::propose(3)));

  GameState test = refutation_state(2, 6, 22, PlayerId::First);
  auto tests = legal_actions(test);
  REQUIRE(tests.size() == 21);
  CHECK(tests.front() == Action::test(1));
  CHECK(tests.back() == Action::test(21));
  CHECK_FALSE(is_legal(test, Action::test(0)));
  CHECK_FALSE(is_legal(test, Action::test(22)));

  GameState answer = apply(test, Action::test(6));
  CHECK(answer.phase == Phase::RefuterAnswer);
  CHECK(answer.m == 6);
  auto answers = legal_actions(answer);
  REQUIRE(answers.size() == 2);
  CHECK(answers[0] == Action::jar_breaks());
  CHECK(answers[1] == Action::jar_survives());

  GameState done = refutation_state(1, 1, 1, PlayerId::First);
  CHECK_THROWS_AS(legal_actions(done), std::invalid_argument);
  CHECK_FALSE(is_legal(done, Action::test(1)));
}

TEST_CASE("test split arithmetic: Break keeps m, NotBreak keeps n - m") {
  GameState s = refutation_state(2, 6, 22, PlayerId::First);
  GameState pending = apply(s, Action::test(6));

  GameState broke = apply(pending, Action::jar_breaks());
  CHECK(broke.k == 1);
  CHECK(broke.q == 5);
  CHECK(broke.n == 6);
  CHECK(broke.phase == Phase::ClaimerTest);
  CHECK(broke.claimer == PlayerId::First);
  CHECK(broke.n_max == 22);

  GameState survived = apply(pending, Action::jar_survives());
  CHECK(survived.k == 2);
  CHECK(survived.q == 5);
  CHECK(survived.n == 16);
  CHECK(survived.claimer == PlayerId::First);
}

TEST_CASE("resource exhaustion ends the game against the claimer") {
  // One jar, one test, two candidates: Test(1) then NotBreak leaves n = 1.
  GameState s = refutation_state(1, 1, 2, PlayerId::First);
  GameState pending = apply(s, Action::test(1));

  GameState broke = apply(pending, Action::jar_breaks());
  CHECK(broke.is_terminal());
  CHECK(broke.winner == PlayerId::First);  // n = m = 1

  GameState survived = apply(pending, Action::jar_survives());
  CHECK(survived.is_terminal());
  CHECK(survived.winner == PlayerId::First);  // n - m = 1

  // Two candidates left but no tests: claimer loses.
  GameState starved = refutation_state(2, 1, 3, PlayerId::First);
  GameState p2 = apply(starved, Action::test(1));
  GameState lost = apply(p2, Action::jar_survives());  // (2, 0, 2)
  CHECK(lost.is_terminal());
  CHECK(lost.winner == PlayerId::Second);
}

TEST_CASE("accept keeps the claimer, reject flips it and grows n") {
  GameState prop = initial_state(2, 3, 10);
  GameState dec = apply(prop, Action::propose(7));

  GameState accepted = apply(dec, Action::accept());
  CHECK(accepted.phase == Phase::ClaimerTest);
  CHECK(accepted.n == 7);
  CHECK(accepted.claimer == PlayerId::First);
  CHECK(accepted.n_max == 10);
  CHECK(mover(accepted) == PlayerId::First);

  GameState rejected = apply(dec, Action::reject());
  CHECK(rejected.phase == Phase::ClaimerTest);
  CHECK(rejected.n == 8);
  CHECK(rejected.claimer == PlayerId::Second);
  // The rejecting player moves again: movers are not alternating.
  CHECK(mover(dec) == PlayerId::Second);
  CHECK(mover(rejected) == PlayerId::Second);
  CHECK(role_of(rejected, PlayerId::Second) == Role::P);
  CHECK(role_of(rejected, PlayerId::First) == Role::OP);
}

TEST_CASE("reject at n_max can exceed the proposal bound by one") {
  GameState prop = initial_state(2, 3, 10);
  GameState dec = apply(prop, Action::propose(10));
  GameState rejected = apply(dec, Action::reject());
  CHECK(rejected.n == 11);
  CHECK(rejected.n_max == 10);
}

TEST_CASE("mover by phase, refuter answers") {
  GameState s = refutation_state(2, 6, 22, PlayerId::Second);
  CHECK(mover(s) == PlayerId::Second);
  GameState pending = apply(s, Action::test(6));
  CHECK(mover(pending) == PlayerId::First);
  CHECK(role_of(pending, PlayerId::First) == Role::OP);

  GameState done = refutation_state(1, 1, 1, PlayerId::First);
  CHECK_THROWS_AS(mover(done), std::invalid_argument);
}

TEST_CASE("apply rejects illegal actions with a diagnostic") {
  GameState s = refutation_state(2, 6, 22, PlayerId::First);
  CHECK_THROWS_AS(apply(s, Action::test(22)), std::invalid_argument);
  CHECK_THROWS_AS(apply(s, Action::accept()), std::invalid_argument);
  GameState done = refutation_state(1, 1, 1, PlayerId::First);
  CHECK_THROWS_AS(apply(done, Action::test(1)), std::invalid_argument);
}

TEST_CASE("encode masks phase-irrelevant fields and tags the mover role") {
  GameState prop = initial_state(2, 3, 10);
  EncodedState e0 = encode(prop);
  CHECK(e0.phase == Phase::Proposal);
  CHECK(e0.n == 0);  // nothing proposed yet
  CHECK(e0.m == 0);
  CHECK(e0.r == 1);  // proposer is the prospective claimer
  CHECK(e0.proposal_phase());

  GameState dec = apply(prop, Action::propose(7));
  EncodedState e1 = encode(dec);
  CHECK(e1.n == 7);
  CHECK(e1.r == -1);  // decider holds the refuter role
  CHECK(e1.proposal_phase());

  GameState test = refutation_state(2, 6, 22, PlayerId::First);
  EncodedState e2 = encode(test);
  CHECK(e2.phase == Phase::ClaimerTest);
  CHECK(e2.n == 22);
  CHECK(e2.m == 0);
  CHECK(e2.r == 1);
  CHECK_FALSE(e2.proposal_phase());

  GameState pending = apply(test, Action::test(6));
  EncodedState e3 = encode(pending);
  CHECK(e3.m == 6);
  CHECK(e3.r == -1);

  GameState done = refutation_state(1, 1, 1, PlayerId::First);
  CHECK_THROWS_AS(encode(done), std::invalid_argument);
}

TEST_CASE("state_key distinguishes states; claimer bit is droppable") {
  GameState a = refutation_state(2, 6, 22, PlayerId::First);
  GameState b = refutation_state(2, 6, 22, PlayerId::Second);
  CHECK(state_key(a) != state_key(b));
  CHECK(state_key(a, false) == state_key(b, false));

  GameState c = refutation_state(2, 6, 21, PlayerId::First);
  CHECK(state_key(a, false) != state_key(c, false));
  CHECK(state_key(a) != state_key(c));

  GameState pending = apply(a, Action::test(6));
  CHECK(state_key(pending) != state_key(a));

  // Phase participates: Decision(n) differs from ClaimerTest(n).
  GameState prop = initial_state(2, 6, 22);
  GameState dec = apply(prop, Action::propose(22));
  CHECK(state_key(dec, false) != state_key(a, false));
}

TEST_CASE("text forms") {
  CHECK(to_string(Action::propose(7)) == "Propose(7)");
  CHECK(to_string(Action::accept()) == "Accept");
  CHECK(to_string(Action::reject()) == "Reject");
  CHECK(to_string(Action::test(64)) == "Test(64)");
  CHECK(to_string(Action::jar_breaks()) == "Break");
  CHECK(to_string(Action::jar_survives()) == "NotBreak");
  CHECK(to_string(PlayerId::First) == "First");
  CHECK(to_string(PlayerId::Second) == "Second");
  CHECK(to_string(Role::P) == "P");
  CHECK(to_string(Role::OP) == "OP");
  GameState s = refutation_state(7, 7, 128, PlayerId::First);
  CHECK(to_string(s) == "(ClaimerTest 7 7 128 0 First)");
}

TEST_CASE("opponent is an involution") {
  CHECK(opponent(PlayerId::First) == PlayerId::Second);
  CHECK(opponent(PlayerId::Second) == PlayerId::First);
  CHECK(opponent(opponent(PlayerId::First)) == PlayerId::First);
}
