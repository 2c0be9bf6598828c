#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsr {

enum class PlayerId : std::uint8_t { First = 0, Second = 1 };

constexpr PlayerId opponent(PlayerId p) {
  return p == PlayerId::First ? PlayerId::Second : PlayerId::First;
}

// P = current claimer (existential moves), OP = current refuter (universal
// moves). Roles, not seats: they swap when a proposal is rejected.
enum class Role : std::uint8_t { P = 0, OP = 1 };

enum class Phase : std::uint8_t {
  Proposal,       // first player names an instance size
  Decision,       // second player accepts or rejects it
  ClaimerTest,    // claimer picks a split point
  RefuterAnswer,  // refuter answers break / not-break
  Terminal,
};

enum class ActionKind : std::uint8_t {
  Propose,
  Accept,
  Reject,
  Test,
  Break,
  NotBreak,
};

struct Action {
  ActionKind kind;
  int value = 0;  // Propose: proposed n, Test: split point m; unused otherwise

  static Action propose(int n) { return {ActionKind::Propose, n}; }
  static Action accept() { return {ActionKind::Accept}; }
  static Action reject() { return {ActionKind::Reject}; }
  static Action test(int m) { return {ActionKind::Test, m}; }
  static Action jar_breaks() { return {ActionKind::Break}; }
  static Action jar_survives() { return {ActionKind::NotBreak}; }

  bool operator==(const Action&) const = default;
};

// Full game position. n counts candidate values for the highest safe rung,
// not physical rungs: a test at split point m leaves m candidates if the jar
// breaks and n-m if it survives, and the claimer wins at n = 1.
struct GameState {
  Phase phase = Phase::Proposal;
  int k = 0;      // jars remaining
  int q = 0;      // tests remaining
  int n = 1;      // candidate count; the proposed value in Decision phase
  int m = 0;      // pending split point, nonzero only in RefuterAnswer
  PlayerId claimer = PlayerId::First;
  int n_max = 0;  // proposal bound; refutation n may reach n_max + 1
  std::optional<PlayerId> winner;  // set iff phase == Terminal

  bool is_terminal() const { return phase == Phase::Terminal; }
  bool operator==(const GameState&) const = default;
};

// Neural-net input view of a state: (k, q, n, m, r) plus the phase tag that
// routes the tuple to the proposal-phase or refutation-phase evaluator.
// m = 0 outside RefuterAnswer, n = 0 before a proposal is named, and
// r = +1 when the mover holds the claimer role, -1 otherwise.
struct EncodedState {
  Phase phase;
  int k, q, n, m;
  int r;

  bool proposal_phase() const {
    return phase == Phase::Proposal || phase == Phase::Decision;
  }
  bool operator==(const EncodedState&) const = default;
};

struct MoveRecord {
  GameState state_before;
  PlayerId actor;
  Role actor_role;
  Action action;
};

GameState initial_state(int k0, int q0, int n_max);

// Builds a refutation position, folding terminal evaluation into construction:
// n = 1 ends the game for the claimer, exhausted resources for the refuter.
GameState refutation_state(int k, int q, int n, PlayerId claimer);

std::vector<Action> legal_actions(const GameState& s);
bool is_legal(const GameState& s, const Action& a);
GameState apply(const GameState& s, const Action& a);

// Movers are not strictly alternating: the player who rejects a proposal
// moves again as the new claimer. Never derive the mover from ply parity.
PlayerId mover(const GameState& s);

Role role_of(const GameState& s, PlayerId p);

EncodedState encode(const GameState& s);

std::string to_string(const Action& a);
std::string to_string(PlayerId p);
std::string to_string(Role r);
std::string to_string(Phase p);
// Text form "(phase k q n m claimer)" used by traces and logs.
std::string to_string(const GameState& s);

// Packed canonical key. with_claimer distinguishes the two claimer variants
// of a position (needed for search trees, where the mover's identity counts);
// metrics drop it, since game values are claimer-symmetric.
std::uint64_t state_key(const GameState& s, bool with_claimer = true);

}  // namespace hsr
