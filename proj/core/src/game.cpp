#include "hsr/game.hpp"

#include <sstream>
#include <stdexcept>

namespace hsr {

GameState initial_state(int k0, int q0, int n_max) {
  if (k0 < 1 || q0 < 1) {
    throw std::invalid_argument("initial_state: k0 and q0 must be >= 1");
  }
  if (n_max < 2) {
    throw std::invalid_argument("initial_state: n_max must be >= 2");
  }
  GameState s;
  s.phase = Phase::Proposal;
  s.k = k0;
  s.q = q0;
  s.n = 1;  // placeholder until a proposal is named; encode() emits 0
  s.m = 0;
  s.claimer = PlayerId::First;
  s.n_max = n_max;
  return s;
}

GameState refutation_state(int k, int q, int n, PlayerId claimer) {
  if (n < 1) throw std::invalid_argument("refutation_state: n must be >= 1");
  if (k < 0 || q < 0) {
    throw std::invalid_argument("refutation_state: k and q must be >= 0");
  }
  GameState s;
  s.k = k;
  s.q = q;
  s.n = n;
  s.m = 0;
  s.claimer = claimer;
  s.n_max = n;
  if (n == 1) {
    s.phase = Phase::Terminal;
    s.winner = claimer;
  } else if (k == 0 || q == 0) {
    s.phase = Phase::Terminal;
    s.winner = opponent(claimer);
  } else {
    s.phase = Phase::ClaimerTest;
  }
  return s;
}

std::vector<Action> legal_actions(const GameState& s) {
  std::vector<Action> out;
  switch (s.phase) {
    case Phase::Proposal:
      out.reserve(s.n_max);
      for (int v = 1; v <= s.n_max; ++v) out.push_back(Action::propose(v));
      break;
    case Phase::Decision:
      out = {Action::accept(), Action::reject()};
      break;
    case Phase::ClaimerTest:
      out.reserve(s.n - 1);
      for (int m = 1; m <= s.n - 1; ++m) out.push_back(Action::test(m));
      break;
    case Phase::RefuterAnswer:
      out = {Action::jar_breaks(), Action::jar_survives()};
      break;
    case Phase::Terminal:
      throw std::invalid_argument("legal_actions: state is terminal");
  }
  return out;
}

bool is_legal(const GameState& s, const Action& a) {
  switch (s.phase) {
    case Phase::Proposal:
      return a.kind == ActionKind::Propose && a.value >= 1 && a.value <= s.n_max;
    case Phase::Decision:
      return a.kind == ActionKind::Accept || a.kind == ActionKind::Reject;
    case Phase::ClaimerTest:
      return a.kind == ActionKind::Test && a.value >= 1 && a.value <= s.n - 1;
    case Phase::RefuterAnswer:
      return a.kind == ActionKind::Break || a.kind == ActionKind::NotBreak;
    case Phase::Terminal:
      return false;
  }
  return false;
}

GameState apply(const GameState& s, const Action& a) {
  if (s.is_terminal()) {
    throw std::invalid_argument("apply: state is terminal");
  }
  if (!is_legal(s, a)) {
    std::ostringstream msg;
    msg << "apply: illegal action " << to_string(a) << " in state "
        << to_string(s);
    switch (s.phase) {
      case Phase::Proposal:
        msg << " (expected Propose with 1 <= n <= " << s.n_max << ")";
        break;
      case Phase::Decision:
        msg << " (expected Accept or Reject)";
        break;
      case Phase::ClaimerTest:
        msg << " (expected Test with 1 <= m <= " << s.n - 1 << ")";
        break;
      case Phase::RefuterAnswer:
        msg << " (expected Break or NotBreak)";
        break;
      default:
        break;
    }
    throw std::invalid_argument(msg.str());
  }

  switch (a.kind) {
    case ActionKind::Propose: {
      GameState t = s;
      t.phase = Phase::Decision;
      t.n = a.value;
      return t;
    }
    case ActionKind::Accept: {
      // Decider challenges G(n) as refuter; roles unchanged.
      GameState t = refutation_state(s.k, s.q, s.n, s.claimer);
      t.n_max = s.n_max;
      return t;
    }
    case ActionKind::Reject: {
      // Rejecting player now claims G(n+1); role-flip.
      GameState t = refutation_state(s.k, s.q, s.n + 1, opponent(s.claimer));
      t.n_max = s.n_max;
      return t;
    }
    case ActionKind::Test: {
      GameState t = s;
      t.phase = Phase::RefuterAnswer;
      t.m = a.value;
      return t;
    }
    case ActionKind::Break: {
      GameState t = refutation_state(s.k - 1, s.q - 1, s.m, s.claimer);
      t.n_max = s.n_max;
      return t;
    }
    case ActionKind::NotBreak: {
      GameState t = refutation_state(s.k, s.q - 1, s.n - s.m, s.claimer);
      t.n_max = s.n_max;
      return t;
    }
  }
  throw std::logic_error("apply: unreachable");
}

PlayerId mover(const GameState& s) {
  switch (s.phase) {
    case Phase::Proposal:
      return PlayerId::First;
    case Phase::Decision:
      return PlayerId::Second;
    case Phase::ClaimerTest:
      return s.claimer;
    case Phase::RefuterAnswer:
      return opponent(s.claimer);
    case Phase::Terminal:
      throw std::invalid_argument("mover: state is terminal");
  }
  throw std::logic_error("mover: unreachable");
}

Role role_of(const GameState& s, PlayerId p) {
  return p == s.claimer ? Role::P : Role::OP;
}

EncodedState encode(const GameState& s) {
  if (s.is_terminal()) {
    throw std::invalid_argument("encode: state is terminal");
  }
  EncodedState e;
  e.phase = s.phase;
  e.k = s.k;
  e.q = s.q;
  e.n = s.phase == Phase::Proposal ? 0 : s.n;
  e.m = s.phase == Phase::RefuterAnswer ? s.m : 0;
  e.r = role_of(s, mover(s)) == Role::P ? 1 : -1;
  return e;
}

std::string to_string(const Action& a) {
  switch (a.kind) {
    case ActionKind::Propose:
      return "Propose(" + std::to_string(a.value) + ")";
    case ActionKind::Accept:
      return "Accept";
    case ActionKind::Reject:
      return "Reject";
    case ActionKind::Test:
      return "Test(" + std::to_string(a.value) + ")";
    case ActionKind::Break:
      return "Break";
    case ActionKind::NotBreak:
      return "NotBreak";
  }
  return "?";
}

std::string to_string(PlayerId p) {
  return p == PlayerId::First ? "First" : "Second";
}

std::string to_string(Role r) { return r == Role::P ? "P" : "OP"; }

std::string to_string(Phase p) {
  switch (p) {
    case Phase::Proposal:
      return "Proposal";
    case Phase::Decision:
      return "Decision";
    case Phase::ClaimerTest:
      return "ClaimerTest";
    case Phase::RefuterAnswer:
      return "RefuterAnswer";
    case Phase::Terminal:
      return "Terminal";
  }
  return "?";
}

std::string to_string(const GameState& s) {
  std::ostringstream os;
  os << "(" << to_string(s.phase) << " " << s.k << " " << s.q << " " << s.n
     << " " << s.m << " " << to_string(s.claimer) << ")";
  return os.str();
}

std::uint64_t state_key(const GameState& s, bool with_claimer) {
  // phase:3 | claimer:1 | k:10 | q:10 | n:20 | m:20
  std::uint64_t key = static_cast<std::uint64_t>(s.phase);
  key = key << 1 |
        (with_claimer ? static_cast<std::uint64_t>(s.claimer) : 0ull);
  key = key << 10 | static_cast<std::uint64_t>(s.k & 0x3ff);
  key = key << 10 | static_cast<std::uint64_t>(s.q & 0x3ff);
  key = key << 20 | static_cast<std::uint64_t>(s.n & 0xfffff);
  key = key << 20 | static_cast<std::uint64_t>(s.m & 0xfffff);
  return key;
}

}  // namespace hsr
