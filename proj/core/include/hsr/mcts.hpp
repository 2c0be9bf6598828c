#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hsr/evaluator.hpp"
#include "hsr/game.hpp"

namespace hsr {

// Per-(state, action) search statistics. Q is the smoothed running mean,
// updated as Q <- (Q*N + v)/(N + 1); W accumulates raw backed-up values and
// is kept for diagnostics only.
struct EdgeStats {
  int n = 0;
  double w = 0.0;
  double q = 0.0;
  double p = 0.0;
};

struct SearchConfig {
  int simulations = 50;
  double c_puct = 1.0;
  double temperature = 1.0;
  // Exploration term: false -> c*P*sqrt(sum N)/(N+1); true -> the
  // theoretically motivated c*P*sqrt(sum N/(N+1)).
  bool theoretical_exploration = false;
  double dirichlet_epsilon = 0.0;  // root prior noise; off by default
  double dirichlet_alpha = 0.3;
  std::uint64_t seed = 0;
};

class SearchTree {
 public:
  struct Node {
    std::vector<Action> actions;
    std::vector<EdgeStats> edges;
    PlayerId mover = PlayerId::First;
    bool terminal = false;
    PlayerId winner = PlayerId::First;  // meaningful only when terminal
    bool expanded = false;
  };

  // Nodes are keyed with claimer identity: both claimer variants of one
  // position are reachable below a proposal root and have different movers.
  Node* find(const GameState& s);
  Node& get_or_create(const GameState& s, bool& created);

  std::size_t size() const { return nodes_.size(); }

  // Claimer-dropped canonical keys of every state inserted into this tree;
  // the coverage metric counts these.
  const std::unordered_set<std::uint64_t>& inserted_canonical() const {
    return canonical_;
  }

 private:
  std::unordered_map<std::uint64_t, Node> nodes_;
  std::unordered_set<std::uint64_t> canonical_;
};

struct SearchResult {
  std::vector<Action> actions;  // legal actions at the root
  std::vector<double> pi;       // temperature-adjusted visit distribution
  std::vector<int> visits;
  std::vector<double> root_q;
  std::vector<double> root_prior;
  std::int64_t inserted_states = 0;  // distinct canonical states this search
  int argmax_index = 0;              // lowest-index argmax of visits
};

struct LeafEvaluation {
  // Aligned with legal_actions(s); empty for terminal states.
  std::vector<double> priors;
  double value = 0.0;  // from `perspective`'s viewpoint
  PlayerId perspective = PlayerId::First;
};

// Evaluator output masked to legal actions and renormalized (uniform
// fallback when the legal mass vanishes). Terminal states evaluate to +1
// from the winner's perspective.
LeafEvaluation evaluate_leaf(const GameState& s, const Evaluator& eval);

// PUCT pick over an expanded node, deterministic lowest-index tie-break.
int select_action(const SearchTree::Node& node, const SearchConfig& cfg);

struct PathStep {
  SearchTree::Node* node = nullptr;
  int edge = -1;
};

// Propagates v_leaf up the selected path; each edge receives v or -v by
// comparing its node's mover with leaf_perspective (movers do not strictly
// alternate across Reject, so ply parity would mis-sign values).
void backup(const std::vector<PathStep>& path, double v_leaf,
            PlayerId leaf_perspective);

// Runs cfg.simulations PUCT simulations from root. The root is expanded
// up front (not counted as a simulation), so root visits sum to
// cfg.simulations. Pass a tree to accumulate across calls; otherwise a
// fresh tree is used and discarded.
SearchResult search(const GameState& root, const Evaluator& eval,
                    const SearchConfig& cfg, SearchTree* tree = nullptr);

}  // namespace hsr
