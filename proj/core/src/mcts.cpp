#include "hsr/mcts.hpp"

#include <cmath>
#include <stdexcept>

#include "hsr/rng.hpp"

namespace hsr {

SearchTree::Node* SearchTree::find(const GameState& s) {
  auto it = nodes_.find(state_key(s));
  return it == nodes_.end() ? nullptr : &it->second;
}

SearchTree::Node& SearchTree::get_or_create(const GameState& s,
                                            bool& created) {
  auto [it, inserted] = nodes_.try_emplace(state_key(s));
  created = inserted;
  if (inserted) {
    Node& node = it->second;
    node.terminal = (s.phase == Phase::Terminal);
    if (node.terminal) {
      node.winner = *s.winner;
    } else {
      node.mover = mover(s);
    }
    canonical_.insert(state_key(s, /*with_claimer=*/false));
  }
  return it->second;
}

LeafEvaluation evaluate_leaf(const GameState& s, const Evaluator& eval) {
  LeafEvaluation out;
  if (s.phase == Phase::Terminal) {
    out.value = 1.0;
    out.perspective = *s.winner;
    return out;
  }
  out.perspective = mover(s);
  PolicyValue pv = eval.evaluate(s);
  out.value = pv.value;
  std::vector<Action> actions = legal_actions(s);
  out.priors.resize(actions.size(), 0.0);
  const bool p_head = uses_p_head(s.phase);
  double mass = 0.0;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    int idx = head_index(actions[i]);
    double raw = 0.0;
    if (p_head) {
      if (idx >= 0 && idx < static_cast<int>(pv.policy_p.size())) {
        raw = pv.policy_p[static_cast<std::size_t>(idx)];
      }
    } else {
      raw = pv.policy_op[static_cast<std::size_t>(idx)];
    }
    out.priors[i] = raw;
    mass += raw;
  }
  if (mass < 1e-8) {
    double u = 1.0 / static_cast<double>(actions.size());
    for (double& p : out.priors) p = u;
  } else {
    for (double& p : out.priors) p /= mass;
  }
  return out;
}

int select_action(const SearchTree::Node& node, const SearchConfig& cfg) {
  if (!node.expanded || node.terminal) {
    throw std::logic_error("select_action: node not expanded or terminal");
  }
  double total_n = 0.0;
  for (const EdgeStats& e : node.edges) total_n += e.n;
  int best = 0;
  double best_score = -1e300;
  for (std::size_t i = 0; i < node.edges.size(); ++i) {
    const EdgeStats& e = node.edges[i];
    double explore =
        cfg.theoretical_exploration
            ? cfg.c_puct * e.p * std::sqrt(total_n / (e.n + 1.0))
            : cfg.c_puct * e.p * std::sqrt(total_n) / (e.n + 1.0);
    double score = e.q + explore;
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

void backup(const std::vector<PathStep>& path, double v_leaf,
            PlayerId leaf_perspective) {
  for (const PathStep& step : path) {
    EdgeStats& e = step.node->edges[static_cast<std::size_t>(step.edge)];
    double v = (step.node->mover == leaf_perspective) ? v_leaf : -v_leaf;
    e.q = (e.q * e.n + v) / (e.n + 1.0);
    e.n += 1;
    e.w += v;
  }
}

namespace {

void expand(SearchTree::Node& node, const GameState& s,
            const LeafEvaluation& le) {
  node.actions = legal_actions(s);
  node.edges.assign(node.actions.size(), EdgeStats{});
  for (std::size_t i = 0; i < node.edges.size(); ++i) {
    node.edges[i].p = le.priors[i];
  }
  node.expanded = true;
}

}  // namespace

SearchResult search(const GameState& root, const Evaluator& eval,
                    const SearchConfig& cfg, SearchTree* tree) {
  if (root.phase == Phase::Terminal) {
    throw std::invalid_argument("search: root is terminal");
  }
  if (cfg.simulations < 1) {
    throw std::invalid_argument("search: simulations must be >= 1");
  }
  SearchTree local;
  if (tree == nullptr) tree = &local;
  std::size_t canonical_before = tree->inserted_canonical().size();

  bool created = false;
  SearchTree::Node& root_node = tree->get_or_create(root, created);
  if (!root_node.expanded) {
    expand(root_node, root, evaluate_leaf(root, eval));
  }
  if (cfg.dirichlet_epsilon > 0.0 && !root_node.edges.empty()) {
    Rng rng(cfg.seed);
    std::vector<double> noise =
        rng.dirichlet(cfg.dirichlet_alpha, root_node.edges.size());
    for (std::size_t i = 0; i < root_node.edges.size(); ++i) {
      root_node.edges[i].p = (1.0 - cfg.dirichlet_epsilon) *
                                 root_node.edges[i].p +
                             cfg.dirichlet_epsilon * noise[i];
    }
  }

  std::vector<PathStep> path;
  for (int sim = 0; sim < cfg.simulations; ++sim) {
    path.clear();
    GameState s = root;
    SearchTree::Node* node = &root_node;
    double v = 0.0;
    PlayerId perspective = PlayerId::First;
    for (;;) {
      if (node->terminal) {
        v = 1.0;
        perspective = node->winner;
        break;
      }
      if (!node->expanded) {
        LeafEvaluation le = evaluate_leaf(s, eval);
        expand(*node, s, le);
        v = le.value;
        perspective = le.perspective;
        break;
      }
      int ai = select_action(*node, cfg);
      path.push_back(PathStep{node, ai});
      s = apply(s, node->actions[static_cast<std::size_t>(ai)]);
      bool child_created = false;
      node = &tree->get_or_create(s, child_created);
    }
    backup(path, v, perspective);
  }

  SearchResult result;
  result.actions = root_node.actions;
  result.visits.reserve(root_node.edges.size());
  result.root_q.reserve(root_node.edges.size());
  result.root_prior.reserve(root_node.edges.size());
  for (const EdgeStats& e : root_node.edges) {
    result.visits.push_back(e.n);
    result.root_q.push_back(e.q);
    result.root_prior.push_back(e.p);
  }
  result.inserted_states = static_cast<std::int64_t>(
      tree->inserted_canonical().size() - canonical_before);

  int best = 0;
  for (std::size_t i = 1; i < result.visits.size(); ++i) {
    if (result.visits[i] > result.visits[best]) best = static_cast<int>(i);
  }
  result.argmax_index = best;

  result.pi.assign(result.visits.size(), 0.0);
  if (cfg.temperature < 1e-3) {
    result.pi[static_cast<std::size_t>(best)] = 1.0;
  } else if (cfg.temperature == 1.0) {
    double total = 0.0;
    for (int n : result.visits) total += n;
    for (std::size_t i = 0; i < result.visits.size(); ++i) {
      result.pi[i] = result.visits[i] / total;
    }
  } else {
    // pi(a) proportional to N(a)^(1/tau), computed in log space.
    double inv_tau = 1.0 / cfg.temperature;
    double max_log = -1e300;
    std::vector<double> logs(result.visits.size(), -1e300);
    for (std::size_t i = 0; i < result.visits.size(); ++i) {
      if (result.visits[i] > 0) {
        logs[i] = inv_tau * std::log(static_cast<double>(result.visits[i]));
        max_log = std::max(max_log, logs[i]);
      }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
      if (result.visits[i] > 0) {
        result.pi[i] = std::exp(logs[i] - max_log);
        total += result.pi[i];
      }
    }
    for (double& p : result.pi) p /= total;
  }
  return result;
}

}  // namespace hsr
