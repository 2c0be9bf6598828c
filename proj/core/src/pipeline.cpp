#include "hsr/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

namespace hsr {

namespace {

// Index-parallel loop with deterministic per-index work; exceptions from
// workers are rethrown on the calling thread.
void parallel_for(int count, int workers,
                  const std::function<void(int)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  int w = std::min(workers, count);
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr error;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(w));
  for (int t = 0; t < w; ++t) {
    threads.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

PhaseGroup phase_group(Phase phase) {
  switch (phase) {
    case Phase::Proposal:
    case Phase::Decision:
      return PhaseGroup::Proposal;
    case Phase::ClaimerTest:
    case Phase::RefuterAnswer:
      return PhaseGroup::Refutation;
    case Phase::Terminal:
      break;
  }
  throw std::invalid_argument("phase_group: terminal phase");
}

void ReplayBuffer::push_iteration(std::vector<TrainingExample> block) {
  total_ += block.size();
  blocks_.push_back(std::move(block));
  while (static_cast<int>(blocks_.size()) > capacity_) {
    total_ -= blocks_.front().size();
    blocks_.pop_front();
  }
}

std::vector<const TrainingExample*> ReplayBuffer::all() const {
  std::vector<const TrainingExample*> out;
  out.reserve(total_);
  for (const auto& block : blocks_) {
    for (const auto& ex : block) out.push_back(&ex);
  }
  return out;
}

GameState GameSpec::root_state() const {
  if (complete) {
    return initial_state(k0, q0, static_cast<int>(n_max));
  }
  GameState s = refutation_state(k0, q0, static_cast<int>(n), PlayerId::First);
  s.n_max = static_cast<int>(n_max);
  return s;
}

PlayedGame play_game(const GameSpec& game, const Evaluator& first_eval,
                     const Evaluator& second_eval, const SearchConfig& cfg,
                     Rng* sampler) {
  PlayedGame out;
  GameState s = game.root_state();
  out.accessed.insert(state_key(s, /*with_claimer=*/false));
  const int limit = 2 * game.q0 + 8;
  int moves = 0;
  while (s.phase != Phase::Terminal) {
    if (++moves > limit) {
      throw std::logic_error("play_game: move limit exceeded");
    }
    PlayerId actor = mover(s);
    const Evaluator& eval =
        (actor == PlayerId::First) ? first_eval : second_eval;
    SearchTree tree;
    SearchResult res = search(s, eval, cfg, &tree);
    for (std::uint64_t key : tree.inserted_canonical()) out.accessed.insert(key);
    out.inserted_per_move.push_back(res.inserted_states);

    std::vector<double> hp(
        static_cast<std::size_t>(head_size(s.phase, game.head_p_size())), 0.0);
    for (std::size_t i = 0; i < res.actions.size(); ++i) {
      hp[static_cast<std::size_t>(head_index(res.actions[i]))] += res.pi[i];
    }
    out.head_pi.push_back(std::move(hp));

    int choice = (sampler != nullptr)
                     ? static_cast<int>(sampler->sample_weighted(res.pi))
                     : res.argmax_index;
    Action a = res.actions[static_cast<std::size_t>(choice)];
    out.moves.push_back(MoveRecord{s, actor, role_of(s, actor), a});
    s = apply(s, a);
  }
  out.winner = *s.winner;
  return out;
}

EpisodeResult run_episode(const GameSpec& game, const Evaluator& eval,
                          const SearchConfig& cfg, Rng& rng) {
  EpisodeResult er;
  er.game = play_game(game, eval, eval, cfg, &rng);
  er.examples.reserve(er.game.moves.size());
  for (std::size_t i = 0; i < er.game.moves.size(); ++i) {
    const MoveRecord& rec = er.game.moves[i];
    TrainingExample ex;
    ex.state = encode(rec.state_before);
    ex.group = phase_group(rec.state_before.phase);
    ex.mover_role = rec.actor_role;
    ex.mover = rec.actor;
    ex.pi = er.game.head_pi[i];
    ex.z = (rec.actor == er.game.winner) ? 1.0 : -1.0;
    er.examples.push_back(std::move(ex));
  }
  return er;
}

std::optional<double> correctness_ratio(const std::vector<JudgedMove>& moves,
                                        AgentId agent, Role role) {
  int total = 0;
  int correct = 0;
  for (const JudgedMove& jm : moves) {
    if (jm.agent != agent || jm.rec.actor_role != role) continue;
    ++total;
    if (jm.judgment == MoveJudgment::Correct) ++correct;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / total;
}

ArenaOutcome run_arena(const GameSpec& game, const Evaluator& new_eval,
                       const Evaluator& old_eval, int rounds_per_side,
                       SearchConfig cfg, int workers) {
  cfg.temperature = 0.0;  // deterministic evaluation play
  ArenaOutcome out;
  int total_games = 2 * rounds_per_side;
  std::vector<PlayedGame> games(static_cast<std::size_t>(total_games));
  parallel_for(total_games, workers, [&](int g) {
    bool new_first = g >= rounds_per_side;  // OP rounds first, then P rounds
    const Evaluator& first = new_first ? new_eval : old_eval;
    const Evaluator& second = new_first ? old_eval : new_eval;
    games[static_cast<std::size_t>(g)] =
        play_game(game, first, second, cfg, nullptr);
  });
  for (int g = 0; g < total_games; ++g) {
    bool new_first = g >= rounds_per_side;
    const PlayedGame& pg = games[static_cast<std::size_t>(g)];
    ++out.games;
    bool new_won = (pg.winner == PlayerId::First) == new_first;
    if (new_won) {
      ++out.new_wins;
    } else {
      ++out.old_wins;
    }
    if (new_first) {
      ++out.new_as_p_games;
      if (new_won) ++out.new_as_p_wins;
    } else {
      ++out.new_as_op_games;
      if (new_won) ++out.new_as_op_wins;
    }
    for (const MoveRecord& rec : pg.moves) {
      JudgedMove jm;
      jm.rec = rec;
      jm.agent = ((rec.actor == PlayerId::First) == new_first) ? AgentId::New
                                                               : AgentId::Old;
      jm.judgment = classify_move(rec);
      out.judged.push_back(std::move(jm));
    }
    if (game.complete && new_first && !pg.moves.empty()) {
      ++out.new_first_games;
      MoveRecord first_move = pg.moves.front();
      if (first_move.action.kind == ActionKind::Propose &&
          classify_move(first_move) == MoveJudgment::Correct) {
        ++out.new_optimal_proposals;
      }
    }
  }
  return out;
}

CoverageStats coverage_metrics(const std::vector<const PlayedGame*>& games,
                               const GameSpec& game,
                               std::optional<std::int64_t> total) {
  (void)game;
  CoverageStats cov;
  if (games.empty()) return cov;
  double sum = 0.0;
  for (const PlayedGame* pg : games) {
    auto accessed = static_cast<std::int64_t>(pg->accessed.size());
    sum += static_cast<double>(accessed);
    cov.max = std::max(cov.max, accessed);
  }
  cov.mean = sum / static_cast<double>(games.size());
  cov.total = total;
  if (total && *total > 0) cov.ratio = cov.mean / static_cast<double>(*total);
  return cov;
}

NetConfig make_net_config(const NetConfig& tmpl, const GameSpec& game,
                          std::uint64_t init_seed) {
  NetConfig cfg = tmpl;
  cfg.head_p_size = game.head_p_size();
  cfg.head_op_size = 2;
  cfg.init_seed = init_seed;
  return cfg;
}

Pipeline::Pipeline(PipelineConfig cfg)
    : cfg_(std::move(cfg)),
      proposal_(make_net_config(cfg_.net_template, cfg_.game,
                                derive_seed(cfg_.seed, 1))),
      refutation_(make_net_config(cfg_.net_template, cfg_.game,
                                  derive_seed(cfg_.seed, 2))),
      proposal_buffer_(cfg_.buffer_iterations),
      refutation_buffer_(cfg_.buffer_iterations) {}

void Pipeline::restore(Network proposal, Network refutation, int iteration) {
  proposal_ = std::move(proposal);
  refutation_ = std::move(refutation);
  iteration_ = iteration;
}

namespace {

std::optional<double> train_one(Network& net, const ReplayBuffer& buffer,
                                const PipelineConfig& cfg, Rng& rng) {
  std::vector<const TrainingExample*> ptrs = buffer.all();
  if (ptrs.empty()) return std::nullopt;
  InputScale scale = cfg.game.scale();
  std::vector<NetExample> data(ptrs.size());
  for (std::size_t i = 0; i < ptrs.size(); ++i) {
    data[i].input = scale.normalize(ptrs[i]->state);
    data[i].p_head = (ptrs[i]->mover_role == Role::P);
    data[i].pi = ptrs[i]->pi;
    data[i].z = ptrs[i]->z;
  }
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double loss_sum = 0.0;
  int batches = 0;
  std::vector<NetExample> batch;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) batch.push_back(data[order[i]]);
      TrainStats st = net.train_batch(batch, cfg.hyper);
      loss_sum += st.loss;
      ++batches;
    }
  }
  if (batches == 0) return std::nullopt;
  return loss_sum / batches;
}

}  // namespace

IterationReport Pipeline::run_iteration() {
  const int iter = ++iteration_;
  IterationReport rep;
  rep.iteration = iter;
  rep.episodes = cfg_.episodes;

  InputScale scale = cfg_.game.scale();
  NetworkPairEvaluator current(&proposal_, &refutation_, scale);
  std::uint64_t iter_seed = derive_seed(cfg_.seed, 1000 + static_cast<std::uint64_t>(iter));

  // 1. Self-play.
  std::vector<EpisodeResult> episodes(static_cast<std::size_t>(cfg_.episodes));
  parallel_for(cfg_.episodes, cfg_.workers, [&](int e) {
    Rng rng(derive_seed(iter_seed, static_cast<std::uint64_t>(e)));
    episodes[static_cast<std::size_t>(e)] =
        run_episode(cfg_.game, current, cfg_.search, rng);
  });

  std::vector<TrainingExample> proposal_block;
  std::vector<TrainingExample> refutation_block;
  std::vector<const PlayedGame*> game_ptrs;
  int sp_p_total = 0, sp_p_correct = 0, sp_op_total = 0, sp_op_correct = 0;
  for (EpisodeResult& er : episodes) {
    for (const MoveRecord& rec : er.game.moves) {
      MoveJudgment j = classify_move(rec);
      if (rec.actor_role == Role::P) {
        ++sp_p_total;
        if (j == MoveJudgment::Correct) ++sp_p_correct;
      } else {
        ++sp_op_total;
        if (j == MoveJudgment::Correct) ++sp_op_correct;
      }
    }
    for (TrainingExample& ex : er.examples) {
      (ex.group == PhaseGroup::Proposal ? proposal_block : refutation_block)
          .push_back(std::move(ex));
    }
    game_ptrs.push_back(&er.game);
  }
  if (sp_p_total > 0) {
    rep.selfplay_p_correct = static_cast<double>(sp_p_correct) / sp_p_total;
  }
  if (sp_op_total > 0) {
    rep.selfplay_op_correct = static_cast<double>(sp_op_correct) / sp_op_total;
  }
  if (!proposal_block.empty()) {
    proposal_buffer_.push_iteration(std::move(proposal_block));
  }
  if (!refutation_block.empty()) {
    refutation_buffer_.push_iteration(std::move(refutation_block));
  }

  // 2. Snapshot, then train in place.
  Network old_proposal = proposal_;
  Network old_refutation = refutation_;
  Rng train_rng(derive_seed(iter_seed, 0x7261696eULL));
  rep.proposal_loss = train_one(proposal_, proposal_buffer_, cfg_, train_rng);
  rep.refutation_loss =
      train_one(refutation_, refutation_buffer_, cfg_, train_rng);

  // 3. Arena: newly trained vs pre-training snapshot.
  NetworkPairEvaluator new_eval(&proposal_, &refutation_, scale);
  NetworkPairEvaluator old_eval(&old_proposal, &old_refutation, scale);
  ArenaOutcome arena = run_arena(cfg_.game, new_eval, old_eval,
                                 cfg_.arena_rounds, cfg_.search, cfg_.workers);
  rep.arena_new_wins = arena.new_wins;
  rep.arena_old_wins = arena.old_wins;
  rep.arena_games = arena.games;
  rep.new_as_p_wins = arena.new_as_p_wins;
  rep.new_as_p_games = arena.new_as_p_games;
  rep.new_as_op_wins = arena.new_as_op_wins;
  rep.new_as_op_games = arena.new_as_op_games;
  rep.new_p_correct = correctness_ratio(arena.judged, AgentId::New, Role::P);
  rep.new_op_correct = correctness_ratio(arena.judged, AgentId::New, Role::OP);
  rep.old_p_correct = correctness_ratio(arena.judged, AgentId::Old, Role::P);
  rep.old_op_correct = correctness_ratio(arena.judged, AgentId::Old, Role::OP);
  if (arena.new_first_games > 0) {
    rep.propose_optimal_rate = static_cast<double>(arena.new_optimal_proposals) /
                               arena.new_first_games;
  }

  // 4. Coverage.
  if (!cfg_.game.complete && !enumeration_attempted_) {
    enumeration_attempted_ = true;
    try {
      total_states_ = enumerate_states(cfg_.game.k0, cfg_.game.q0,
                                       static_cast<int>(cfg_.game.n))
                          .count;
    } catch (const BudgetExceeded&) {
      total_states_ = std::nullopt;
    }
  }
  CoverageStats cov = coverage_metrics(game_ptrs, cfg_.game, total_states_);
  rep.mean_states = cov.mean;
  rep.max_states = cov.max;
  rep.coverage_ratio = cov.ratio;
  rep.total_states = cov.total;

  // 5. Optional acceptance gate.
  if (cfg_.gate_threshold > 0.0 && arena.games > 0) {
    double win_rate = static_cast<double>(arena.new_wins) / arena.games;
    if (win_rate < cfg_.gate_threshold) {
      proposal_ = std::move(old_proposal);
      refutation_ = std::move(old_refutation);
      rep.accepted = false;
    }
  }
  rep.proposal_buffer = proposal_buffer_.size();
  rep.refutation_buffer = refutation_buffer_.size();
  return rep;
}

double decider_probe(const GameSpec& game, const Evaluator& eval,
                     SearchConfig cfg) {
  if (!game.complete) {
    throw std::invalid_argument("decider_probe: requires the complete game");
  }
  cfg.temperature = 0.0;
  std::int64_t target = -1;
  try {
    target = optimal_proposal(game.k0, game.q0, game.n_max);
  } catch (const std::domain_error&) {
    target = -1;  // optimum not expressible; probe every n
  }
  int total = 0;
  int correct = 0;
  GameState root = game.root_state();
  for (std::int64_t n = 1; n <= game.n_max; ++n) {
    if (n == target) continue;
    GameState s = apply(root, Action::propose(static_cast<int>(n)));
    SearchResult res = search(s, eval, cfg);
    MoveRecord rec{s, mover(s), role_of(s, mover(s)),
                   res.actions[static_cast<std::size_t>(res.argmax_index)]};
    ++total;
    if (classify_move(rec) == MoveJudgment::Correct) ++correct;
  }
  return total == 0 ? 1.0 : static_cast<double>(correct) / total;
}

}  // namespace hsr
