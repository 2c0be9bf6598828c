#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_set>
#include <vector>

#include "hsr/evaluator.hpp"
#include "hsr/game.hpp"
#include "hsr/mcts.hpp"
#include "hsr/network.hpp"
#include "hsr/oracle.hpp"
#include "hsr/rng.hpp"

namespace hsr {

// Which replay buffer / network a phase belongs to.
enum class PhaseGroup : std::uint8_t { Proposal, Refutation };

PhaseGroup phase_group(Phase phase);

struct TrainingExample {
  EncodedState state;
  PhaseGroup group = PhaseGroup::Refutation;
  Role mover_role = Role::P;
  PlayerId mover = PlayerId::First;
  std::vector<double> pi;  // target over the mover's full head space
  double z = 0.0;          // +1 if the mover won the episode, else -1
};

// FIFO of per-iteration example blocks; the oldest iteration falls off when
// capacity is reached.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity_iterations)
      : capacity_(capacity_iterations) {}

  void push_iteration(std::vector<TrainingExample> block);
  std::size_t size() const { return total_; }
  std::size_t iteration_blocks() const { return blocks_.size(); }
  std::vector<const TrainingExample*> all() const;

 private:
  int capacity_;
  std::size_t total_ = 0;
  std::deque<std::vector<TrainingExample>> blocks_;
};

// The instance being trained or played: either the complete game (proposal
// included, candidate counts up to n_max) or a fixed-size refutation game.
struct GameSpec {
  bool complete = false;
  int k0 = 1;
  int q0 = 1;
  std::int64_t n_max = 1;  // proposal bound; for refutation games equals n
  std::int64_t n = 1;      // refutation root size (ignored when complete)

  GameState root_state() const;
  int head_p_size() const { return static_cast<int>(n_max) + 1; }
  InputScale scale() const { return InputScale{k0, q0, n_max}; }
};

struct PipelineConfig {
  GameSpec game;
  SearchConfig search;  // self-play settings (temperature typically 1)
  int episodes = 100;
  int arena_rounds = 20;  // per side: new-as-OP rounds, then new-as-P rounds
  int buffer_iterations = 20;
  int epochs = 10;
  int batch_size = 64;
  TrainHyper hyper;
  // Minimum arena win fraction for the trained net to be kept; 0 = always
  // keep (arena is measurement only).
  double gate_threshold = 0.0;
  int workers = 1;
  std::uint64_t seed = 0;
  NetConfig net_template;  // head_p_size is overridden from `game`
};

struct PlayedGame {
  std::vector<MoveRecord> moves;
  std::vector<std::vector<double>> head_pi;  // per move, full head space
  std::vector<std::int64_t> inserted_per_move;
  std::unordered_set<std::uint64_t> accessed;  // canonical state keys
  PlayerId winner = PlayerId::First;
};

// One game with per-player evaluators. sampler == nullptr plays argmax
// (deterministic evaluation mode); otherwise moves are sampled from the
// temperature-adjusted search policy.
PlayedGame play_game(const GameSpec& game, const Evaluator& first_eval,
                     const Evaluator& second_eval, const SearchConfig& cfg,
                     Rng* sampler);

struct EpisodeResult {
  std::vector<TrainingExample> examples;
  PlayedGame game;
};

// Self-play episode: both sides share `eval`, moves sampled from pi, outcome
// z assigned to every example from its mover's perspective.
EpisodeResult run_episode(const GameSpec& game, const Evaluator& eval,
                          const SearchConfig& cfg, Rng& rng);

enum class AgentId : std::uint8_t { New, Old };

struct JudgedMove {
  MoveRecord rec;
  AgentId agent = AgentId::New;
  MoveJudgment judgment = MoveJudgment::Incorrect;
};

// Correct / total for the agent's moves made in the given role; absent when
// the agent never moved in that role. NoCorrectExists counts as incorrect.
std::optional<double> correctness_ratio(const std::vector<JudgedMove>& moves,
                                        AgentId agent, Role role);

struct ArenaOutcome {
  int new_wins = 0;
  int old_wins = 0;
  int games = 0;
  // Split by the new agent's seat: First starts as claimer (role P).
  int new_as_p_wins = 0;
  int new_as_p_games = 0;
  int new_as_op_wins = 0;
  int new_as_op_games = 0;
  std::vector<JudgedMove> judged;
  // Complete games only: how often the new agent, playing First, opened with
  // the optimal proposal.
  int new_first_games = 0;
  int new_optimal_proposals = 0;
};

// rounds_per_side games with the new agent as Second (starting role OP),
// then rounds_per_side with the new agent as First. Deterministic argmax
// play on both sides.
ArenaOutcome run_arena(const GameSpec& game, const Evaluator& new_eval,
                       const Evaluator& old_eval, int rounds_per_side,
                       SearchConfig cfg, int workers);

struct CoverageStats {
  double mean = 0.0;
  std::int64_t max = 0;
  std::optional<double> ratio;
  std::optional<std::int64_t> total;
};

// Mean/max of per-episode accessed-state counts; ratio against the
// enumerated reachable-state total for refutation games (absent when the
// enumeration budget is exceeded or the game is the complete one).
CoverageStats coverage_metrics(const std::vector<const PlayedGame*>& games,
                               const GameSpec& game,
                               std::optional<std::int64_t> total);

struct IterationReport {
  int iteration = 0;
  int episodes = 0;
  std::optional<double> new_p_correct;
  std::optional<double> new_op_correct;
  std::optional<double> old_p_correct;
  std::optional<double> old_op_correct;
  std::optional<double> selfplay_p_correct;
  std::optional<double> selfplay_op_correct;
  int arena_new_wins = 0;
  int arena_old_wins = 0;
  int arena_games = 0;
  int new_as_p_wins = 0;
  int new_as_p_games = 0;
  int new_as_op_wins = 0;
  int new_as_op_games = 0;
  double mean_states = 0.0;
  std::int64_t max_states = 0;
  std::optional<double> coverage_ratio;
  std::optional<std::int64_t> total_states;
  std::size_t proposal_buffer = 0;
  std::size_t refutation_buffer = 0;
  std::optional<double> proposal_loss;
  std::optional<double> refutation_loss;
  std::optional<double> propose_optimal_rate;
  bool accepted = true;
};

// Self-play -> buffers -> training -> arena, one call per iteration.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg);

  IterationReport run_iteration();

  int iteration() const { return iteration_; }
  const PipelineConfig& config() const { return cfg_; }
  const Network& proposal_net() const { return proposal_; }
  const Network& refutation_net() const { return refutation_; }

  // Resume support: install previously saved networks and continue counting
  // from `iteration`.
  void restore(Network proposal, Network refutation, int iteration);

 private:
  PipelineConfig cfg_;
  Network proposal_;
  Network refutation_;
  ReplayBuffer proposal_buffer_;
  ReplayBuffer refutation_buffer_;
  int iteration_ = 0;
  bool enumeration_attempted_ = false;
  std::optional<std::int64_t> total_states_;
};

// Complete games only: searches every decision position n in [1, n_max]
// except the optimal proposal and checks the chosen action against the
// ground truth. Returns the fraction of correct choices.
double decider_probe(const GameSpec& game, const Evaluator& eval,
                     SearchConfig cfg);

NetConfig make_net_config(const NetConfig& tmpl, const GameSpec& game,
                          std::uint64_t init_seed);

}  // namespace hsr
