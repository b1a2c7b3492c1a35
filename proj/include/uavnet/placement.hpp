#ifndef UAVNET_PLACEMENT_HPP
#define UAVNET_PLACEMENT_HPP

// Continuous 3-D movement control of a UAV fleet serving quasi-stationary
// users, learned with a deterministic-policy actor-critic and compared to
// random and one-step greedy movement.

#include "uavnet/channel.hpp"
#include "uavnet/env.hpp"
#include "uavnet/neural.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace uavnet::placement {

struct DrlConfig {
  int num_uavs = 2;
  int num_users = 100;
  double area_m = 2500.0;
  double h_min_m = 100.0;
  double h_max_m = 800.0;
  double tx_power_dbm = 24.0;
  double fc_ghz = 2.0;
  double bandwidth_hz = 10e6;
  double qos_min_bps = 1e6;
  double comm_range_m = 500.0;
  double d_max_m = 50.0;
  double slot_s = 1.0;
  int episode_slots = 50;
  env::EnergyModel energy{};
  double lambda_boundary = 1.0;
  double lambda_connectivity = 1.0;

  std::vector<int> hidden_sizes{400, 300};
  int episodes = 300;
  double gamma = 0.9;
  int replay_capacity = 100000;
  int batch_size = 64;
  double noise_scale = 0.2;
  double tau = 0.005;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  int warmup_steps = 1000;
  int eval_episodes = 20;
  int greedy_candidates = 10;
  // checkpoint selection; 0 keeps the final actor
  int validation_interval = 10;
  int validation_episodes = 5;

  void validate() const;
};

/// One (distance, pitch, yaw) triple per UAV.
using MovementAction = std::vector<env::UavMove>;

/// Greedy one-to-one association by descending rate. Pairs below qos_min are
/// never matched. Ties go to the lower UAV id, then the lower user id.
/// rates(j, i) is the rate of UAV j to user i. Returns user index per UAV, -1
/// when unmatched.
std::vector<int> associate_users(const Eigen::MatrixXd& rates, double qos_min_bps);

struct RewardBreakdown {
  double sum_rate = 0.0;
  double fairness = 1.0;
  double energy_j = 0.0;
  double penalty = 0.0;
  double reward = 0.0;
};

/// reward = Jain(cumulative) * sum_rate / energy - lambda_b [boundary] - lambda_c [disconnected]
RewardBreakdown compute_reward(const std::vector<double>& cumulative_rates, double sum_rate,
                               double energy_j, bool boundary_violated, bool disconnected,
                               double lambda_boundary = 1.0, double lambda_connectivity = 1.0);

/// True iff the UAV graph with edges between UAVs within comm_range is connected.
bool connectivity_ok(const std::vector<Vec3>& uav_positions, double comm_range_m);

/// Maps per-UAV components in [-1, 1] onto the movement bounds.
MovementAction decode_action(const Eigen::VectorXd& squashed, double d_max_m);

/// Inverse of decode_action for in-bounds moves.
Eigen::VectorXd encode_action(const MovementAction& action, double d_max_m);

struct StepOutcome {
  RewardBreakdown reward;
  std::vector<int> matching;
  bool boundary_violated = false;
  bool disconnected = false;
};

/// Episode simulator. Rates use the mean channel (path loss only) with the
/// UAV altitude clamped into the path-loss table's range.
class PlacementEnv {
public:
  PlacementEnv(const DrlConfig& cfg, std::uint64_t seed);

  const DrlConfig& config() const { return cfg_; }
  const env::World& world() const { return *world_; }
  int state_dim() const { return 3 * cfg_.num_uavs + cfg_.num_users + 1; }
  int action_dim() const { return 3 * cfg_.num_uavs; }

  /// Clustered start within comm_range/4 of a random centre.
  void reset(Rng& rng);
  Eigen::VectorXd state() const;
  StepOutcome step(const MovementAction& action);
  /// Outcome of `action` from the current state, leaving the episode untouched.
  StepOutcome preview(const MovementAction& action) const;
  bool done() const { return slot_ >= cfg_.episode_slots; }
  int slot() const { return slot_; }
  const std::vector<env::UavState>& uavs() const { return uavs_; }
  const std::vector<double>& cumulative_rates() const { return cumulative_; }
  /// rates(j, i) for the current UAV positions.
  Eigen::MatrixXd rate_matrix() const;

private:
  StepOutcome simulate(const MovementAction& action, std::vector<env::UavState>& uavs,
                       std::vector<double>& cumulative) const;
  Eigen::MatrixXd rates_for(const std::vector<env::UavState>& uavs) const;

  DrlConfig cfg_;
  std::shared_ptr<const env::World> world_;
  channel::ChannelParams params_;
  env::Airspace airspace_;
  std::vector<env::UavState> uavs_;
  std::vector<double> cumulative_;
  int slot_ = 0;
};

/// Actor output squashed to bounds plus Gaussian exploration noise, re-clipped.
MovementAction act(const neural::DenseNet<double>& actor, const Eigen::VectorXd& state,
                   double noise_scale, double d_max_m, Rng& rng);

enum class BaselineKind { Random, Greedy };

/// Random: uniform over action bounds. Greedy: best of `candidate_count`
/// uniform joint actions by simulated immediate reward (first wins ties).
MovementAction baseline_policy(BaselineKind kind, const PlacementEnv& env, int candidate_count,
                               Rng& rng);

struct EpisodeStats {
  double mean_reward = 0.0;
  double fairness = 1.0;  // Jain over cumulative rates at episode end
  double ee_bits_per_j = 0.0;
};

struct DrlResult {
  neural::DenseNet<double> actor;        // best validated checkpoint
  neural::DenseNet<double> final_actor;  // weights after the last episode
  std::vector<EpisodeStats> curve;
  int selected_episode = -1;             // episodes completed at the chosen checkpoint
  double validation_reward = 0.0;
  bool diverged = false;
  std::string error;
};

/// Mean per-step reward of the noise-free actor over the validation start
/// states, which are disjoint from the evaluation start states.
double validation_score(const DrlConfig& cfg, const neural::DenseNet<double>& actor,
                        std::uint64_t seed);

/// After warm-up, every validation_interval episodes and after the last one,
/// the actor is scored on the validation starts; the best-scoring checkpoint
/// is returned (earliest on ties).
DrlResult train_drl(const DrlConfig& cfg, std::uint64_t seed);

struct PolicyEvaluation {
  std::vector<double> drl;
  std::vector<double> greedy;
  std::vector<double> random;

  static double mean(const std::vector<double>& v);
};

/// Runs every policy on the same eval_episodes start states.
PolicyEvaluation evaluate_policies(const DrlConfig& cfg, const neural::DenseNet<double>& actor,
                                   std::uint64_t seed);

/// `seed,j,episode,mean_reward,fairness,ee`
void write_curve_csv(std::ostream& os, std::uint64_t seed, int num_uavs,
                     const std::vector<EpisodeStats>& curve, bool header);
/// `seed,j,policy_kind,episode,reward`
void write_eval_csv(std::ostream& os, std::uint64_t seed, int num_uavs,
                    const PolicyEvaluation& eval, bool header);

}  // namespace uavnet::placement

#endif  // UAVNET_PLACEMENT_HPP
