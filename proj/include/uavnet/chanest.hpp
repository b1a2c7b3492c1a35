#ifndef UAVNET_CHANEST_HPP
#define UAVNET_CHANEST_HPP

// Online neural estimation of UAV-to-ground channel gain. Each UAV owns a
// dense network mapping (UAV position, user position) to the measured gain
// in dB; networks are pre-trained offline and then keep training online
// while their predictions drive user scheduling.

#include "uavnet/channel.hpp"
#include "uavnet/env.hpp"
#include "uavnet/neural.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace uavnet::chanest {

struct EstimatorConfig {
  std::vector<int> hidden_sizes{512, 256};
  int pretrain_slots = 736;
  int online_slots = 500;
  int num_uavs = 3;
  double uav_altitude_m = 50.0;
  double bandwidth_hz = 10e6;
  double fc_ghz = 2.0;
  double tx_power_dbm = 24.0;
  int samples_per_slot = 50;  // users measured by each UAV per slot
  double slot_s = 1.0;
  // dB gain window mapped affinely onto [-1, 1]
  double gain_min_db = -160.0;
  double gain_max_db = -60.0;
  double feature_altitude_max_m = 100.0;
  double holdout_fraction = 0.2;
  int batches_per_slot = 2;
  int batch_size = 32;
  int replay_capacity = 20000;
  double learning_rate = 1e-3;
  double patrol_radius_m = 150.0;
  double patrol_period_slots = 300.0;
  double user_speed_min_mps = 0.5;
  double user_speed_max_mps = 1.5;
  env::EnergyModel energy{};

  void validate() const;
};

struct TrainingSample {
  Eigen::Matrix<double, 6, 1> features;
  double target = 0.0;  // normalized gain
  int uav_id = -1;
  int user_id = -1;
  bool holdout = false;
  channel::LinkSample link;
  double gain_db = 0.0;
};

/// Feature scaling: x, y by the area, z by feature_altitude_max_m, into [-1, 1].
/// Returns true if any coordinate had to be clamped.
bool encode_features(const EstimatorConfig& cfg, const env::WorldConfig& world, const Vec3& uav,
                     const Vec3& user, Eigen::Matrix<double, 6, 1>& out);

double normalize_gain_db(const EstimatorConfig& cfg, double gain_db);
double denormalize_gain(const EstimatorConfig& cfg, double normalized);

/// Urban scene with patrolling UAVs and mobile users.
class Scenario {
public:
  Scenario(const EstimatorConfig& cfg, const env::WorldConfig& world_cfg, std::uint64_t seed);

  const EstimatorConfig& config() const { return cfg_; }
  const env::World& world() const { return world_; }
  const channel::ChannelParams& channel_params() const { return params_; }
  int slot() const { return slot_; }
  const std::vector<Vec3>& uav_positions() const { return uav_positions_; }
  const std::vector<env::UserState>& users() const { return users_; }
  /// Users associated with a UAV (fixed round-robin split of the population).
  std::vector<int> users_of(int uav) const;
  /// Propulsion + hover energy each UAV spends per slot on its patrol.
  double uav_slot_energy_j() const;

  /// Moves UAVs along their patrol circles and users by random waypoint.
  void advance();

  /// One measured sample per active UAV-user link this slot.
  std::vector<TrainingSample> collect_slot_samples();

private:
  Vec3 patrol_position(int uav, int slot) const;

  EstimatorConfig cfg_;
  env::World world_;
  channel::ChannelParams params_;
  std::vector<Vec3> patrol_centers_;
  std::vector<Vec3> uav_positions_;
  std::vector<env::UserState> users_;
  Rng mobility_rng_;
  Rng fading_rng_;
  int slot_ = 0;
};

/// Recomputes a sample's normalized target from its stored link record.
double target_from_link(const EstimatorConfig& cfg, const channel::LinkSample& link);

class GainEstimator {
public:
  GainEstimator(const EstimatorConfig& cfg, const env::WorldConfig& world, std::uint64_t seed);

  /// De-normalized gain prediction in dB. Out-of-range positions are clamped
  /// and counted.
  double predict_gain_db(const Vec3& uav, const Vec3& user) const;
  Eigen::VectorXd predict_normalized(const std::vector<const TrainingSample*>& samples) const;

  /// Adds samples to the replay memory and runs the configured minibatch
  /// updates. Returns the mean pre-update minibatch loss (0 if nothing trained).
  double train(const std::vector<const TrainingSample*>& samples);

  const neural::DenseNet<double>& net() const { return net_; }
  long clamp_count() const { return clamp_count_; }

private:
  EstimatorConfig cfg_;
  env::WorldConfig world_cfg_;
  neural::DenseNet<double> net_;
  neural::AdamOptimizer<double> optimizer_;
  std::vector<Eigen::Matrix<double, 6, 1>> replay_x_;
  std::vector<double> replay_y_;
  std::size_t replay_next_ = 0;
  Rng rng_;
  mutable long clamp_count_ = 0;
};

struct SlotEnergyEfficiency {
  double predicted = 0.0;  // bits/J, users chosen by estimated gain
  double perfect = 0.0;    // bits/J, users chosen by true gain
};

/// Each UAV serves the one associated user with the highest gain estimate;
/// realized throughput always uses the true channel. `estimated_db` is
/// parallel to `samples`.
SlotEnergyEfficiency evaluate_slot_ee(const Scenario& scenario,
                                      const std::vector<TrainingSample>& samples,
                                      const std::vector<double>& estimated_db);

struct PhaseCurve {
  // mse[slot][uav] on held-out samples, evaluated before the slot's update
  std::vector<std::vector<double>> mse;
  std::vector<SlotEnergyEfficiency> ee;  // online phase only

  /// Mean over UAVs for one slot.
  double slot_mse(std::size_t slot) const;
};

struct OfflineResult {
  std::vector<GainEstimator> estimators;
  PhaseCurve curve;
};

OfflineResult run_offline_phase(Scenario& scenario, const EstimatorConfig& cfg,
                                std::uint64_t seed);

/// Online predict -> measure -> train loop. With `oracle_predictor`, the true
/// gains stand in for predictions (EE ratio is then exactly 1).
PhaseCurve run_online_phase(Scenario& scenario, std::vector<GainEstimator>& estimators,
                            const EstimatorConfig& cfg, bool oracle_predictor = false);

struct ChanestRun {
  PhaseCurve offline;
  PhaseCurve online;
};

ChanestRun run_chanest(const EstimatorConfig& cfg, const env::WorldConfig& world_cfg,
                       std::uint64_t seed);

/// `seed,slot,uav_id,mse` rows; slots are numbered from 1 across both phases.
void write_mse_csv(std::ostream& os, std::uint64_t seed, const ChanestRun& run, bool header);
/// `seed,slot,ee_predicted,ee_perfect` rows for the online phase.
void write_ee_csv(std::ostream& os, std::uint64_t seed, const ChanestRun& run,
                  int first_online_slot, bool header);

}  // namespace uavnet::chanest

#endif  // UAVNET_CHANEST_HPP
