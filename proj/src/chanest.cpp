#include "uavnet/chanest.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace uavnet::chanest {

void EstimatorConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("chanest: " + what); };
  if (pretrain_slots <= 0 || online_slots <= 0) fail("slot counts must be positive");
  if (num_uavs <= 0) fail("num_uavs must be positive");
  if (samples_per_slot <= 0) fail("samples_per_slot must be positive");
  if (hidden_sizes.empty()) fail("hidden_sizes must not be empty");
  for (int h : hidden_sizes) {
    if (h <= 0) fail("hidden sizes must be positive");
  }
  if (!(gain_max_db > gain_min_db)) fail("gain_max_db must exceed gain_min_db");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) fail("holdout_fraction in [0, 1)");
  if (batches_per_slot < 0 || batch_size <= 0 || replay_capacity <= 0) {
    fail("training schedule values must be positive");
  }
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (!(uav_altitude_m > 0.0 && uav_altitude_m <= feature_altitude_max_m)) {
    fail("uav_altitude_m must lie in (0, feature_altitude_max_m]");
  }
  if (!(slot_s > 0.0) || !(patrol_period_slots > 0.0) || patrol_radius_m < 0.0) {
    fail("slot and patrol parameters must be positive");
  }
}

bool encode_features(const EstimatorConfig& cfg, const env::WorldConfig& world, const Vec3& uav,
                     const Vec3& user, Eigen::Matrix<double, 6, 1>& out) {
  const double scale[3] = {world.area_x_m, world.area_y_m, cfg.feature_altitude_max_m};
  bool clamped = false;
  for (int k = 0; k < 3; ++k) {
    const double a = 2.0 * uav[k] / scale[k] - 1.0;
    const double b = 2.0 * user[k] / scale[k] - 1.0;
    out[k] = std::clamp(a, -1.0, 1.0);
    out[3 + k] = std::clamp(b, -1.0, 1.0);
    clamped = clamped || out[k] != a || out[3 + k] != b;
  }
  return clamped;
}

double normalize_gain_db(const EstimatorConfig& cfg, double gain_db) {
  return 2.0 * (gain_db - cfg.gain_min_db) / (cfg.gain_max_db - cfg.gain_min_db) - 1.0;
}

double denormalize_gain(const EstimatorConfig& cfg, double normalized) {
  return cfg.gain_min_db + (normalized + 1.0) * 0.5 * (cfg.gain_max_db - cfg.gain_min_db);
}

double target_from_link(const EstimatorConfig& cfg, const channel::LinkSample& link) {
  const double gain_db = -link.path_loss_db + 10.0 * std::log10(link.small_scale_power_gain);
  return normalize_gain_db(cfg, gain_db);
}

namespace {

env::WorldConfig scenario_world(const EstimatorConfig& cfg, env::WorldConfig world,
                                std::uint64_t seed) {
  world.num_users = cfg.num_uavs * cfg.samples_per_slot;
  world.user_mobility = env::Mobility::RandomWaypoint;
  world.user_speed_min_mps = cfg.user_speed_min_mps;
  world.user_speed_max_mps = cfg.user_speed_max_mps;
  world.seed = seed;
  return world;
}

}  // namespace

Scenario::Scenario(const EstimatorConfig& cfg, const env::WorldConfig& world_cfg,
                   std::uint64_t seed)
    : cfg_(cfg),
      world_(env::generate_world(scenario_world(cfg, world_cfg, seed))),
      params_(channel::make_params(cfg.fc_ghz, cfg.bandwidth_hz)),
      users_(world_.users()),
      mobility_rng_(derive_seed(seed, 0x4d4f42ULL)),
      fading_rng_(derive_seed(seed, 0x464144ULL)) {
  cfg_.validate();
  const auto& w = world_.config();
  const Vec3 centre(0.5 * w.area_x_m, 0.5 * w.area_y_m, cfg.uav_altitude_m);
  const double ring = 0.25 * std::min(w.area_x_m, w.area_y_m);
  for (int j = 0; j < cfg.num_uavs; ++j) {
    const double phi = 2.0 * M_PI * j / cfg.num_uavs;
    patrol_centers_.push_back(centre + ring * Vec3(std::cos(phi), std::sin(phi), 0.0));
    uav_positions_.push_back(patrol_position(j, 0));
  }
}

Vec3 Scenario::patrol_position(int uav, int slot) const {
  const double phase =
      2.0 * M_PI * (slot / cfg_.patrol_period_slots + static_cast<double>(uav) / cfg_.num_uavs);
  return patrol_centers_[uav] +
         cfg_.patrol_radius_m * Vec3(std::cos(phase), std::sin(phase), 0.0);
}

std::vector<int> Scenario::users_of(int uav) const {
  std::vector<int> ids;
  for (int i = uav; i < static_cast<int>(users_.size()); i += cfg_.num_uavs) ids.push_back(i);
  return ids;
}

double Scenario::uav_slot_energy_j() const {
  const double chord = 2.0 * cfg_.patrol_radius_m * std::sin(M_PI / cfg_.patrol_period_slots);
  return cfg_.energy.slot_energy_j(chord, cfg_.slot_s);
}

void Scenario::advance() {
  ++slot_;
  for (int j = 0; j < cfg_.num_uavs; ++j) uav_positions_[j] = patrol_position(j, slot_);
  env::step_users(users_, world_.config(), cfg_.slot_s, mobility_rng_);
}

std::vector<TrainingSample> Scenario::collect_slot_samples() {
  std::vector<TrainingSample> samples;
  samples.reserve(users_.size());
  for (int j = 0; j < cfg_.num_uavs; ++j) {
    const auto ids = users_of(j);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      TrainingSample s;
      s.uav_id = j;
      s.user_id = ids[k];
      const Vec3& user = users_[ids[k]].position;
      s.link = channel::evaluate_utg_link(world_, j, uav_positions_[j], ids[k], user,
                                          cfg_.tx_power_dbm, params_, fading_rng_);
      s.gain_db = -s.link.path_loss_db + 10.0 * std::log10(s.link.small_scale_power_gain);
      s.target = normalize_gain_db(cfg_, s.gain_db);
      encode_features(cfg_, world_.config(), uav_positions_[j], user, s.features);
      // Every 1/f-th sample of each UAV is held out.
      const double f = cfg_.holdout_fraction;
      s.holdout = std::floor((k + 1) * f) > std::floor(k * f);
      samples.push_back(s);
    }
  }
  return samples;
}

GainEstimator::GainEstimator(const EstimatorConfig& cfg, const env::WorldConfig& world,
                             std::uint64_t seed)
    : cfg_(cfg), world_cfg_(world), optimizer_(cfg.learning_rate), rng_(seed) {
  std::vector<int> sizes{6};
  sizes.insert(sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  sizes.push_back(1);
  Rng init(derive_seed(seed, 0x494e4954ULL));
  net_ = neural::DenseNet<double>(sizes, neural::Activation::Relu, neural::Activation::Identity,
                                  init);
}

double GainEstimator::predict_gain_db(const Vec3& uav, const Vec3& user) const {
  Eigen::Matrix<double, 6, 1> x;
  if (encode_features(cfg_, world_cfg_, uav, user, x)) ++clamp_count_;
  return denormalize_gain(cfg_, net_.forward(x)[0]);
}

Eigen::VectorXd GainEstimator::predict_normalized(
    const std::vector<const TrainingSample*>& samples) const {
  if (samples.empty()) return {};
  Eigen::MatrixXd x(6, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) x.col(i) = samples[i]->features;
  return net_.forward_batch(x).row(0).transpose();
}

double GainEstimator::train(const std::vector<const TrainingSample*>& samples) {
  for (const auto* s : samples) {
    if (replay_x_.size() < static_cast<std::size_t>(cfg_.replay_capacity)) {
      replay_x_.push_back(s->features);
      replay_y_.push_back(s->target);
    } else {
      replay_x_[replay_next_] = s->features;
      replay_y_[replay_next_] = s->target;
      replay_next_ = (replay_next_ + 1) % replay_x_.size();
    }
  }
  if (replay_x_.empty() || cfg_.batches_per_slot == 0) return 0.0;
  const int batch = std::min<int>(cfg_.batch_size, static_cast<int>(replay_x_.size()));
  Eigen::MatrixXd x(6, batch);
  Eigen::MatrixXd y(1, batch);
  double total = 0.0;
  for (int b = 0; b < cfg_.batches_per_slot; ++b) {
    for (int i = 0; i < batch; ++i) {
      const auto idx = static_cast<std::size_t>(rng_() % replay_x_.size());
      x.col(i) = replay_x_[idx];
      y(0, i) = replay_y_[idx];
    }
    total += neural::train_step(net_, x, y, optimizer_);
  }
  return total / cfg_.batches_per_slot;
}

SlotEnergyEfficiency evaluate_slot_ee(const Scenario& scenario,
                                      const std::vector<TrainingSample>& samples,
                                      const std::vector<double>& estimated_db) {
  const auto& cfg = scenario.config();
  std::vector<int> pick_estimated(cfg.num_uavs, -1);
  std::vector<int> pick_true(cfg.num_uavs, -1);
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const int j = samples[i].uav_id;
    if (pick_estimated[j] < 0 || estimated_db[i] > estimated_db[pick_estimated[j]]) {
      pick_estimated[j] = i;
    }
    if (pick_true[j] < 0 || samples[i].gain_db > samples[pick_true[j]].gain_db) pick_true[j] = i;
  }
  double bits_estimated = 0.0;
  double bits_true = 0.0;
  for (int j = 0; j < cfg.num_uavs; ++j) {
    if (pick_estimated[j] >= 0) bits_estimated += samples[pick_estimated[j]].link.capacity_bps;
    if (pick_true[j] >= 0) bits_true += samples[pick_true[j]].link.capacity_bps;
  }
  const double tx_w = std::pow(10.0, (cfg.tx_power_dbm - 30.0) / 10.0);
  const double joules = cfg.num_uavs * (scenario.uav_slot_energy_j() + tx_w * cfg.slot_s);
  return {bits_estimated * cfg.slot_s / joules, bits_true * cfg.slot_s / joules};
}

double PhaseCurve::slot_mse(std::size_t slot) const {
  const auto& row = mse.at(slot);
  double sum = 0.0;
  for (double v : row) sum += v;
  return row.empty() ? 0.0 : sum / static_cast<double>(row.size());
}

namespace {

// Splits one slot's samples per UAV into held-out and training pointers.
struct SlotSplit {
  std::vector<std::vector<const TrainingSample*>> holdout;
  std::vector<std::vector<const TrainingSample*>> train;
  std::vector<std::vector<const TrainingSample*>> all;
};

SlotSplit split_samples(const std::vector<TrainingSample>& samples, int num_uavs) {
  SlotSplit split;
  split.holdout.resize(num_uavs);
  split.train.resize(num_uavs);
  split.all.resize(num_uavs);
  for (const auto& s : samples) {
    (s.holdout ? split.holdout : split.train)[s.uav_id].push_back(&s);
    split.all[s.uav_id].push_back(&s);
  }
  return split;
}

double holdout_mse(const GainEstimator& est, const std::vector<const TrainingSample*>& holdout) {
  if (holdout.empty()) return 0.0;
  const Eigen::VectorXd pred = est.predict_normalized(holdout);
  double sum = 0.0;
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    const double e = pred[static_cast<Eigen::Index>(i)] - holdout[i]->target;
    sum += e * e;
  }
  const double mse = sum / static_cast<double>(holdout.size());
  if (!std::isfinite(mse)) throw DivergenceError("chanest: non-finite held-out MSE");
  return mse;
}

}  // namespace

OfflineResult run_offline_phase(Scenario& scenario, const EstimatorConfig& cfg,
                                std::uint64_t seed) {
  cfg.validate();
  OfflineResult result;
  for (int j = 0; j < cfg.num_uavs; ++j) {
    result.estimators.emplace_back(cfg, scenario.world().config(),
                                   derive_seed(seed, 0x455354ULL + static_cast<unsigned>(j)));
  }
  for (int t = 0; t < cfg.pretrain_slots; ++t) {
    scenario.advance();
    const auto samples = scenario.collect_slot_samples();
    const SlotSplit split = split_samples(samples, cfg.num_uavs);
    std::vector<double> row(cfg.num_uavs);
    for (int j = 0; j < cfg.num_uavs; ++j) {
      row[j] = holdout_mse(result.estimators[j], split.holdout[j]);
      result.estimators[j].train(split.train[j]);
    }
    result.curve.mse.push_back(std::move(row));
  }
  return result;
}

PhaseCurve run_online_phase(Scenario& scenario, std::vector<GainEstimator>& estimators,
                            const EstimatorConfig& cfg, bool oracle_predictor) {
  PhaseCurve curve;
  for (int t = 0; t < cfg.online_slots; ++t) {
    scenario.advance();
    const auto samples = scenario.collect_slot_samples();
    const SlotSplit split = split_samples(samples, cfg.num_uavs);

    // Predict before the measurements are used for anything.
    std::vector<double> estimated_db(samples.size());
    for (int j = 0; j < cfg.num_uavs; ++j) {
      const auto& mine = split.all[j];
      if (oracle_predictor) {
        for (const auto* s : mine) estimated_db[s - samples.data()] = s->gain_db;
        continue;
      }
      const Eigen::VectorXd pred = estimators[j].predict_normalized(mine);
      for (std::size_t i = 0; i < mine.size(); ++i) {
        estimated_db[mine[i] - samples.data()] =
            denormalize_gain(cfg, pred[static_cast<Eigen::Index>(i)]);
      }
    }
    curve.ee.push_back(evaluate_slot_ee(scenario, samples, estimated_db));

    std::vector<double> row(cfg.num_uavs);
    for (int j = 0; j < cfg.num_uavs; ++j) {
      row[j] = holdout_mse(estimators[j], split.holdout[j]);
      estimators[j].train(split.train[j]);
    }
    curve.mse.push_back(std::move(row));
  }
  return curve;
}

ChanestRun run_chanest(const EstimatorConfig& cfg, const env::WorldConfig& world_cfg,
                       std::uint64_t seed) {
  Scenario scenario(cfg, world_cfg, seed);
  OfflineResult offline = run_offline_phase(scenario, cfg, seed);
  ChanestRun run;
  run.online = run_online_phase(scenario, offline.estimators, cfg);
  run.offline = std::move(offline.curve);
  return run;
}

void write_mse_csv(std::ostream& os, std::uint64_t seed, const ChanestRun& run, bool header) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  if (header) buf << "seed,slot,uav_id,mse\n";
  buf << std::setprecision(10);
  int slot = 1;
  for (const auto* phase : {&run.offline, &run.online}) {
    for (const auto& row : phase->mse) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        buf << seed << ',' << slot << ',' << j << ',' << row[j] << '\n';
      }
      ++slot;
    }
  }
  os << buf.str();
}

void write_ee_csv(std::ostream& os, std::uint64_t seed, const ChanestRun& run,
                  int first_online_slot, bool header) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  if (header) buf << "seed,slot,ee_predicted,ee_perfect\n";
  buf << std::setprecision(10);
  int slot = first_online_slot;
  for (const auto& ee : run.online.ee) {
    buf << seed << ',' << slot++ << ',' << ee.predicted << ',' << ee.perfect << '\n';
  }
  os << buf.str();
}

}  // namespace uavnet::chanest
