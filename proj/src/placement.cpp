#include "uavnet/placement.hpp"

#include "uavnet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace uavnet::placement {

void DrlConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("placement: " + what); };
  if (num_uavs < 1) fail("num_uavs must be >= 1");
  if (num_users < 1) fail("n_users must be >= 1");
  if (!(area_m > 0.0)) fail("area_m must be positive");
  if (!(h_min_m > 0.0 && h_max_m > h_min_m)) fail("need 0 < h_min_m < h_max_m");
  if (!(d_max_m >= 0.0) || !(comm_range_m > 0.0) || !(slot_s > 0.0)) {
    fail("d_max_m, comm_range_m and slot_s must be positive");
  }
  if (qos_min_bps < 0.0) fail("qos_min_bps must be >= 0");
  if (episode_slots < 1 || episodes < 0 || eval_episodes < 0) fail("episode counts invalid");
  if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) fail("tau in (0, 1]");
  if (batch_size < 1 || replay_capacity < batch_size) fail("replay_capacity >= batch_size >= 1");
  if (noise_scale < 0.0) fail("noise_scale must be >= 0");
  if (!(actor_lr > 0.0 && critic_lr > 0.0)) fail("learning rates must be positive");
  if (warmup_steps < 0 || greedy_candidates < 1) fail("warmup_steps/greedy_candidates invalid");
  if (validation_interval < 0 || validation_episodes < 0) fail("validation settings must be >= 0");
  if (validation_interval > 0 && validation_episodes < 1) fail("validation_episodes must be >= 1");
  if (hidden_sizes.empty()) fail("hidden_sizes must not be empty");
  for (int h : hidden_sizes) {
    if (h <= 0) fail("hidden sizes must be positive");
  }
}

std::vector<int> associate_users(const Eigen::MatrixXd& rates, double qos_min_bps) {
  struct Pair {
    double rate;
    int uav;
    int user;
  };
  std::vector<Pair> pairs;
  for (int j = 0; j < rates.rows(); ++j) {
    for (int i = 0; i < rates.cols(); ++i) {
      if (rates(j, i) >= qos_min_bps) pairs.push_back({rates(j, i), j, i});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    if (a.uav != b.uav) return a.uav < b.uav;
    return a.user < b.user;
  });
  std::vector<int> match(rates.rows(), -1);
  std::vector<char> taken(rates.cols(), 0);
  for (const auto& p : pairs) {
    if (match[p.uav] >= 0 || taken[p.user]) continue;
    match[p.uav] = p.user;
    taken[p.user] = 1;
  }
  return match;
}

RewardBreakdown compute_reward(const std::vector<double>& cumulative_rates, double sum_rate,
                               double energy_j, bool boundary_violated, bool disconnected,
                               double lambda_boundary, double lambda_connectivity) {
  if (!(energy_j > 0.0)) throw std::invalid_argument("compute_reward: energy must be positive");
  RewardBreakdown r;
  r.sum_rate = sum_rate;
  r.fairness = metrics::jain_index(cumulative_rates);
  r.energy_j = energy_j;
  r.penalty = (boundary_violated ? lambda_boundary : 0.0) +
              (disconnected ? lambda_connectivity : 0.0);
  r.reward = r.fairness * sum_rate / energy_j - r.penalty;
  return r;
}

bool connectivity_ok(const std::vector<Vec3>& uav_positions, double comm_range_m) {
  const std::size_t n = uav_positions.size();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t a = stack.back();
    stack.pop_back();
    for (std::size_t b = 0; b < n; ++b) {
      if (seen[b] || (uav_positions[a] - uav_positions[b]).norm() > comm_range_m) continue;
      seen[b] = 1;
      ++reached;
      stack.push_back(b);
    }
  }
  return reached == n;
}

MovementAction decode_action(const Eigen::VectorXd& squashed, double d_max_m) {
  if (squashed.size() % 3 != 0) throw std::invalid_argument("decode_action: size not 3*J");
  MovementAction action(squashed.size() / 3);
  for (std::size_t j = 0; j < action.size(); ++j) {
    const double a = std::clamp(squashed[3 * j], -1.0, 1.0);
    const double p = std::clamp(squashed[3 * j + 1], -1.0, 1.0);
    const double y = std::clamp(squashed[3 * j + 2], -1.0, 1.0);
    action[j].distance_m = 0.5 * (a + 1.0) * d_max_m;
    action[j].pitch_rad = p * M_PI / 2.0;
    double yaw = (y + 1.0) * M_PI;
    if (yaw >= 2.0 * M_PI) yaw -= 2.0 * M_PI;
    action[j].yaw_rad = yaw;
  }
  return action;
}

Eigen::VectorXd encode_action(const MovementAction& action, double d_max_m) {
  Eigen::VectorXd out(3 * action.size());
  for (std::size_t j = 0; j < action.size(); ++j) {
    out[3 * j] = d_max_m > 0.0 ? 2.0 * action[j].distance_m / d_max_m - 1.0 : -1.0;
    out[3 * j + 1] = action[j].pitch_rad / (M_PI / 2.0);
    out[3 * j + 2] = action[j].yaw_rad / M_PI - 1.0;
  }
  return out;
}

namespace {

env::WorldConfig placement_world(const DrlConfig& cfg, std::uint64_t seed) {
  env::WorldConfig w;
  w.area_x_m = cfg.area_m;
  w.area_y_m = cfg.area_m;
  w.gcs_position = Vec3(0.0, 0.5 * cfg.area_m, 0.0);
  w.num_users = cfg.num_users;
  w.user_mobility = env::Mobility::QuasiStationary;
  w.seed = derive_seed(seed, 0x574f524c44ULL);
  return w;
}

constexpr double kMbit = 1e-6;

}  // namespace

PlacementEnv::PlacementEnv(const DrlConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      world_(std::make_shared<const env::World>(env::generate_world(placement_world(cfg, seed)))),
      params_(channel::make_params(cfg.fc_ghz, cfg.bandwidth_hz)),
      uavs_(cfg.num_uavs),
      cumulative_(cfg.num_users, 0.0) {
  cfg_.validate();
  airspace_.x_max_m = cfg.area_m;
  airspace_.y_max_m = cfg.area_m;
  airspace_.h_min_m = cfg.h_min_m;
  airspace_.h_max_m = cfg.h_max_m;
  for (auto& u : uavs_) {
    u.h_min_m = cfg.h_min_m;
    u.h_max_m = cfg.h_max_m;
    u.tx_power_dbm = cfg.tx_power_dbm;
    u.position = Vec3(0.5 * cfg.area_m, 0.5 * cfg.area_m, cfg.h_min_m);
  }
}

void PlacementEnv::reset(Rng& rng) {
  const double spread = 0.25 * cfg_.comm_range_m;
  const double margin = std::min(spread, 0.5 * cfg_.area_m);
  const Vec3 centre(uniform(rng, margin, cfg_.area_m - margin),
                    uniform(rng, margin, cfg_.area_m - margin),
                    uniform(rng, cfg_.h_min_m, std::min(cfg_.h_max_m, cfg_.h_min_m + 200.0)));
  // Per-UAV offsets inside a ball of radius spread/2 keep every pair within spread.
  for (auto& u : uavs_) {
    Vec3 offset;
    do {
      offset = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
    } while (offset.norm() > 1.0);
    u.position = airspace_.clip(centre + 0.5 * spread * offset);
    u.cumulative_energy_j = 0.0;
  }
  std::fill(cumulative_.begin(), cumulative_.end(), 0.0);
  slot_ = 0;
}

Eigen::VectorXd PlacementEnv::state() const {
  Eigen::VectorXd s(state_dim());
  const int J = cfg_.num_uavs;
  for (int j = 0; j < J; ++j) {
    const Vec3& p = uavs_[j].position;
    s[3 * j] = 2.0 * p.x() / cfg_.area_m - 1.0;
    s[3 * j + 1] = 2.0 * p.y() / cfg_.area_m - 1.0;
    s[3 * j + 2] = 2.0 * (p.z() - cfg_.h_min_m) / (cfg_.h_max_m - cfg_.h_min_m) - 1.0;
  }
  const double top = *std::max_element(cumulative_.begin(), cumulative_.end());
  for (int i = 0; i < cfg_.num_users; ++i) {
    s[3 * J + i] = top > 0.0 ? cumulative_[i] / top : 0.0;
  }
  s[3 * J + cfg_.num_users] = 2.0 * slot_ / cfg_.episode_slots - 1.0;
  return s;
}

Eigen::MatrixXd PlacementEnv::rates_for(const std::vector<env::UavState>& uavs) const {
  Eigen::MatrixXd rates(cfg_.num_uavs, cfg_.num_users);
  const auto& users = world_->users();
  const double h_lo = std::nextafter(channel::kUtgMinAltitudeM, channel::kUtgMaxAltitudeM);
  for (int j = 0; j < cfg_.num_uavs; ++j) {
    const Vec3& a = uavs[j].position;
    const double h = std::clamp(a.z(), h_lo, channel::kUtgMaxAltitudeM);
    for (int i = 0; i < cfg_.num_users; ++i) {
      const Vec3& b = users[i].position;
      const double d = std::max((a - b).norm(), 1.0);
      const double pl = channel::utg_path_loss_db(d, h, cfg_.fc_ghz, world_->is_los(a, b));
      rates(j, i) = channel::link_capacity_bps(uavs[j].tx_power_dbm, pl, 1.0,
                                               params_.noise_power_dbm, params_.bandwidth_hz);
    }
  }
  return rates;
}

Eigen::MatrixXd PlacementEnv::rate_matrix() const { return rates_for(uavs_); }

StepOutcome PlacementEnv::simulate(const MovementAction& action, std::vector<env::UavState>& uavs,
                                   std::vector<double>& cumulative) const {
  if (action.size() != uavs.size()) throw std::invalid_argument("PlacementEnv: action size");
  StepOutcome out;
  double energy = 0.0;
  std::vector<Vec3> positions;
  for (std::size_t j = 0; j < uavs.size(); ++j) {
    const auto res = env::step_uav(uavs[j], action[j], cfg_.slot_s, airspace_, cfg_.energy);
    uavs[j] = res.state;
    energy += res.energy_j;
    out.boundary_violated = out.boundary_violated || res.violated_boundary;
    positions.push_back(res.state.position);
  }
  out.disconnected = !connectivity_ok(positions, cfg_.comm_range_m);
  const Eigen::MatrixXd rates = rates_for(uavs);
  out.matching = associate_users(rates, cfg_.qos_min_bps);
  double served = 0.0;
  for (std::size_t j = 0; j < out.matching.size(); ++j) {
    const int i = out.matching[j];
    if (i < 0) continue;
    const double mbit = rates(static_cast<Eigen::Index>(j), i) * cfg_.slot_s * kMbit;
    cumulative[i] += mbit;
    served += mbit;
  }
  out.reward = compute_reward(cumulative, served, energy, out.boundary_violated, out.disconnected,
                              cfg_.lambda_boundary, cfg_.lambda_connectivity);
  return out;
}

StepOutcome PlacementEnv::step(const MovementAction& action) {
  StepOutcome out = simulate(action, uavs_, cumulative_);
  ++slot_;
  return out;
}

StepOutcome PlacementEnv::preview(const MovementAction& action) const {
  std::vector<env::UavState> uavs = uavs_;
  std::vector<double> cumulative = cumulative_;
  return simulate(action, uavs, cumulative);
}

MovementAction act(const neural::DenseNet<double>& actor, const Eigen::VectorXd& state,
                   double noise_scale, double d_max_m, Rng& rng) {
  Eigen::VectorXd a = actor.forward(state);
  if (noise_scale > 0.0) {
    for (Eigen::Index k = 0; k < a.size(); ++k) a[k] += noise_scale * standard_normal(rng);
  }
  return decode_action(a.cwiseMax(-1.0).cwiseMin(1.0), d_max_m);
}

namespace {

Eigen::VectorXd uniform_squashed(int dim, Rng& rng) {
  Eigen::VectorXd a(dim);
  for (int k = 0; k < dim; ++k) a[k] = uniform(rng, -1.0, 1.0);
  return a;
}

}  // namespace

MovementAction baseline_policy(BaselineKind kind, const PlacementEnv& env, int candidate_count,
                               Rng& rng) {
  const double d_max = env.config().d_max_m;
  if (kind == BaselineKind::Random) {
    return decode_action(uniform_squashed(env.action_dim(), rng), d_max);
  }
  MovementAction best;
  double best_reward = -INFINITY;
  for (int c = 0; c < std::max(candidate_count, 1); ++c) {
    MovementAction candidate = decode_action(uniform_squashed(env.action_dim(), rng), d_max);
    const double r = env.preview(candidate).reward.reward;
    if (best.empty() || r > best_reward) {
      best_reward = r;
      best = std::move(candidate);
    }
  }
  return best;
}

namespace {

struct Replay {
  Eigen::MatrixXd s, a, s2;
  Eigen::VectorXd r, done;
  int size = 0;
  int next = 0;
  int capacity = 0;

  Replay(int state_dim, int action_dim, int cap) : capacity(cap) {
    s.resize(state_dim, 0);
    a.resize(action_dim, 0);
    s2.resize(state_dim, 0);
  }

  void add(const Eigen::VectorXd& st, const Eigen::VectorXd& ac, double rew,
           const Eigen::VectorXd& st2, bool terminal) {
    if (size < capacity && next == size) {
      // Grow geometrically up to capacity.
      if (size == s.cols()) {
        const int grown = std::min(capacity, std::max(256, 2 * size));
        s.conservativeResize(Eigen::NoChange, grown);
        a.conservativeResize(Eigen::NoChange, grown);
        s2.conservativeResize(Eigen::NoChange, grown);
        r.conservativeResize(grown);
        done.conservativeResize(grown);
      }
      ++size;
    }
    s.col(next) = st;
    a.col(next) = ac;
    s2.col(next) = st2;
    r[next] = rew;
    done[next] = terminal ? 1.0 : 0.0;
    next = (next + 1) % capacity;
  }
};

void soft_update(neural::DenseNet<double>& target, const neural::DenseNet<double>& online,
                 double tau) {
  auto& dst = target.layers();
  const auto& src = online.layers();
  for (std::size_t l = 0; l < dst.size(); ++l) {
    dst[l].weights = (1.0 - tau) * dst[l].weights + tau * src[l].weights;
    dst[l].bias = (1.0 - tau) * dst[l].bias + tau * src[l].bias;
  }
}

EpisodeStats finish_episode(const std::vector<double>& rewards, const PlacementEnv& env,
                            double bits, double joules) {
  EpisodeStats st;
  st.mean_reward = std::accumulate(rewards.begin(), rewards.end(), 0.0) /
                   static_cast<double>(std::max<std::size_t>(rewards.size(), 1));
  st.fairness = metrics::jain_index(env.cumulative_rates());
  st.ee_bits_per_j = joules > 0.0 ? bits / joules : 0.0;
  return st;
}

}  // namespace

namespace {

double score_actor(PlacementEnv& env, const DrlConfig& cfg, const neural::DenseNet<double>& actor,
                   std::uint64_t seed) {
  double total = 0.0;
  for (int e = 0; e < cfg.validation_episodes; ++e) {
    Rng start(derive_seed(seed, 0x56414c4944ULL + static_cast<unsigned>(e)));
    env.reset(start);
    Rng unused(0);
    double sum = 0.0;
    while (!env.done()) {
      sum += env.step(act(actor, env.state(), 0.0, cfg.d_max_m, unused)).reward.reward;
    }
    total += sum / cfg.episode_slots;
  }
  return cfg.validation_episodes > 0 ? total / cfg.validation_episodes : 0.0;
}

}  // namespace

double validation_score(const DrlConfig& cfg, const neural::DenseNet<double>& actor,
                        std::uint64_t seed) {
  PlacementEnv env(cfg, seed);
  return score_actor(env, cfg, actor, seed);
}

DrlResult train_drl(const DrlConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  PlacementEnv env(cfg, seed);
  PlacementEnv validation_env(cfg, seed);
  const int sd = env.state_dim();
  const int ad = env.action_dim();

  std::vector<int> actor_sizes{sd};
  actor_sizes.insert(actor_sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  actor_sizes.push_back(ad);
  std::vector<int> critic_sizes{sd + ad};
  critic_sizes.insert(critic_sizes.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
  critic_sizes.push_back(1);

  Rng init(derive_seed(seed, 0x494e4954ULL));
  using neural::Activation;
  neural::DenseNet<double> actor(actor_sizes, Activation::Relu, Activation::Tanh, init);
  neural::DenseNet<double> critic(critic_sizes, Activation::Relu, Activation::Identity, init);
  neural::DenseNet<double> actor_target = actor;
  neural::DenseNet<double> critic_target = critic;
  neural::AdamOptimizer<double> actor_opt(cfg.actor_lr);
  neural::AdamOptimizer<double> critic_opt(cfg.critic_lr);

  Rng episode_rng(derive_seed(seed, 0x45504953ULL));
  Rng noise_rng(derive_seed(seed, 0x4e4f4953ULL));
  Rng batch_rng(derive_seed(seed, 0x42415443ULL));
  Replay replay(sd, ad, cfg.replay_capacity);

  DrlResult result;
  long steps = 0;
  const int B = cfg.batch_size;
  Eigen::MatrixXd bs(sd, B), ba(ad, B), bs2(sd, B), critic_in(sd + ad, B);
  Eigen::VectorXd br(B), bdone(B);

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    env.reset(episode_rng);
    std::vector<double> rewards;
    double bits = 0.0;
    double joules = 0.0;
    while (!env.done()) {
      const Eigen::VectorXd s = env.state();
      Eigen::VectorXd a;
      if (steps < cfg.warmup_steps) {
        a = uniform_squashed(ad, noise_rng);
      } else {
        a = actor.forward(s);
        for (int k = 0; k < ad; ++k) a[k] += cfg.noise_scale * standard_normal(noise_rng);
        a = a.cwiseMax(-1.0).cwiseMin(1.0);
      }
      const MovementAction move = decode_action(a, cfg.d_max_m);
      const StepOutcome out = env.step(move);
      rewards.push_back(out.reward.reward);
      bits += out.reward.sum_rate / kMbit;
      joules += out.reward.energy_j;
      replay.add(s, encode_action(move, cfg.d_max_m), out.reward.reward, env.state(), env.done());
      ++steps;

      if (steps < cfg.warmup_steps || replay.size < B) continue;

      for (int b = 0; b < B; ++b) {
        const auto idx = static_cast<Eigen::Index>(batch_rng() % replay.size);
        bs.col(b) = replay.s.col(idx);
        ba.col(b) = replay.a.col(idx);
        bs2.col(b) = replay.s2.col(idx);
        br[b] = replay.r[idx];
        bdone[b] = replay.done[idx];
      }

      // Critic: regress onto the bootstrapped target.
      critic_in.topRows(sd) = bs2;
      critic_in.bottomRows(ad) = actor_target.forward_batch(bs2);
      const Eigen::RowVectorXd q_next = critic_target.forward_batch(critic_in).row(0);
      Eigen::MatrixXd y(1, B);
      y.row(0) = br.transpose().array() +
                 cfg.gamma * (1.0 - bdone.transpose().array()) * q_next.array();
      critic_in.topRows(sd) = bs;
      critic_in.bottomRows(ad) = ba;
      neural::DenseNet<double>::Tape ctape;
      const Eigen::MatrixXd q = critic.forward_batch(critic_in, ctape);
      const double loss = neural::mse<double>(q, y);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "placement: critic loss diverged at episode " << ep << " step " << steps;
        result.diverged = true;
        result.error = msg.str();
        if (result.selected_episode < 0) result.actor = actor;
        result.final_actor = actor;
        return result;
      }
      Eigen::VectorXd params = critic.parameters();
      critic_opt.step(params, critic.backward(ctape, neural::mse_gradient<double>(q, y)));
      critic.set_parameters(params);

      // Actor: ascend Q(s, mu(s)).
      neural::DenseNet<double>::Tape atape;
      critic_in.bottomRows(ad) = actor.forward_batch(bs, atape);
      neural::DenseNet<double>::Tape qtape;
      critic.forward_batch(critic_in, qtape);
      Eigen::MatrixXd d_in;
      critic.backward(qtape, Eigen::MatrixXd::Constant(1, B, -1.0 / B), &d_in);
      params = actor.parameters();
      actor_opt.step(params, actor.backward(atape, d_in.bottomRows(ad)));
      actor.set_parameters(params);

      soft_update(critic_target, critic, cfg.tau);
      soft_update(actor_target, actor, cfg.tau);
    }
    result.curve.push_back(finish_episode(rewards, env, bits, joules));

    const bool checkpoint = cfg.validation_interval > 0 && steps >= cfg.warmup_steps &&
                            ((ep + 1) % cfg.validation_interval == 0 || ep + 1 == cfg.episodes);
    if (checkpoint) {
      const double score = score_actor(validation_env, cfg, actor, seed);
      if (result.selected_episode < 0 || score > result.validation_reward) {
        result.actor = actor;
        result.selected_episode = ep + 1;
        result.validation_reward = score;
      }
    }
  }
  if (result.selected_episode < 0) {
    result.actor = actor;
    result.selected_episode = cfg.episodes;
  }
  result.final_actor = actor;
  return result;
}

double PolicyEvaluation::mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

PolicyEvaluation evaluate_policies(const DrlConfig& cfg, const neural::DenseNet<double>& actor,
                                   std::uint64_t seed) {
  PlacementEnv env(cfg, seed);
  PolicyEvaluation eval;
  for (int e = 0; e < cfg.eval_episodes; ++e) {
    const std::uint64_t start_seed = derive_seed(seed, 0x4556414c00ULL + static_cast<unsigned>(e));
    for (int kind = 0; kind < 3; ++kind) {
      Rng start(start_seed);
      env.reset(start);
      Rng policy_rng(derive_seed(start_seed, 0x504f4cULL));
      double total = 0.0;
      while (!env.done()) {
        MovementAction move;
        if (kind == 0) {
          move = act(actor, env.state(), 0.0, cfg.d_max_m, policy_rng);
        } else {
          move = baseline_policy(kind == 1 ? BaselineKind::Greedy : BaselineKind::Random, env,
                                 cfg.greedy_candidates, policy_rng);
        }
        total += env.step(move).reward.reward;
      }
      const double mean_reward = total / cfg.episode_slots;
      (kind == 0 ? eval.drl : kind == 1 ? eval.greedy : eval.random).push_back(mean_reward);
    }
  }
  return eval;
}

void write_curve_csv(std::ostream& os, std::uint64_t seed, int num_uavs,
                     const std::vector<EpisodeStats>& curve, bool header) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  if (header) buf << "seed,j,episode,mean_reward,fairness,ee\n";
  buf << std::setprecision(10);
  for (std::size_t e = 0; e < curve.size(); ++e) {
    buf << seed << ',' << num_uavs << ',' << e + 1 << ',' << curve[e].mean_reward << ','
        << curve[e].fairness << ',' << curve[e].ee_bits_per_j << '\n';
  }
  os << buf.str();
}

void write_eval_csv(std::ostream& os, std::uint64_t seed, int num_uavs,
                    const PolicyEvaluation& eval, bool header) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  if (header) buf << "seed,j,policy_kind,episode,reward\n";
  buf << std::setprecision(10);
  const std::pair<const char*, const std::vector<double>*> kinds[] = {
      {"drl", &eval.drl}, {"greedy", &eval.greedy}, {"random", &eval.random}};
  for (const auto& [name, values] : kinds) {
    for (std::size_t e = 0; e < values->size(); ++e) {
      buf << seed << ',' << num_uavs << ',' << name << ',' << e + 1 << ',' << (*values)[e] << '\n';
    }
  }
  os << buf.str();
}

}  // namespace uavnet::placement
