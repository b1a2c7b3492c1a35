#include "doctest.h"

#include "uavnet/placement.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

using namespace uavnet;
using namespace uavnet::placement;

namespace {

// Every order of processing the feasible pairs, keeping the matching that a
// descending-rate greedy pass with (uav, user) tie-break would pick.
std::vector<int> brute_force_greedy(const Eigen::MatrixXd& rates, double qos) {
  struct Pair {
    double rate;
    int uav;
    int user;
  };
  std::vector<Pair> pairs;
  for (int j = 0; j < rates.rows(); ++j) {
    for (int i = 0; i < rates.cols(); ++i) {
      if (rates(j, i) >= qos) pairs.push_back({rates(j, i), j, i});
    }
  }
  std::vector<int> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> best(rates.rows(), -1);
  bool found = false;
  do {
    // A permutation is a valid greedy order if it is sorted by the declared key.
    bool sorted = true;
    for (std::size_t k = 1; k < order.size() && sorted; ++k) {
      const Pair& a = pairs[order[k - 1]];
      const Pair& b = pairs[order[k]];
      const bool a_first = a.rate != b.rate ? a.rate > b.rate
                                            : (a.uav != b.uav ? a.uav < b.uav : a.user < b.user);
      sorted = a_first;
    }
    if (!sorted) continue;
    CHECK_FALSE(found);
    found = true;
    std::vector<char> used(rates.cols(), 0);
    for (int k : order) {
      const Pair& p = pairs[k];
      if (best[p.uav] >= 0 || used[p.user]) continue;
      best[p.uav] = p.user;
      used[p.user] = 1;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

bool reachable_all(const std::vector<Vec3>& p, double range) {
  // Transitive closure of the adjacency matrix.
  const std::size_t n = p.size();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) r[a][b] = a == b || (p[a] - p[b]).norm() <= range;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) r[a][b] = r[a][b] || (r[a][k] && r[k][b]);
    }
  }
  for (std::size_t b = 0; b < n; ++b) {
    if (!r[0][b]) return false;
  }
  return true;
}

DrlConfig small_config() {
  DrlConfig cfg;
  cfg.num_users = 20;
  cfg.hidden_sizes = {32, 24};
  cfg.episodes = 4;
  cfg.episode_slots = 10;
  cfg.warmup_steps = 10;
  cfg.batch_size = 8;
  cfg.eval_episodes = 2;
  return cfg;
}

}  // namespace

TEST_CASE("association trivial cases") {
  Eigen::MatrixXd one(1, 1);
  one << 2e6;
  CHECK(associate_users(one, 1e6) == std::vector<int>{0});
  Eigen::MatrixXd low = Eigen::MatrixXd::Constant(2, 3, 5e5);
  CHECK(associate_users(low, 1e6) == std::vector<int>{-1, -1});
}

TEST_CASE("association equals brute-force greedy order on J=2, N=3") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd rates(2, 3);
    for (Eigen::Index k = 0; k < rates.size(); ++k) {
      // Coarse values make ties common.
      rates.data()[k] = std::floor(uniform(rng, 0.0, 5.0)) * 1e6;
    }
    CHECK(associate_users(rates, 1e6) == brute_force_greedy(rates, 1e6));
  }
}

TEST_CASE("association is one-to-one and QoS-feasible") {
  Rng rng(37);
  for (int trial = 0; trial < 1000; ++trial) {
    const int J = 1 + static_cast<int>(rng() % 5);
    const int N = 1 + static_cast<int>(rng() % 12);
    Eigen::MatrixXd rates(J, N);
    for (Eigen::Index k = 0; k < rates.size(); ++k) rates.data()[k] = uniform(rng, 0.0, 3e6);
    const auto m = associate_users(rates, 1e6);
    std::vector<int> seen;
    for (int j = 0; j < J; ++j) {
      if (m[j] < 0) continue;
      CHECK(rates(j, m[j]) >= 1e6);
      seen.push_back(m[j]);
    }
    std::sort(seen.begin(), seen.end());
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  }
}

TEST_CASE("reward hand instance") {
  const auto r = compute_reward({2.0, 4.0}, 6.0, 1.0, false, false);
  CHECK(r.fairness == doctest::Approx(0.9));
  CHECK(r.reward == doctest::Approx(5.4));
  CHECK(r.penalty == 0.0);

  const auto none = compute_reward({0.0, 0.0, 0.0}, 0.0, 200.0, true, true);
  CHECK(none.sum_rate == 0.0);
  CHECK(none.reward == doctest::Approx(-2.0));

  const auto equal = compute_reward(std::vector<double>(10, 3.0), 6.0, 2.0, false, false);
  CHECK(equal.fairness == doctest::Approx(1.0));
  CHECK_THROWS(compute_reward({1.0}, 1.0, 0.0, false, false));
}

TEST_CASE("connectivity") {
  CHECK(connectivity_ok({Vec3(0, 0, 100)}, 500.0));
  CHECK_FALSE(connectivity_ok({Vec3(0, 0, 100), Vec3(501, 0, 100)}, 500.0));
  CHECK(connectivity_ok({Vec3(0, 0, 100), Vec3(500, 0, 100)}, 500.0));
  Rng rng(41);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Vec3> p;
    for (int j = 0; j < 6; ++j) {
      p.emplace_back(uniform(rng, 0, 1500), uniform(rng, 0, 1500), uniform(rng, 100, 800));
    }
    CHECK(connectivity_ok(p, 500.0) == reachable_all(p, 500.0));
  }
}

TEST_CASE("action decoding bounds") {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(6, -1.0);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(6, 1.0);
  const auto a = decode_action(lo, 50.0);
  const auto b = decode_action(hi, 50.0);
  CHECK(a[0].distance_m == 0.0);
  CHECK(a[0].pitch_rad == -M_PI / 2);
  CHECK(a[0].yaw_rad == 0.0);
  CHECK(b[1].distance_m == 50.0);
  CHECK(b[1].pitch_rad == M_PI / 2);
  CHECK(b[1].yaw_rad == 0.0);

  Rng rng(43);
  for (int k = 0; k < 200; ++k) {
    Eigen::VectorXd x(3);
    x << uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 0.99);
    const auto round = encode_action(decode_action(x, 50.0), 50.0);
    CHECK((round - x).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("act is deterministic without noise and bounded with noise") {
  const DrlConfig cfg = small_config();
  PlacementEnv env(cfg, 3);
  Rng rng(5);
  env.reset(rng);
  Rng init(7);
  neural::DenseNet<double> actor({env.state_dim(), 16, env.action_dim()},
                                 neural::Activation::Relu, neural::Activation::Tanh, init);
  const auto s = env.state();
  const auto a1 = act(actor, s, 0.0, cfg.d_max_m, rng);
  const auto a2 = act(actor, s, 0.0, cfg.d_max_m, rng);
  for (std::size_t j = 0; j < a1.size(); ++j) {
    CHECK(a1[j].distance_m == a2[j].distance_m);
    CHECK(a1[j].pitch_rad == a2[j].pitch_rad);
    CHECK(a1[j].yaw_rad == a2[j].yaw_rad);
  }
  bool inside = true;
  for (int k = 0; k < 10000; ++k) {
    for (const auto& m : act(actor, s, 2.0, cfg.d_max_m, rng)) {
      inside = inside && m.distance_m >= 0.0 && m.distance_m <= cfg.d_max_m &&
               std::abs(m.pitch_rad) <= M_PI / 2 && m.yaw_rad >= 0.0 && m.yaw_rad < 2 * M_PI;
    }
  }
  CHECK(inside);
}

TEST_CASE("state is normalized and penalties track the flags") {
  DrlConfig cfg = small_config();
  cfg.episode_slots = 200;
  PlacementEnv env(cfg, 11);
  Rng rng(13);
  env.reset(rng);
  CHECK(env.state_dim() == 27);
  int boundary = 0;
  int disconnected = 0;
  while (!env.done()) {
    const auto s = env.state();
    CHECK(s.cwiseAbs().maxCoeff() <= 1.0);
    const auto move = baseline_policy(BaselineKind::Random, env, 1, rng);
    const auto out = env.step(move);
    std::vector<Vec3> pos;
    for (const auto& u : env.uavs()) {
      pos.push_back(u.position);
      CHECK(u.position.z() >= cfg.h_min_m);
      CHECK(u.position.z() <= cfg.h_max_m);
    }
    CHECK(out.disconnected == !connectivity_ok(pos, cfg.comm_range_m));
    const double expected = (out.boundary_violated ? 1.0 : 0.0) + (out.disconnected ? 1.0 : 0.0);
    CHECK(out.reward.penalty == expected);
    CHECK(out.reward.fairness >= 1.0 / cfg.num_users - 1e-12);
    CHECK(out.reward.fairness <= 1.0 + 1e-12);
    boundary += out.boundary_violated ? 1 : 0;
    disconnected += out.disconnected ? 1 : 0;
  }
  CHECK(boundary > 0);
  MESSAGE("boundary hits " << boundary << ", disconnected slots " << disconnected);
}

TEST_CASE("preview matches step") {
  const DrlConfig cfg = small_config();
  PlacementEnv env(cfg, 17);
  Rng rng(19);
  env.reset(rng);
  for (int t = 0; t < 5; ++t) {
    const auto move = baseline_policy(BaselineKind::Random, env, 1, rng);
    const auto seen = env.preview(move);
    const auto done = env.step(move);
    CHECK(seen.reward.reward == done.reward.reward);
    CHECK(seen.matching == done.matching);
  }
}

TEST_CASE("greedy with one candidate is the random policy") {
  const DrlConfig cfg = small_config();
  PlacementEnv env(cfg, 23);
  Rng start(29);
  env.reset(start);
  Rng r1(99);
  Rng r2(99);
  for (int k = 0; k < 20; ++k) {
    const auto a = baseline_policy(BaselineKind::Greedy, env, 1, r1);
    const auto b = baseline_policy(BaselineKind::Random, env, 1, r2);
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j].distance_m == b[j].distance_m);
      CHECK(a[j].yaw_rad == b[j].yaw_rad);
    }
  }
}

TEST_CASE("greedy beats random in paired one-step trials") {
  const DrlConfig cfg = small_config();
  PlacementEnv env(cfg, 31);
  double greedy = 0.0;
  double random = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng start(derive_seed(31, trial));
    env.reset(start);
    Rng rg(derive_seed(32, trial));
    Rng rr(derive_seed(33, trial));
    greedy += env.preview(baseline_policy(BaselineKind::Greedy, env, 10, rg)).reward.reward;
    random += env.preview(baseline_policy(BaselineKind::Random, env, 1, rr)).reward.reward;
  }
  CHECK(greedy >= random);
}

TEST_CASE("training bookkeeping and determinism") {
  const DrlConfig cfg = small_config();
  const DrlResult a = train_drl(cfg, 5);
  const DrlResult b = train_drl(cfg, 5);
  CHECK_FALSE(a.diverged);
  REQUIRE(a.curve.size() == 4);
  CHECK(a.actor.parameters() == b.actor.parameters());
  const auto ea = evaluate_policies(cfg, a.actor, 5);
  const auto eb = evaluate_policies(cfg, b.actor, 5);
  CHECK(ea.drl.size() == 2);
  std::ostringstream sa, sb;
  write_curve_csv(sa, 5, cfg.num_uavs, a.curve, true);
  write_eval_csv(sa, 5, cfg.num_uavs, ea, true);
  write_curve_csv(sb, 5, cfg.num_uavs, b.curve, true);
  write_eval_csv(sb, 5, cfg.num_uavs, eb, true);
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().find("seed,j,policy_kind,episode,reward\n") != std::string::npos);
}

TEST_CASE("checkpoint selection picks the best validated actor") {
  DrlConfig cfg = small_config();
  cfg.episodes = 6;
  cfg.validation_interval = 2;
  cfg.validation_episodes = 2;
  const DrlResult r = train_drl(cfg, 9);

  // independent replay: truncated runs end exactly at each checkpoint
  int best_k = -1;
  double best = 0.0;
  Eigen::VectorXd best_params;
  for (int k : {2, 4, 6}) {
    DrlConfig part = cfg;
    part.episodes = k;
    part.validation_interval = 0;
    const DrlResult t = train_drl(part, 9);
    CHECK(t.selected_episode == k);
    CHECK(t.actor.parameters() == t.final_actor.parameters());
    const double score = validation_score(cfg, t.final_actor, 9);
    if (best_k < 0 || score > best) {
      best_k = k;
      best = score;
      best_params = t.final_actor.parameters();
    }
    if (k == 6) CHECK(r.final_actor.parameters() == t.final_actor.parameters());
  }
  CHECK(r.selected_episode == best_k);
  CHECK(r.validation_reward == best);
  CHECK(r.actor.parameters() == best_params);
  CHECK(validation_score(cfg, r.actor, 9) == r.validation_reward);
}

TEST_CASE("invalid placement configs are rejected") {
  DrlConfig cfg;
  cfg.num_users = -5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = DrlConfig{};
  cfg.h_min_m = 900.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = DrlConfig{};
  cfg.validation_episodes = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
