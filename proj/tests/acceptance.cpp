// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include "uavnet/chanest.hpp"
#include "uavnet/channel.hpp"
#include "uavnet/config.hpp"
#include "uavnet/env.hpp"
#include "uavnet/experiments.hpp"
#include "uavnet/neural.hpp"
#include "uavnet/placement.hpp"
#include "uavnet/routing.hpp"

#include "oracles.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

using namespace uavnet;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -1.0, 1.0);
  return m;
}

// One-sided paired sign test: P(at least k of n positive | fair coin).
double sign_test_p(int positive, int n) {
  double p = 0.0;
  double binom = 1.0;  // C(n, i)
  for (int i = 0; i <= n; ++i) {
    if (i >= positive) p += binom;
    binom = binom * (n - i) / (i + 1);
  }
  return p / std::pow(2.0, n);
}

Verdict gradient_correctness() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    neural::DenseNet<double> net({4, 8, 1}, neural::Activation::Relu,
                                 neural::Activation::Identity, rng);
    const auto x = random_matrix(rng, 4, 6);
    const auto t = random_matrix(rng, 1, 6);
    worst = std::max(worst, neural::grad_check(net, x, t).max_relative_error);

    Rng rrng(seed + 100);
    neural::RecurrentCell<double> cell(2, 5, rrng);
    neural::RecurrentCell<double>::Sequence seq;
    for (int s = 0; s < 3; ++s) seq.push_back(random_matrix(rrng, 2, 4));
    const Eigen::VectorXd target = random_matrix(rrng, 4, 1);
    worst = std::max(worst, neural::grad_check(cell, seq, target).max_relative_error);
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 10.0,
          "max rel err " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Verdict channel_golden() {
  const double los = channel::utg_path_loss_db(100.0, 50.0, 2.0, true);
  const double nlos = channel::utg_path_loss_db(100.0, 50.0, 2.0, false);
  const double utu = channel::utu_path_loss_db(1.0, 2.4);
  Rng rng(2024);
  const int n = 1000000;
  double los_mean = 0.0, nlos_mean = 0.0;
  for (int i = 0; i < n; ++i) {
    los_mean += channel::small_scale_power_gain(true, 15.0, rng) / n;
    nlos_mean += channel::small_scale_power_gain(false, 15.0, rng) / n;
  }
  const bool ok = std::abs(los - 78.02) <= 0.01 && std::abs(nlos - 89.17) <= 0.01 &&
                  std::abs(utu - 40.05) <= 0.01 && std::abs(los_mean - 1.0) < 0.01 &&
                  std::abs(nlos_mean - 1.0) < 0.01;
  return {ok, "LoS " + fmt("%.4f", los) + " dB, NLoS " + fmt("%.4f", nlos) + " dB, UtU " +
                  fmt("%.4f", utu) + " dB, fading means " + fmt("%.4f", los_mean) + " / " +
                  fmt("%.4f", nlos_mean)};
}

Verdict los_oracle() {
  env::WorldConfig cfg;
  cfg.area_x_m = 100.0;
  cfg.area_y_m = 100.0;
  cfg.beta = 1000.0;
  cfg.seed = 5;
  const env::World world = env::generate_world(cfg);
  Rng rng(99);
  int disagreements = 0, blocked = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 a(uniform(rng, 0, 100), uniform(rng, 0, 100), uniform(rng, 1.0, 80.0));
    const Vec3 b(uniform(rng, 0, 100), uniform(rng, 0, 100), uniform(rng, 0.0, 20.0));
    const bool fast = world.is_los(a, b);
    if (fast != oracles::ray_march_los(world.buildings(), a, b)) ++disagreements;
    if (!fast) ++blocked;
  }
  return {disagreements == 0, std::to_string(disagreements) + " disagreements on 1000 pairs (" +
                                  std::to_string(blocked) + " blocked)"};
}

Verdict chanest_reproduction() {
  const auto t0 = Clock::now();
  const chanest::EstimatorConfig cfg;
  const auto run = chanest::run_chanest(cfg, env::WorldConfig{}, 1);
  double online = 0.0;
  for (std::size_t s = 0; s < run.online.mse.size(); ++s) online += run.online.slot_mse(s);
  online /= static_cast<double>(run.online.mse.size());
  const double ratio =
      run.offline.slot_mse(run.offline.mse.size() - 1) / run.offline.slot_mse(0);
  double pred = 0.0, perf = 0.0;
  for (const auto& e : run.online.ee) {
    pred += e.predicted;
    perf += e.perfect;
  }
  const double ee = pred / perf;
  const double secs = seconds_since(t0);
  const bool ok = online < 0.15 && ratio < 0.1 && ee >= 0.85 && secs < 600.0;
  return {ok, "online MSE " + fmt("%.4f", online) + " (< 0.15), offline end/start " +
                  fmt("%.3f", ratio) + " (< 0.1), EE ratio " + fmt("%.3f", ee) + " (>= 0.85), " +
                  fmt("%.0f", secs) + " s"};
}

Verdict placement_ordering() {
  const auto t0 = Clock::now();
  placement::DrlConfig cfg;
  cfg.num_uavs = 2;
  cfg.num_users = 20;
  cfg.episodes = 300;
  cfg.eval_episodes = 20;
  int drl_over_greedy = 0, greedy_over_random = 0;
  std::string per_seed;
  const int seeds = 5;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto trained = placement::train_drl(cfg, seed);
    if (trained.diverged) return {false, "seed " + std::to_string(seed) + " diverged"};
    const auto eval = placement::evaluate_policies(cfg, trained.actor, seed);
    const double d = placement::PolicyEvaluation::mean(eval.drl);
    const double g = placement::PolicyEvaluation::mean(eval.greedy);
    const double r = placement::PolicyEvaluation::mean(eval.random);
    drl_over_greedy += d > g;
    greedy_over_random += g > r;
    per_seed += " [" + fmt("%.3f", d) + " " + fmt("%.3f", g) + " " + fmt("%.3f", r) + " @" +
                std::to_string(trained.selected_episode) + "]";
  }
  const double p1 = sign_test_p(drl_over_greedy, seeds);
  const double p2 = sign_test_p(greedy_over_random, seeds);
  const double secs = seconds_since(t0);
  const bool ok = p1 < 0.05 && p2 < 0.05 && secs < 1200.0;
  return {ok, "DRL>greedy " + std::to_string(drl_over_greedy) + "/5 (p=" + fmt("%.3f", p1) +
                  "), greedy>random " + std::to_string(greedy_over_random) + "/5 (p=" +
                  fmt("%.3f", p2) + "), drl/greedy/random @checkpoint per seed:" + per_seed + ", " +
                  fmt("%.0f", secs) + " s"};
}

Verdict routing_ordering() {
  const auto t0 = Clock::now();
  const routing::RoutingConfig cfg;
  bool ordered = true;
  std::string table;
  for (int j : {5, 10, 15, 20}) {
    std::map<routing::Protocol, double> mean;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      for (auto p : {routing::Protocol::ParPredict, routing::Protocol::ShortestPath,
                     routing::Protocol::BacklogAware}) {
        mean[p] += routing::simulate(cfg, p, j, seed).mean_ms / 10.0;
      }
    }
    const double par = mean[routing::Protocol::ParPredict];
    ordered = ordered && par < mean[routing::Protocol::ShortestPath] &&
              par < mean[routing::Protocol::BacklogAware];
    table += " J=" + std::to_string(j) + " [" + fmt("%.1f", par) + " " +
             fmt("%.1f", mean[routing::Protocol::ShortestPath]) + " " +
             fmt("%.1f", mean[routing::Protocol::BacklogAware]) + "]";
  }

  routing::RoutingConfig audit_cfg;
  audit_cfg.duration_slots = 100000;
  long violations = 0, slots = 0;
  for (auto p : {routing::Protocol::ParPredict, routing::Protocol::ShortestPath,
                 routing::Protocol::BacklogAware}) {
    routing::InvariantReport report;
    routing::SimulationOptions opt;
    opt.audit = true;
    opt.report = &report;
    routing::simulate(audit_cfg, p, 10, 7, opt);
    violations += report.total();
    slots += report.slots_checked;
  }
  const double secs = seconds_since(t0);
  const bool ok = ordered && violations == 0 && secs < 300.0;
  return {ok, "mean ms par/shortest/backlog:" + table + "; invariant violations " +
                  std::to_string(violations) + " over " + std::to_string(slots) +
                  " audited slots, " + fmt("%.0f", secs) + " s"};
}

std::map<std::string, std::string> read_csvs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    out[entry.path().filename().string()] = buf.str();
  }
  return out;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / ("uavnet_accept_" + std::to_string(::getpid()));
  const std::map<std::string, std::string> texts{
      {"chanest",
       "experiment.kind = chanest\nexperiment.seeds = 1, 2\nchanest.pretrain_slots = 60\n"
       "chanest.online_slots = 40\n"},
      {"placement",
       "experiment.kind = placement\nexperiment.seeds = 1, 2\nplacement.n_users = 20\n"
       "placement.episodes = 8\nplacement.warmup_steps = 100\nplacement.eval_episodes = 4\n"},
      {"routing", "experiment.kind = routing\nexperiment.seeds = 1, 2\n"},
  };
  int files = 0;
  std::string mismatch;
  for (const auto& [kind, text] : texts) {
    std::map<std::string, std::string> runs[2];
    for (int r = 0; r < 2; ++r) {
      auto cfg = config::parse_config(text);
      cfg.out_dir = (root / (kind + std::to_string(r))).string();
      const auto outcome = experiments::run_experiment(cfg);
      if (outcome.exit_code != 0) return {false, kind + " run failed: " + outcome.error};
      runs[r] = read_csvs(cfg.out_dir);
    }
    files += static_cast<int>(runs[0].size());
    if (runs[0] != runs[1] || runs[0].empty()) mismatch += " " + kind;
  }
  fs::remove_all(root);
  return {mismatch.empty(), std::to_string(files) + " CSVs compared" +
                                (mismatch.empty() ? ", all byte-identical" : ", differ:" + mismatch)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"gradient correctness", gradient_correctness},
      {"channel golden values", channel_golden},
      {"LoS oracle equivalence", los_oracle},
      {"chanest reproduction", chanest_reproduction},
      {"placement ordering", placement_ordering},
      {"routing ordering", routing_ordering},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
