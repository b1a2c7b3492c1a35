#include "uavnet/experiments.hpp"

#include "uavnet/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace uavnet::experiments {

namespace {

namespace fs = std::filesystem;

struct SeedResult {
  std::map<std::string, std::string> bodies;  // file name -> rows without header
  metrics::RunSummary summary;
  bool failed = false;
  bool config_error = false;
  std::string error;
};

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void run_chanest_seed(const config::ExperimentConfig& cfg, std::uint64_t seed, SeedResult& out) {
  const auto run = chanest::run_chanest(cfg.chanest, cfg.world, seed);
  std::ostringstream mse, ee;
  chanest::write_mse_csv(mse, seed, run, false);
  chanest::write_ee_csv(ee, seed, run, cfg.chanest.pretrain_slots + 1, false);
  out.bodies["chanest_mse.csv"] = mse.str();
  out.bodies["chanest_ee.csv"] = ee.str();

  std::vector<double> online, predicted, perfect;
  for (std::size_t s = 0; s < run.online.mse.size(); ++s) online.push_back(run.online.slot_mse(s));
  for (const auto& e : run.online.ee) {
    predicted.push_back(e.predicted);
    perfect.push_back(e.perfect);
  }
  auto& sc = out.summary.scalars;
  sc["online_mse_mean"] = mean_of(online);
  if (!run.offline.mse.empty() && run.offline.slot_mse(0) > 0.0) {
    sc["offline_mse_ratio"] = run.offline.slot_mse(run.offline.mse.size() - 1) /
                              run.offline.slot_mse(0);
  }
  if (mean_of(perfect) > 0.0) sc["ee_ratio"] = mean_of(predicted) / mean_of(perfect);
}

void run_placement_seed(const config::ExperimentConfig& cfg, std::uint64_t seed, SeedResult& out) {
  std::ostringstream curve, eval;
  for (int j : cfg.placement_num_uavs) {
    placement::DrlConfig dc = cfg.placement;
    dc.num_uavs = j;
    const auto trained = placement::train_drl(dc, seed);
    placement::write_curve_csv(curve, seed, j, trained.curve, false);
    out.bodies["drl_curve.csv"] = curve.str();
    if (trained.diverged) throw DivergenceError("placement J=" + std::to_string(j) + ": " +
                                                trained.error);
    const auto result = placement::evaluate_policies(dc, trained.actor, seed);
    placement::write_eval_csv(eval, seed, j, result, false);
    out.bodies["policy_eval.csv"] = eval.str();
    const std::string tag = "_J" + std::to_string(j);
    out.summary.scalars["drl" + tag] = placement::PolicyEvaluation::mean(result.drl);
    out.summary.scalars["greedy" + tag] = placement::PolicyEvaluation::mean(result.greedy);
    out.summary.scalars["random" + tag] = placement::PolicyEvaluation::mean(result.random);
    out.summary.scalars["checkpoint" + tag] = trained.selected_episode;
  }
}

void run_routing_seed(const config::ExperimentConfig& cfg, std::uint64_t seed, SeedResult& out) {
  std::vector<routing::LatencyRow> rows;
  for (int j : cfg.routing_num_uavs) {
    for (auto p : {routing::Protocol::ParPredict, routing::Protocol::ShortestPath,
                   routing::Protocol::BacklogAware}) {
      rows.push_back({p, j, seed, routing::simulate(cfg.routing, p, j, seed)});
      out.summary.scalars[routing::to_string(p) + "_J" + std::to_string(j) + "_mean_ms"] =
          rows.back().stats.mean_ms;
    }
  }
  std::ostringstream csv;
  routing::write_latency_csv(csv, rows, false);
  out.bodies["routing_latency.csv"] = csv.str();
}

std::vector<std::pair<std::string, std::string>> headers(config::ExperimentKind kind) {
  std::ostringstream a, b;
  switch (kind) {
    case config::ExperimentKind::Chanest:
      chanest::write_mse_csv(a, 0, {}, true);
      chanest::write_ee_csv(b, 0, {}, 1, true);
      return {{"chanest_mse.csv", a.str()}, {"chanest_ee.csv", b.str()}};
    case config::ExperimentKind::Placement:
      placement::write_curve_csv(a, 0, 0, {}, true);
      placement::write_eval_csv(b, 0, 0, {}, true);
      return {{"drl_curve.csv", a.str()}, {"policy_eval.csv", b.str()}};
    case config::ExperimentKind::Routing:
      routing::write_latency_csv(a, {}, true);
      return {{"routing_latency.csv", a.str()}};
  }
  return {};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

int worker_count(int jobs) {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UAVNET_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) cap = n;
  }
  return std::max(1, std::min(cap, jobs));
}

RunOutcome run_experiment(const config::ExperimentConfig& cfg) {
  RunOutcome outcome;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfigError;
    outcome.error = e.what();
    return outcome;
  }

  const std::string kind = config::to_string(cfg.kind);
  const std::uint64_t hash = config::config_hash(cfg);
  const std::size_t n = cfg.seeds.size();
  std::vector<SeedResult> results(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SeedResult& r = results[i];
      const std::uint64_t seed = cfg.seeds[i];
      r.summary.experiment = kind;
      r.summary.config_hash = hash;
      r.summary.seed = seed;
      try {
        switch (cfg.kind) {
          case config::ExperimentKind::Chanest: run_chanest_seed(cfg, seed, r); break;
          case config::ExperimentKind::Placement: run_placement_seed(cfg, seed, r); break;
          case config::ExperimentKind::Routing: run_routing_seed(cfg, seed, r); break;
        }
      } catch (const ConfigError& e) {
        r.failed = r.config_error = true;
        r.error = "seed " + std::to_string(seed) + ": " + e.what();
      } catch (const std::exception& e) {
        r.failed = true;
        r.error = "seed " + std::to_string(seed) + ": " + e.what();
      }
    }
  };
  const int threads = worker_count(static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool aborted = false;
  for (const auto& r : results) {
    if (!r.failed) continue;
    if (!aborted) {
      outcome.exit_code = r.config_error ? kExitConfigError : kExitRuntimeAbort;
      outcome.error = r.error;
    }
    aborted = true;
  }
  const std::string suffix = aborted ? ".partial" : "";

  try {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& [name, header] : headers(cfg.kind)) {
      std::string content = header;
      for (const auto& r : results) {
        auto it = r.bodies.find(name);
        if (it != r.bodies.end()) content += it->second;
      }
      files.emplace_back(name + suffix, std::move(content));
    }

    std::set<std::string> names;
    for (const auto& r : results) {
      for (const auto& [name, value] : r.summary.scalars) names.insert(name);
    }
    const std::vector<std::string> columns(names.begin(), names.end());
    std::ostringstream summary;
    metrics::RunSummary::write_csv_header(summary, columns);
    for (const auto& r : results) {
      if (!r.failed) r.summary.write_csv_row(summary, columns);
    }
    files.emplace_back("summary.csv" + suffix, summary.str());
    files.emplace_back("resolved_config.txt", config::dump_config(cfg));

    std::ostringstream manifest;
    manifest << "experiment = " << kind << "\n"
             << "config_hash = " << hex64(hash) << "\n"
             << "status = " << (aborted ? "aborted" : "complete") << "\n";
    for (std::size_t i = 0; i < n; ++i) {
      manifest << "seed " << cfg.seeds[i] << " = "
               << (results[i].failed ? "failed: " + results[i].error : "ok") << "\n";
    }
    for (const auto& [name, content] : files) {
      manifest << "file " << name << " " << content.size() << " "
               << hex64(metrics::fnv1a(content)) << "\n";
    }
    files.emplace_back("manifest.txt", manifest.str());

    for (const auto& [name, content] : files) {
      write_file(dir / name, content);
      if (!aborted) fs::remove(dir / (name + ".partial"));
      outcome.files.push_back(name);
    }
  } catch (const std::exception& e) {
    outcome.exit_code = kExitRuntimeAbort;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace uavnet::experiments
