#ifndef UAVNET_EXPERIMENTS_HPP
#define UAVNET_EXPERIMENTS_HPP

#include "uavnet/config.hpp"

#include <string>
#include <vector>

namespace uavnet::experiments {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeAbort = 3;

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> files;  // written under out_dir
  std::string error;
};

/// Seed-level parallelism: UAVNET_THREADS if set and positive, else the
/// hardware concurrency; never more than `jobs`.
int worker_count(int jobs);

/// Runs the configured experiment for every seed and writes its CSVs, a
/// per-seed summary, resolved_config.txt and manifest.txt to cfg.out_dir.
/// When a run aborts the data files get a `.partial` suffix.
RunOutcome run_experiment(const config::ExperimentConfig& cfg);

}  // namespace uavnet::experiments

#endif  // UAVNET_EXPERIMENTS_HPP
