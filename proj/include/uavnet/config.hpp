#ifndef UAVNET_CONFIG_HPP
#define UAVNET_CONFIG_HPP

// Line-oriented `section.key = value` experiment configuration.

#include "uavnet/chanest.hpp"
#include "uavnet/env.hpp"
#include "uavnet/placement.hpp"
#include "uavnet/routing.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace uavnet::config {

enum class ExperimentKind { Chanest, Placement, Routing };

std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Chanest;
  std::vector<std::uint64_t> seeds{1};
  std::string out_dir = "out";

  env::WorldConfig world{};  // chanest scene
  chanest::EstimatorConfig chanest{};
  placement::DrlConfig placement{};
  std::vector<int> placement_num_uavs{2};
  routing::RoutingConfig routing{};
  std::vector<int> routing_num_uavs{5, 10, 15, 20};

  void validate() const;
};

/// Parses the whole text or throws ConfigError naming the line and key.
/// Missing keys keep their defaults; `#` starts a comment.
ExperimentConfig parse_config(const std::string& text);

/// Every key with its resolved value, one per line, in a fixed order.
std::map<std::string, std::string> resolved_entries(const ExperimentConfig& cfg);
std::string dump_config(const ExperimentConfig& cfg);

/// Hash of the resolved entries except the output directory; independent of
/// key order in the source text.
std::uint64_t config_hash(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace uavnet::config

#endif  // UAVNET_CONFIG_HPP
