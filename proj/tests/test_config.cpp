#include "doctest.h"

#include "uavnet/config.hpp"

#include <string>

using namespace uavnet;
using namespace uavnet::config;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

}  // namespace

TEST_CASE("empty text gives all defaults") {
  const ExperimentConfig cfg = parse_config("");
  CHECK(cfg == ExperimentConfig{});
  CHECK(cfg.kind == ExperimentKind::Chanest);
  CHECK(cfg.chanest.pretrain_slots == 736);
  CHECK(cfg.routing.t_th_ms == 10.0);
  const std::string dump = dump_config(cfg);
  for (const auto& [key, value] : resolved_entries(cfg)) {
    CHECK(contains(dump, key + " = " + value + "\n"));
  }
  CHECK(contains(dump, "routing.n_uavs = 5, 10, 15, 20\n"));
}

TEST_CASE("values are applied") {
  const auto cfg = parse_config(
      "# routing sweep\n"
      "experiment.kind = routing\n"
      "experiment.seeds = 3, 4,5\n"
      "  routing.t_th_ms = 12.5   # ms\n"
      "routing.n_uavs = 5,10\n"
      "placement.hidden_sizes = 64, 32\n"
      "world.gcs_x_m = -3\n");
  CHECK(cfg.kind == ExperimentKind::Routing);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4, 5});
  CHECK(cfg.routing.t_th_ms == 12.5);
  CHECK(cfg.routing_num_uavs == std::vector<int>{5, 10});
  CHECK(cfg.placement.hidden_sizes == std::vector<int>{64, 32});
  CHECK(cfg.world.gcs_position.x() == -3.0);
}

TEST_CASE("dump re-parses to the same config") {
  const auto a = parse_config("routing.t_th_ms = 10\n");
  const auto b = parse_config(dump_config(a));
  CHECK(a == b);
  CHECK(dump_config(a) == dump_config(b));

  const auto c = parse_config(
      "routing.predictor_lr = 0.1\nchanest.learning_rate = 3e-4\nworld.alpha = 0.1234567890123\n"
      "experiment.seeds = 18446744073709551615\n");
  const auto d = parse_config(dump_config(c));
  CHECK(c == d);
  CHECK(d.routing.predictor_lr == 0.1);
  CHECK(d.world.alpha == 0.1234567890123);
  CHECK(d.seeds.front() == 18446744073709551615ULL);
}

TEST_CASE("hash ignores key order") {
  const auto a = parse_config("routing.load = 0.5\nplacement.episodes = 10\n");
  const auto b = parse_config("placement.episodes = 10\nrouting.load = 0.5\n");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(ExperimentConfig{}));
  CHECK(config_hash(parse_config("experiment.out_dir = elsewhere")) ==
        config_hash(ExperimentConfig{}));
}

TEST_CASE("errors name the line and key") {
  const auto neg = error_of("\nplacement.n_users = -5\n");
  CHECK(contains(neg, "line 2"));
  CHECK(contains(neg, "placement.n_users"));

  CHECK(contains(error_of("routing.nope = 1"), "unknown key 'routing.nope'"));
  CHECK(contains(error_of("routing.window = 2.5"), "routing.window"));
  CHECK(contains(error_of("routing.t_th_ms = fast"), "routing.t_th_ms"));
  CHECK(contains(error_of("routing.t_th_ms"), "line 1"));
  CHECK(contains(error_of("routing.load = 1\nrouting.load = 2"), "duplicate"));
  CHECK(contains(error_of("experiment.kind = weather"), "experiment.kind"));
  CHECK(contains(error_of("experiment.seeds = 1,,2"), "experiment.seeds"));
  CHECK(contains(error_of("experiment.seeds = -1"), "experiment.seeds"));
  CHECK(contains(error_of("routing.t_th_ms = nan"), "routing.t_th_ms"));
  CHECK_THROWS_AS(parse_config("routing.w_backlog = 0.9"), ConfigError);
  CHECK_THROWS_AS(parse_config("placement.h_min_m = 900"), ConfigError);
}
