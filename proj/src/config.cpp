#include "uavnet/config.hpp"

#include "uavnet/metrics.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace uavnet::config {

namespace {

enum class Bound { Any, NonNegative, Positive };

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

// Thrown by setters; the parser adds line and key.
struct BadValue {
  std::string what;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (out.empty() || (s.size() > 0 && s.back() == ',')) throw BadValue{"malformed list"};
  for (const auto& x : out) {
    if (x.empty()) throw BadValue{"empty list element"};
  }
  return out;
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    if constexpr (std::is_floating_point_v<T>) throw BadValue{"expected a number, got '" + s + "'"};
    else if constexpr (std::is_signed_v<T>) throw BadValue{"expected an integer, got '" + s + "'"};
    else throw BadValue{"expected an unsigned integer, got '" + s + "'"};
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw BadValue{"value must be finite"};
  }
  return v;
}

template <class T>
void check_bound(T v, Bound bound) {
  if (bound == Bound::Positive && !(v > T{0})) throw BadValue{"must be > 0"};
  if (bound == Bound::NonNegative && !(v >= T{0})) throw BadValue{"must be >= 0"};
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
std::string format_value(T v) {
  if constexpr (std::is_floating_point_v<T>) return format_double(v);
  else return std::to_string(v);
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_value(v[i]);
  }
  return out;
}

template <class T, class Access>
Field scalar(std::string key, Access access, Bound bound = Bound::Any) {
  return {std::move(key),
          [access](const ExperimentConfig& c) {
            return format_value(access(const_cast<ExperimentConfig&>(c)));
          },
          [access, bound](ExperimentConfig& c, const std::string& s) {
            const T v = parse_number<T>(s);
            check_bound(v, bound);
            access(c) = v;
          }};
}

template <class T, class Access>
Field list(std::string key, Access access, Bound bound = Bound::Any) {
  return {std::move(key),
          [access](const ExperimentConfig& c) {
            return join(access(const_cast<ExperimentConfig&>(c)));
          },
          [access, bound](ExperimentConfig& c, const std::string& s) {
            std::vector<T> out;
            for (const auto& item : split_list(s)) {
              out.push_back(parse_number<T>(item));
              check_bound(out.back(), bound);
            }
            access(c) = out;
          }};
}

#define REAL(k, m, b) scalar<double>(k, [](ExperimentConfig& c) -> double& { return c.m; }, b)
#define INT(k, m, b) scalar<int>(k, [](ExperimentConfig& c) -> int& { return c.m; }, b)
#define LONG(k, m, b) scalar<long>(k, [](ExperimentConfig& c) -> long& { return c.m; }, b)
#define INTS(k, m, b) \
  list<int>(k, [](ExperimentConfig& c) -> std::vector<int>& { return c.m; }, b)

const std::vector<Field>& fields() {
  using B = Bound;
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"experiment.kind", [](const ExperimentConfig& c) { return to_string(c.kind); },
                 [](ExperimentConfig& c, const std::string& s) {
                   if (s == "chanest") c.kind = ExperimentKind::Chanest;
                   else if (s == "placement") c.kind = ExperimentKind::Placement;
                   else if (s == "routing") c.kind = ExperimentKind::Routing;
                   else throw BadValue{"expected chanest, placement or routing, got '" + s + "'"};
                 }});
    f.push_back(list<std::uint64_t>(
        "experiment.seeds", [](ExperimentConfig& c) -> std::vector<std::uint64_t>& {
          return c.seeds;
        }));
    f.push_back({"experiment.out_dir", [](const ExperimentConfig& c) { return c.out_dir; },
                 [](ExperimentConfig& c, const std::string& s) {
                   if (s.empty()) throw BadValue{"must not be empty"};
                   c.out_dir = s;
                 }});

    f.push_back(REAL("world.area_x_m", world.area_x_m, B::Positive));
    f.push_back(REAL("world.area_y_m", world.area_y_m, B::Positive));
    f.push_back(REAL("world.alpha", world.alpha, B::NonNegative));
    f.push_back(REAL("world.beta", world.beta, B::NonNegative));
    f.push_back(REAL("world.delta_m", world.delta_m, B::Positive));
    f.push_back(REAL("world.gcs_x_m", world.gcs_position.x(), B::Any));
    f.push_back(REAL("world.gcs_y_m", world.gcs_position.y(), B::Any));

    f.push_back(INTS("chanest.hidden_sizes", chanest.hidden_sizes, B::Positive));
    f.push_back(INT("chanest.pretrain_slots", chanest.pretrain_slots, B::NonNegative));
    f.push_back(INT("chanest.online_slots", chanest.online_slots, B::NonNegative));
    f.push_back(INT("chanest.n_uavs", chanest.num_uavs, B::Positive));
    f.push_back(REAL("chanest.altitude_m", chanest.uav_altitude_m, B::Positive));
    f.push_back(REAL("chanest.bandwidth_hz", chanest.bandwidth_hz, B::Positive));
    f.push_back(REAL("chanest.fc_ghz", chanest.fc_ghz, B::Positive));
    f.push_back(REAL("chanest.tx_power_dbm", chanest.tx_power_dbm, B::Any));
    f.push_back(INT("chanest.samples_per_slot", chanest.samples_per_slot, B::Positive));
    f.push_back(REAL("chanest.slot_s", chanest.slot_s, B::Positive));
    f.push_back(REAL("chanest.gain_min_db", chanest.gain_min_db, B::Any));
    f.push_back(REAL("chanest.gain_max_db", chanest.gain_max_db, B::Any));
    f.push_back(REAL("chanest.feature_altitude_max_m", chanest.feature_altitude_max_m, B::Positive));
    f.push_back(REAL("chanest.holdout_fraction", chanest.holdout_fraction, B::NonNegative));
    f.push_back(INT("chanest.batches_per_slot", chanest.batches_per_slot, B::NonNegative));
    f.push_back(INT("chanest.batch_size", chanest.batch_size, B::Positive));
    f.push_back(INT("chanest.replay_capacity", chanest.replay_capacity, B::Positive));
    f.push_back(REAL("chanest.learning_rate", chanest.learning_rate, B::Positive));
    f.push_back(REAL("chanest.patrol_radius_m", chanest.patrol_radius_m, B::NonNegative));
    f.push_back(REAL("chanest.patrol_period_slots", chanest.patrol_period_slots, B::Positive));
    f.push_back(REAL("chanest.user_speed_min_mps", chanest.user_speed_min_mps, B::NonNegative));
    f.push_back(REAL("chanest.user_speed_max_mps", chanest.user_speed_max_mps, B::NonNegative));
    f.push_back(REAL("chanest.hover_power_w", chanest.energy.hover_power_w, B::NonNegative));
    f.push_back(REAL("chanest.joules_per_m", chanest.energy.joules_per_m, B::NonNegative));

    f.push_back(INTS("placement.n_uavs", placement_num_uavs, B::Positive));
    f.push_back(INT("placement.n_users", placement.num_users, B::Positive));
    f.push_back(REAL("placement.area_m", placement.area_m, B::Positive));
    f.push_back(REAL("placement.h_min_m", placement.h_min_m, B::Positive));
    f.push_back(REAL("placement.h_max_m", placement.h_max_m, B::Positive));
    f.push_back(REAL("placement.tx_power_dbm", placement.tx_power_dbm, B::Any));
    f.push_back(REAL("placement.fc_ghz", placement.fc_ghz, B::Positive));
    f.push_back(REAL("placement.bandwidth_hz", placement.bandwidth_hz, B::Positive));
    f.push_back(REAL("placement.qos_min_bps", placement.qos_min_bps, B::NonNegative));
    f.push_back(REAL("placement.comm_range_m", placement.comm_range_m, B::Positive));
    f.push_back(REAL("placement.d_max_m", placement.d_max_m, B::NonNegative));
    f.push_back(REAL("placement.slot_s", placement.slot_s, B::Positive));
    f.push_back(INT("placement.episode_slots", placement.episode_slots, B::Positive));
    f.push_back(REAL("placement.hover_power_w", placement.energy.hover_power_w, B::NonNegative));
    f.push_back(REAL("placement.joules_per_m", placement.energy.joules_per_m, B::NonNegative));
    f.push_back(REAL("placement.lambda_boundary", placement.lambda_boundary, B::NonNegative));
    f.push_back(
        REAL("placement.lambda_connectivity", placement.lambda_connectivity, B::NonNegative));
    f.push_back(INTS("placement.hidden_sizes", placement.hidden_sizes, B::Positive));
    f.push_back(INT("placement.episodes", placement.episodes, B::NonNegative));
    f.push_back(REAL("placement.gamma", placement.gamma, B::NonNegative));
    f.push_back(INT("placement.replay_capacity", placement.replay_capacity, B::Positive));
    f.push_back(INT("placement.batch_size", placement.batch_size, B::Positive));
    f.push_back(REAL("placement.noise_scale", placement.noise_scale, B::NonNegative));
    f.push_back(REAL("placement.tau", placement.tau, B::Positive));
    f.push_back(REAL("placement.actor_lr", placement.actor_lr, B::Positive));
    f.push_back(REAL("placement.critic_lr", placement.critic_lr, B::Positive));
    f.push_back(INT("placement.warmup_steps", placement.warmup_steps, B::NonNegative));
    f.push_back(INT("placement.eval_episodes", placement.eval_episodes, B::NonNegative));
    f.push_back(INT("placement.greedy_candidates", placement.greedy_candidates, B::Positive));
    f.push_back(
        INT("placement.validation_interval", placement.validation_interval, B::NonNegative));
    f.push_back(
        INT("placement.validation_episodes", placement.validation_episodes, B::NonNegative));

    f.push_back(INTS("routing.n_uavs", routing_num_uavs, B::Positive));
    f.push_back(REAL("routing.comm_radius_m", routing.comm_radius_m, B::Positive));
    f.push_back(REAL("routing.t_th_ms", routing.t_th_ms, B::Positive));
    f.push_back(REAL("routing.slot_ms", routing.slot_ms, B::Positive));
    f.push_back(REAL("routing.w_backlog", routing.w_backlog, B::NonNegative));
    f.push_back(REAL("routing.w_latency", routing.w_latency, B::NonNegative));
    f.push_back(REAL("routing.w_hops", routing.w_hops, B::NonNegative));
    f.push_back(INT("routing.window", routing.window, B::Positive));
    f.push_back(INT("routing.predictor_hidden", routing.predictor_hidden, B::Positive));
    f.push_back(REAL("routing.predictor_lr", routing.predictor_lr, B::Positive));
    f.push_back(REAL("routing.par_scale", routing.par_scale, B::Positive));
    f.push_back(
        INT("routing.predictor_warmup_slots", routing.predictor_warmup_slots, B::NonNegative));
    f.push_back(REAL("routing.link_loss", routing.link_loss, B::NonNegative));
    f.push_back(INT("routing.max_retries", routing.max_retries, B::NonNegative));
    f.push_back(REAL("routing.packet_bits", routing.packet_bits, B::Positive));
    f.push_back(REAL("routing.tx_power_dbm", routing.tx_power_dbm, B::Any));
    f.push_back(REAL("routing.fc_ghz", routing.fc_ghz, B::Positive));
    f.push_back(REAL("routing.bandwidth_hz", routing.bandwidth_hz, B::Positive));
    f.push_back(REAL("routing.lattice_spacing_m", routing.lattice_spacing_m, B::Positive));
    f.push_back(REAL("routing.lattice_jitter_m", routing.lattice_jitter_m, B::NonNegative));
    f.push_back(REAL("routing.load", routing.load, B::NonNegative));
    f.push_back(REAL("routing.traffic_amplitude", routing.traffic_amplitude, B::NonNegative));
    f.push_back(REAL("routing.traffic_period_slots", routing.traffic_period_slots, B::Positive));
    f.push_back(LONG("routing.duration_slots", routing.duration_slots, B::NonNegative));
    f.push_back(LONG("routing.warmup_slots", routing.warmup_slots, B::NonNegative));
    return f;
  }();
  return table;
}

#undef REAL
#undef INT
#undef LONG
#undef INTS

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Chanest: return "chanest";
    case ExperimentKind::Placement: return "placement";
    case ExperimentKind::Routing: return "routing";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("experiment.seeds: at least one seed required");
  world.validate();
  chanest.validate();
  placement.validate();
  routing.validate();
  for (int j : placement_num_uavs) {
    if (j < 1) throw ConfigError("placement.n_uavs: must be > 0");
  }
  for (int j : routing_num_uavs) {
    if (j < 1) throw ConfigError("routing.n_uavs: must be > 0");
  }
  if (placement_num_uavs.empty() || routing_num_uavs.empty()) {
    throw ConfigError("n_uavs lists must not be empty");
  }
}

ExperimentConfig parse_config(const std::string& text) {
  std::map<std::string, const Field*> by_key;
  for (const auto& f : fields()) by_key[f.key] = &f;

  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'section.key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      it->second->set(cfg, value);
    } catch (const BadValue& e) {
      throw ConfigError(where + key + ": " + e.what);
    }
  }
  cfg.placement.num_uavs = cfg.placement_num_uavs.empty() ? 1 : cfg.placement_num_uavs.front();
  cfg.validate();
  return cfg;
}

std::map<std::string, std::string> resolved_entries(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& f : fields()) out[f.key] = f.get(cfg);
  return out;
}

std::string dump_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  auto entries = resolved_entries(cfg);
  entries.erase("experiment.out_dir");
  return metrics::config_hash(entries);
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return resolved_entries(a) == resolved_entries(b);
}

}  // namespace uavnet::config
