#ifndef UAVNET_ROUTING_HPP
#define UAVNET_ROUTING_HPP

// Slotted packet simulation of relay UAVs forwarding sensed traffic to a
// ground control station, comparing next-hop selection protocols.

#include "uavnet/common.hpp"
#include "uavnet/neural.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace uavnet::routing {

enum class Protocol { ParPredict, ShortestPath, BacklogAware };

std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& name);

struct TrafficModel {
  double mean_rate = 0.0;        // packets per slot
  double amplitude = 0.8;        // relative sinusoid amplitude, in [0, 1]
  double period_slots = 400.0;
  double phase_rad = 0.0;

  double rate(long slot) const;
};

struct RoutingConfig {
  double comm_radius_m = 10.0;
  double t_th_ms = 10.0;
  double slot_ms = 1.0;
  double w_backlog = 1.0 / 3.0;
  double w_latency = 1.0 / 3.0;
  double w_hops = 1.0 / 3.0;
  int window = 8;                 // PAR history used by the predictor
  int predictor_hidden = 8;
  double predictor_lr = 0.01;
  double par_scale = 8.0;         // packets/slot mapped to 1.0 at the predictor input
  int predictor_warmup_slots = 50;
  double link_loss = 0.02;
  int max_retries = 8;
  double packet_bits = 10000.0;
  double tx_power_dbm = 24.0;
  double fc_ghz = 2.4;
  double bandwidth_hz = 10e6;
  double lattice_spacing_m = 8.0;
  double lattice_jitter_m = 0.5;
  double load = 0.7;              // total offered load relative to the GCS ingress capacity
  double traffic_amplitude = 0.8;
  double traffic_period_slots = 400.0;
  long duration_slots = 5000;
  long warmup_slots = 500;         // packets created earlier are not counted

  int ack_timeout_slots() const;
  void validate() const;
};

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

struct Topology {
  std::vector<Vec3> uav_positions;
  Vec3 gcs_position = Vec3::Zero();
  double comm_radius_m = 10.0;

  int num_uavs() const { return static_cast<int>(uav_positions.size()); }
  /// Node id num_uavs() is the GCS.
  int gcs_id() const { return num_uavs(); }
  const Vec3& position(int node) const;
  std::vector<int> neighbors(int node) const;
};

/// Lattice with the GCS at a corner; UAVs on the J nearest lattice points.
Topology make_lattice_topology(int num_uavs, const RoutingConfig& cfg, Rng& rng);

/// Breadth-first hop counts to the GCS; unreachable UAVs get kUnreachable.
std::vector<int> min_hops_to_gcs(const Topology& topo);

/// Poisson draw for one UAV and slot.
int generate_arrivals(const TrafficModel& model, long slot, Rng& rng);

/// One-step-ahead PAR forecaster shared by all UAVs.
class ParPredictor {
public:
  ParPredictor(const RoutingConfig& cfg, std::uint64_t seed);

  /// Next-slot PAR for each history; histories shorter than the window or an
  /// untrained cell fall back to the last observed value (0 when empty).
  std::vector<double> predict(const std::vector<std::deque<double>>& histories) const;
  /// One Adam step on every history long enough to form (window, next) pairs.
  void train(const std::vector<std::deque<double>>& histories);
  bool trained() const { return steps_ >= warmup_; }
  const neural::RecurrentCell<double>& cell() const { return cell_; }

private:
  int window_;
  double scale_;
  long warmup_;
  long steps_ = 0;
  neural::RecurrentCell<double> cell_;
  neural::AdamOptimizer<double> optimizer_;
};

struct NextHopScore {
  int candidate = -1;
  double backlog = 0.0;
  double latency = 0.0;
  double hops = 0.0;
  double score = 0.0;
};

struct CandidateMetrics {
  int id = -1;
  double backlog = 0.0;     // packets (possibly predicted)
  double latency_ms = 0.0;
  double hops = 0.0;
};

/// Min-max normalizes each metric over the candidates (all-equal -> 0) and
/// scores w_l*l + w_d*d + w_h*h.
std::vector<NextHopScore> score_candidates(const std::vector<CandidateMetrics>& candidates,
                                           double w_backlog, double w_latency, double w_hops);

/// Lowest score; ties go to the lowest id. Returns -1 for an empty set.
int select_next_hop(const std::vector<CandidateMetrics>& candidates, double w_backlog,
                    double w_latency, double w_hops);

/// Per-hop latency j -> k: transmission time of one packet at the Friis
/// capacity plus propagation, in ms.
double link_latency_ms(const Topology& topo, int j, int k, const RoutingConfig& cfg);

struct Packet {
  long id = 0;
  int origin = -1;
  long created_slot = 0;
  long delivered_slot = -1;
  int retries = 0;
  std::vector<int> hops;  // senders of the successful transmissions, in order
};

struct LatencyStats {
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  long delivered = 0;
  long dropped = 0;
  long generated = 0;
  long counted = 0;  // delivered packets created after warm-up
};

/// Counters from the optional invariant audit.
struct InvariantReport {
  long slots_checked = 0;
  long conservation_violations = 0;
  long fifo_violations = 0;
  long cycle_violations = 0;
  long argmin_violations = 0;

  long total() const {
    return conservation_violations + fifo_violations + cycle_violations + argmin_violations;
  }
};

struct SimulationOptions {
  bool audit = false;             // check invariants every slot
  InvariantReport* report = nullptr;
  /// Replaces the generated arrivals: (uav, slot) -> count.
  std::vector<std::vector<int>>* scripted_arrivals = nullptr;
  std::vector<Packet>* delivered_out = nullptr;
};

LatencyStats simulate(const RoutingConfig& cfg, Protocol protocol, const Topology& topo,
                      std::uint64_t seed, const SimulationOptions& options = {});

/// Builds the lattice for `num_uavs` from `seed` and simulates.
LatencyStats simulate(const RoutingConfig& cfg, Protocol protocol, int num_uavs,
                      std::uint64_t seed, const SimulationOptions& options = {});

struct LatencyRow {
  Protocol protocol;
  int num_uavs;
  std::uint64_t seed;
  LatencyStats stats;
};

/// `protocol,J,seed,mean_ms,p95_ms,delivered,dropped`
void write_latency_csv(std::ostream& os, const std::vector<LatencyRow>& rows, bool header);

}  // namespace uavnet::routing

#endif  // UAVNET_ROUTING_HPP
