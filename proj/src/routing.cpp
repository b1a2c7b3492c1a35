#include "uavnet/routing.hpp"

#include "uavnet/channel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace uavnet::routing {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::ParPredict: return "par_predict";
    case Protocol::ShortestPath: return "shortest_path";
    case Protocol::BacklogAware: return "backlog_aware";
  }
  return "unknown";
}

Protocol protocol_from_string(const std::string& name) {
  if (name == "par_predict") return Protocol::ParPredict;
  if (name == "shortest_path") return Protocol::ShortestPath;
  if (name == "backlog_aware") return Protocol::BacklogAware;
  throw ConfigError("routing: unknown protocol '" + name + "'");
}

double TrafficModel::rate(long slot) const {
  const double r =
      mean_rate * (1.0 + amplitude * std::sin(2.0 * M_PI * slot / period_slots + phase_rad));
  return std::max(r, 0.0);
}

int RoutingConfig::ack_timeout_slots() const {
  return std::max(1, static_cast<int>(std::lround(t_th_ms / slot_ms)));
}

void RoutingConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("routing: " + what); };
  if (!(comm_radius_m > 0.0)) fail("comm_radius_m must be positive");
  if (!(t_th_ms > 0.0)) fail("t_th_ms must be positive");
  if (!(slot_ms > 0.0)) fail("slot_ms must be positive");
  if (w_backlog < 0.0 || w_latency < 0.0 || w_hops < 0.0) fail("weights must be >= 0");
  if (std::abs(w_backlog + w_latency + w_hops - 1.0) > 1e-9) fail("weights must sum to 1");
  if (window < 1 || predictor_hidden < 1) fail("window and predictor_hidden must be >= 1");
  if (!(predictor_lr > 0.0) || !(par_scale > 0.0)) fail("predictor_lr/par_scale must be > 0");
  if (!(link_loss >= 0.0 && link_loss < 1.0)) fail("link_loss in [0, 1)");
  if (max_retries < 0) fail("max_retries must be >= 0");
  if (!(packet_bits > 0.0) || !(bandwidth_hz > 0.0) || !(fc_ghz > 0.0)) {
    fail("packet_bits, bandwidth_hz and fc_ghz must be positive");
  }
  if (!(lattice_spacing_m > 0.0) || lattice_jitter_m < 0.0) fail("lattice geometry invalid");
  if (load < 0.0) fail("load must be >= 0");
  if (!(traffic_amplitude >= 0.0 && traffic_amplitude <= 1.0)) fail("traffic_amplitude in [0, 1]");
  if (!(traffic_period_slots > 0.0)) fail("traffic_period_slots must be positive");
  if (duration_slots < 0 || warmup_slots < 0) fail("durations must be >= 0");
}

const Vec3& Topology::position(int node) const {
  return node == gcs_id() ? gcs_position : uav_positions.at(node);
}

std::vector<int> Topology::neighbors(int node) const {
  std::vector<int> out;
  const Vec3& p = position(node);
  for (int k = 0; k <= num_uavs(); ++k) {
    if (k != node && (position(k) - p).norm() <= comm_radius_m) out.push_back(k);
  }
  return out;
}

Topology make_lattice_topology(int num_uavs, const RoutingConfig& cfg, Rng& rng) {
  if (num_uavs < 1) throw ConfigError("routing: need at least one UAV");
  std::vector<std::pair<int, int>> points;
  const int side = static_cast<int>(std::ceil(std::sqrt(num_uavs + 1.0))) + 1;
  for (int a = 0; a <= side; ++a) {
    for (int b = 0; b <= side; ++b) {
      if (a != 0 || b != 0) points.emplace_back(a, b);
    }
  }
  std::sort(points.begin(), points.end(), [](const auto& p, const auto& q) {
    const int dp = p.first * p.first + p.second * p.second;
    const int dq = q.first * q.first + q.second * q.second;
    if (dp != dq) return dp < dq;
    return p.second != q.second ? p.second < q.second : p.first < q.first;
  });
  Topology topo;
  topo.comm_radius_m = cfg.comm_radius_m;
  for (int j = 0; j < num_uavs; ++j) {
    const double jx = uniform(rng, -cfg.lattice_jitter_m, cfg.lattice_jitter_m);
    const double jy = uniform(rng, -cfg.lattice_jitter_m, cfg.lattice_jitter_m);
    topo.uav_positions.emplace_back(points[j].first * cfg.lattice_spacing_m + jx,
                                    points[j].second * cfg.lattice_spacing_m + jy, 0.0);
  }
  return topo;
}

std::vector<int> min_hops_to_gcs(const Topology& topo) {
  std::vector<int> hops(topo.num_uavs() + 1, kUnreachable);
  std::queue<int> frontier;
  hops[topo.gcs_id()] = 0;
  frontier.push(topo.gcs_id());
  while (!frontier.empty()) {
    const int a = frontier.front();
    frontier.pop();
    for (int b : topo.neighbors(a)) {
      if (hops[b] != kUnreachable) continue;
      hops[b] = hops[a] + 1;
      frontier.push(b);
    }
  }
  hops.pop_back();
  return hops;
}

int generate_arrivals(const TrafficModel& model, long slot, Rng& rng) {
  const double lambda = model.rate(slot);
  if (lambda <= 0.0) return 0;
  // Multiplication method; rates here are a few packets per slot at most.
  const double limit = std::exp(-lambda);
  int k = 0;
  double p = uniform01(rng);
  while (p > limit) {
    ++k;
    p *= uniform01(rng);
  }
  return k;
}

ParPredictor::ParPredictor(const RoutingConfig& cfg, std::uint64_t seed)
    : window_(cfg.window),
      scale_(cfg.par_scale),
      warmup_(cfg.predictor_warmup_slots),
      optimizer_(cfg.predictor_lr) {
  Rng init(seed);
  cell_ = neural::RecurrentCell<double>(1, cfg.predictor_hidden, init);
}

std::vector<double> ParPredictor::predict(const std::vector<std::deque<double>>& histories) const {
  std::vector<double> out(histories.size(), 0.0);
  std::vector<int> ready;
  for (std::size_t k = 0; k < histories.size(); ++k) {
    if (!histories[k].empty()) out[k] = histories[k].back();
    if (trained() && static_cast<int>(histories[k].size()) >= window_) {
      ready.push_back(static_cast<int>(k));
    }
  }
  if (ready.empty()) return out;
  neural::RecurrentCell<double>::Sequence seq(window_, Eigen::MatrixXd(1, ready.size()));
  for (std::size_t c = 0; c < ready.size(); ++c) {
    const auto& h = histories[ready[c]];
    const std::size_t start = h.size() - window_;
    for (int t = 0; t < window_; ++t) seq[t](0, c) = std::min(h[start + t] / scale_, 1.0);
  }
  const Eigen::VectorXd pred = cell_.predict(seq);
  for (std::size_t c = 0; c < ready.size(); ++c) {
    out[ready[c]] = std::max(pred[static_cast<Eigen::Index>(c)] * scale_, 0.0);
  }
  return out;
}

void ParPredictor::train(const std::vector<std::deque<double>>& histories) {
  std::vector<int> ready;
  for (std::size_t k = 0; k < histories.size(); ++k) {
    if (static_cast<int>(histories[k].size()) >= window_ + 1) ready.push_back(static_cast<int>(k));
  }
  if (ready.empty()) return;
  neural::RecurrentCell<double>::Sequence seq(window_, Eigen::MatrixXd(1, ready.size()));
  Eigen::VectorXd target(ready.size());
  for (std::size_t c = 0; c < ready.size(); ++c) {
    const auto& h = histories[ready[c]];
    const std::size_t start = h.size() - window_ - 1;
    for (int t = 0; t < window_; ++t) seq[t](0, c) = std::min(h[start + t] / scale_, 1.0);
    target[static_cast<Eigen::Index>(c)] = h.back() / scale_;
  }
  neural::train_step(cell_, seq, target, optimizer_);
  ++steps_;
}

std::vector<NextHopScore> score_candidates(const std::vector<CandidateMetrics>& candidates,
                                           double w_backlog, double w_latency, double w_hops) {
  std::vector<NextHopScore> out;
  if (candidates.empty()) return out;
  auto range = [&](auto field) {
    double lo = field(candidates.front());
    double hi = lo;
    for (const auto& c : candidates) {
      lo = std::min(lo, field(c));
      hi = std::max(hi, field(c));
    }
    return std::pair<double, double>(lo, hi);
  };
  auto norm = [](double v, std::pair<double, double> r) {
    return r.second > r.first ? (v - r.first) / (r.second - r.first) : 0.0;
  };
  const auto rl = range([](const CandidateMetrics& c) { return c.backlog; });
  const auto rd = range([](const CandidateMetrics& c) { return c.latency_ms; });
  const auto rh = range([](const CandidateMetrics& c) { return c.hops; });
  for (const auto& c : candidates) {
    NextHopScore s;
    s.candidate = c.id;
    s.backlog = norm(c.backlog, rl);
    s.latency = norm(c.latency_ms, rd);
    s.hops = norm(c.hops, rh);
    s.score = w_backlog * s.backlog + w_latency * s.latency + w_hops * s.hops;
    out.push_back(s);
  }
  return out;
}

int select_next_hop(const std::vector<CandidateMetrics>& candidates, double w_backlog,
                    double w_latency, double w_hops) {
  const auto scores = score_candidates(candidates, w_backlog, w_latency, w_hops);
  int best = -1;
  double best_score = 0.0;
  for (const auto& s : scores) {
    if (best < 0 || s.score < best_score || (s.score == best_score && s.candidate < best)) {
      best = s.candidate;
      best_score = s.score;
    }
  }
#ifndef NDEBUG
  for (const auto& s : scores) {
    assert(s.score > best_score || (s.score == best_score && s.candidate >= best));
  }
#endif
  return best;
}

double link_latency_ms(const Topology& topo, int j, int k, const RoutingConfig& cfg) {
  const double d = std::max((topo.position(j) - topo.position(k)).norm(), 1e-3);
  const double pl = channel::utu_path_loss_db(d, cfg.fc_ghz);
  const double rate = channel::link_capacity_bps(cfg.tx_power_dbm, pl, 1.0,
                                                 channel::thermal_noise_dbm(cfg.bandwidth_hz),
                                                 cfg.bandwidth_hz);
  constexpr double kLightMps = 299792458.0;
  return 1e3 * (cfg.packet_bits / rate + d / kLightMps);
}

namespace {

struct Queued {
  long packet;
  long seq;  // enqueue order within this queue
};

struct LostTransmission {
  long packet;
  int sender;
  int target;
  long deadline;
};

// Independent re-derivation of the declared score for the audit.
int brute_force_argmin(const std::vector<CandidateMetrics>& c, double wl, double wd, double wh) {
  int best = -1;
  double best_score = INFINITY;
  for (const auto& x : c) {
    double lmin = INFINITY, lmax = -INFINITY, dmin = INFINITY, dmax = -INFINITY;
    double hmin = INFINITY, hmax = -INFINITY;
    for (const auto& y : c) {
      lmin = std::min(lmin, y.backlog);
      lmax = std::max(lmax, y.backlog);
      dmin = std::min(dmin, y.latency_ms);
      dmax = std::max(dmax, y.latency_ms);
      hmin = std::min(hmin, y.hops);
      hmax = std::max(hmax, y.hops);
    }
    const double l = lmax > lmin ? (x.backlog - lmin) / (lmax - lmin) : 0.0;
    const double d = dmax > dmin ? (x.latency_ms - dmin) / (dmax - dmin) : 0.0;
    const double h = hmax > hmin ? (x.hops - hmin) / (hmax - hmin) : 0.0;
    const double s = wl * l + wd * d + wh * h;
    if (s < best_score || (s == best_score && x.id < best)) {
      best_score = s;
      best = x.id;
    }
  }
  return best;
}

}  // namespace

LatencyStats simulate(const RoutingConfig& cfg, Protocol protocol, const Topology& topo,
                      std::uint64_t seed, const SimulationOptions& options) {
  cfg.validate();
  const int J = topo.num_uavs();
  const int gcs = topo.gcs_id();
  const std::vector<int> hops = min_hops_to_gcs(topo);
  for (int j = 0; j < J; ++j) {
    if (hops[j] == kUnreachable) {
      throw ConfigError("routing: UAV " + std::to_string(j) + " cannot reach the GCS");
    }
  }
  auto hop_of = [&](int node) { return node == gcs ? 0 : hops[node]; };

  // Forwarding candidates: strictly closer (in hops) neighbours.
  std::vector<std::vector<int>> forward(J);
  std::vector<std::vector<double>> latency(J, std::vector<double>(J + 1, 0.0));
  for (int j = 0; j < J; ++j) {
    for (int k : topo.neighbors(j)) {
      if (hop_of(k) < hops[j]) {
        forward[j].push_back(k);
        latency[j][k] = link_latency_ms(topo, j, k, cfg);
      }
    }
  }

  const auto gcs_degree = static_cast<double>(topo.neighbors(gcs).size());
  Rng traffic_rng(derive_seed(seed, 0x545241ULL));
  Rng link_rng(derive_seed(seed, 0x4c494eULL));
  std::vector<TrafficModel> traffic(J);
  for (auto& m : traffic) {
    m.mean_rate = cfg.load * gcs_degree / J;
    m.amplitude = cfg.traffic_amplitude;
    m.period_slots = cfg.traffic_period_slots;
    m.phase_rad = uniform(traffic_rng, 0.0, 2.0 * M_PI);
  }

  double wl = cfg.w_backlog, wd = cfg.w_latency, wh = cfg.w_hops;
  if (protocol == Protocol::ShortestPath) wl = 0.0, wd = 0.0, wh = 1.0;
  if (protocol == Protocol::BacklogAware) wl = 1.0, wd = 0.0, wh = 0.0;
  const bool predictive = protocol == Protocol::ParPredict;
  ParPredictor predictor(cfg, derive_seed(seed, 0x4c53544dULL));

  const int timeout = cfg.ack_timeout_slots();
  std::vector<Packet> packets;
  std::vector<std::deque<Queued>> queue(J);
  std::vector<std::deque<long>> retransmit(J);
  std::vector<long> enqueue_seq(J, 0);
  std::vector<long> last_dequeued(J, -1);
  std::vector<LostTransmission> lost;
  std::vector<std::vector<long>> cooldown(J, std::vector<long>(J + 1, -1));
  std::vector<std::deque<double>> history(J);
  std::vector<double> latencies;
  LatencyStats stats;
  InvariantReport local;
  InvariantReport& report = options.report != nullptr ? *options.report : local;

  auto push_history = [&](int k, double v) {
    history[k].push_back(v);
    while (static_cast<int>(history[k].size()) > cfg.window + 1) history[k].pop_front();
  };

  for (long t = 0; t < cfg.duration_slots; ++t) {
    std::vector<int> arrived(J, 0);

    // Sensed traffic enters the origin queue.
    for (int k = 0; k < J; ++k) {
      const int n = options.scripted_arrivals != nullptr
                        ? (*options.scripted_arrivals)[k][static_cast<std::size_t>(t)]
                        : generate_arrivals(traffic[k], t, traffic_rng);
      for (int a = 0; a < n; ++a) {
        Packet p;
        p.id = static_cast<long>(packets.size());
        p.origin = k;
        p.created_slot = t;
        packets.push_back(std::move(p));
        queue[k].push_back({packets.back().id, enqueue_seq[k]++});
      }
      arrived[k] += n;
      stats.generated += n;
    }

    // Unacknowledged transmissions time out.
    for (auto it = lost.begin(); it != lost.end();) {
      if (it->deadline > t) {
        ++it;
        continue;
      }
      Packet& p = packets[it->packet];
      cooldown[it->sender][it->target] = t + timeout;
      if (++p.retries > cfg.max_retries) {
        ++stats.dropped;
      } else {
        retransmit[it->sender].push_back(it->packet);
      }
      it = lost.erase(it);
    }

    // Backlog snapshot seen by every sender this slot.
    std::vector<double> backlog(J + 1, 0.0);
    for (int k = 0; k < J; ++k) {
      backlog[k] = static_cast<double>(queue[k].size() + retransmit[k].size());
    }
    std::vector<double> expected = backlog;
    if (predictive) {
      const std::vector<double> par = predictor.predict(history);
      for (int k = 0; k < J; ++k) expected[k] = std::max(0.0, backlog[k] + par[k] - 1.0);
    }

    std::vector<std::tuple<long, int, int>> incoming;
    for (int j = 0; j < J; ++j) {
      const bool from_retransmit = !retransmit[j].empty();
      if (!from_retransmit && queue[j].empty()) continue;
      std::vector<CandidateMetrics> cands;
      for (int k : forward[j]) {
        if (cooldown[j][k] > t) continue;
        cands.push_back({k, k == gcs ? 0.0 : expected[k], latency[j][k],
                         static_cast<double>(hop_of(k))});
      }
      const int next = select_next_hop(cands, wl, wd, wh);
      if (options.audit && next != brute_force_argmin(cands, wl, wd, wh)) {
        ++report.argmin_violations;
      }
      if (next < 0) continue;  // hold

      long pid;
      if (from_retransmit) {
        pid = retransmit[j].front();
        retransmit[j].pop_front();
      } else {
        const Queued q = queue[j].front();
        queue[j].pop_front();
        if (q.seq <= last_dequeued[j]) ++report.fifo_violations;
        last_dequeued[j] = q.seq;
        pid = q.packet;
      }
      if (uniform01(link_rng) < cfg.link_loss) {
        lost.push_back({pid, j, next, t + timeout});
      } else {
        incoming.emplace_back(pid, j, next);
      }
    }

    // Receptions complete at the end of the slot.
    for (const auto& [pid, j, k] : incoming) {
      Packet& p = packets[pid];
      p.hops.push_back(j);
      if (k == gcs) {
        p.delivered_slot = t;
        ++stats.delivered;
        if (p.created_slot >= cfg.warmup_slots) {
          latencies.push_back(static_cast<double>(t - p.created_slot + 1) * cfg.slot_ms);
        }
        if (options.audit) {
          std::set<int> unique(p.hops.begin(), p.hops.end());
          if (unique.size() != p.hops.size()) ++report.cycle_violations;
        }
        if (options.delivered_out != nullptr) options.delivered_out->push_back(p);
      } else {
        queue[k].push_back({pid, enqueue_seq[k]++});
        ++arrived[k];
      }
    }

    for (int k = 0; k < J; ++k) push_history(k, arrived[k]);
    if (predictive) predictor.train(history);

    if (options.audit) {
      long held = static_cast<long>(lost.size());
      for (int k = 0; k < J; ++k) {
        held += static_cast<long>(queue[k].size() + retransmit[k].size());
      }
      if (stats.generated != stats.delivered + stats.dropped + held) {
        ++report.conservation_violations;
      }
      ++report.slots_checked;
    }
  }

  stats.counted = static_cast<long>(latencies.size());
  if (!latencies.empty()) {
    double sum = 0.0;
    for (double v : latencies) sum += v;
    stats.mean_ms = sum / static_cast<double>(latencies.size());
    std::sort(latencies.begin(), latencies.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * latencies.size()));
    stats.p95_ms = latencies[std::max<std::size_t>(rank, 1) - 1];
  }
  return stats;
}

LatencyStats simulate(const RoutingConfig& cfg, Protocol protocol, int num_uavs,
                      std::uint64_t seed, const SimulationOptions& options) {
  Rng rng(derive_seed(seed, 0x544f504fULL));
  const Topology topo = make_lattice_topology(num_uavs, cfg, rng);
  return simulate(cfg, protocol, topo, seed, options);
}

void write_latency_csv(std::ostream& os, const std::vector<LatencyRow>& rows, bool header) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  if (header) buf << "protocol,J,seed,mean_ms,p95_ms,delivered,dropped\n";
  buf << std::setprecision(10);
  for (const auto& r : rows) {
    buf << to_string(r.protocol) << ',' << r.num_uavs << ',' << r.seed << ',' << r.stats.mean_ms
        << ',' << r.stats.p95_ms << ',' << r.stats.delivered << ',' << r.stats.dropped << '\n';
  }
  os << buf.str();
}

}  // namespace uavnet::routing
