#include "uavnet/env.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace uavnet::env {

void WorldConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("world: " + what); };
  if (!(area_x_m > 0.0) || !(area_y_m > 0.0)) fail("area dimensions must be positive");
  if (!(alpha >= 0.0 && alpha < 1.0)) fail("alpha must lie in [0, 1)");
  if (!(beta >= 0.0)) fail("beta must be non-negative");
  if (!(delta_m > 0.0)) fail("delta_m must be positive");
  if (num_users < 0) fail("num_users must be non-negative");
  if (!(user_speed_min_mps >= 0.0) || user_speed_max_mps < user_speed_min_mps) {
    fail("user speed bounds must satisfy 0 <= min <= max");
  }
}

Vec3 Airspace::clip(const Vec3& p) const {
  return Vec3(std::clamp(p.x(), 0.0, x_max_m), std::clamp(p.y(), 0.0, y_max_m),
              std::clamp(p.z(), h_min_m, h_max_m));
}

int building_count(const WorldConfig& config) {
  const double area_km2 = config.area_x_m * config.area_y_m * 1e-6;
  return static_cast<int>(std::lround(config.beta * area_km2));
}

bool segment_hits_building(const Building& bld, const Vec3& a, const Vec3& b) {
  // Clip the parametric segment a + t (b - a), t in [0, 1], against the footprint slabs.
  double t_enter = 0.0;
  double t_exit = 1.0;
  const double lo[2] = {bld.x, bld.y};
  const double hi[2] = {bld.x + bld.width, bld.y + bld.depth};
  for (int axis = 0; axis < 2; ++axis) {
    const double origin = a[axis];
    const double dir = b[axis] - a[axis];
    if (dir == 0.0) {
      if (origin < lo[axis] || origin > hi[axis]) return false;
      continue;
    }
    double t0 = (lo[axis] - origin) / dir;
    double t1 = (hi[axis] - origin) / dir;
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return false;
  }
  // Height is linear in t, so its minimum over the crossing sits at an end.
  const double z_enter = a.z() + t_enter * (b.z() - a.z());
  const double z_exit = a.z() + t_exit * (b.z() - a.z());
  return std::min(z_enter, z_exit) <= bld.height_m;
}

World::World(WorldConfig config, std::vector<Building> buildings, std::vector<UserState> users)
    : config_(std::move(config)), buildings_(std::move(buildings)), users_(std::move(users)) {
  double max_side = 1.0;
  for (const auto& bld : buildings_) max_side = std::max({max_side, bld.width, bld.depth});
  cell_m_ = std::max(2.0 * max_side, 10.0);
  cells_x_ = std::max(1, static_cast<int>(std::ceil(config_.area_x_m / cell_m_)));
  cells_y_ = std::max(1, static_cast<int>(std::ceil(config_.area_y_m / cell_m_)));
  cell_index_.assign(static_cast<std::size_t>(cells_x_) * cells_y_, {});
  for (int i = 0; i < static_cast<int>(buildings_.size()); ++i) {
    const auto& bld = buildings_[i];
    const int cx0 = std::clamp(static_cast<int>(std::floor(bld.x / cell_m_)), 0, cells_x_ - 1);
    const int cx1 =
        std::clamp(static_cast<int>(std::floor((bld.x + bld.width) / cell_m_)), 0, cells_x_ - 1);
    const int cy0 = std::clamp(static_cast<int>(std::floor(bld.y / cell_m_)), 0, cells_y_ - 1);
    const int cy1 =
        std::clamp(static_cast<int>(std::floor((bld.y + bld.depth) / cell_m_)), 0, cells_y_ - 1);
    for (int cy = cy0; cy <= cy1; ++cy) {
      for (int cx = cx0; cx <= cx1; ++cx) {
        cell_index_[static_cast<std::size_t>(cy) * cells_x_ + cx].push_back(i);
      }
    }
  }
}

bool World::is_los(const Vec3& a, const Vec3& b) const {
  if (buildings_.empty() || a == b) return true;
  // Buildings lower than both endpoints cannot block.
  const double floor = std::min(a.z(), b.z());
  // Samples spaced at most one cell apart; every cell the projection crosses is
  // then within one cell (Chebyshev) of some sample's cell.
  const double span = std::hypot(b.x() - a.x(), b.y() - a.y());
  const int samples = static_cast<int>(std::ceil(span / cell_m_)) + 1;
  int last_cx = -10;
  int last_cy = -10;
  for (int s = 0; s < samples; ++s) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(s) / (samples - 1);
    const double px = a.x() + t * (b.x() - a.x());
    const double py = a.y() + t * (b.y() - a.y());
    const int cx = static_cast<int>(std::floor(px / cell_m_));
    const int cy = static_cast<int>(std::floor(py / cell_m_));
    if (cx == last_cx && cy == last_cy) continue;
    last_cx = cx;
    last_cy = cy;
    for (int dy = -1; dy <= 1; ++dy) {
      const int ny = cy + dy;
      if (ny < 0 || ny >= cells_y_) continue;
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = cx + dx;
        if (nx < 0 || nx >= cells_x_) continue;
        for (int idx : cell_index_[static_cast<std::size_t>(ny) * cells_x_ + nx]) {
          const auto& bld = buildings_[idx];
          if (bld.height_m < floor) continue;
          if (segment_hits_building(bld, a, b)) return false;
        }
      }
    }
  }
  return true;
}

void World::write_csv(std::ostream& os) const {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << "x,y,w,d,h\n" << std::fixed << std::setprecision(3);
  for (const auto& bld : buildings_) {
    buf << bld.x << ',' << bld.y << ',' << bld.width << ',' << bld.depth << ',' << bld.height_m
        << '\n';
  }
  os << buf.str();
}

void retarget_user(UserState& user, const WorldConfig& config, Rng& rng) {
  user.waypoint = Vec3(uniform(rng, 0.0, config.area_x_m), uniform(rng, 0.0, config.area_y_m),
                       kUserHeightM);
  user.speed_mps = uniform(rng, config.user_speed_min_mps, config.user_speed_max_mps);
}

World generate_world(const WorldConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, 0x574f524cULL));
  const int count = building_count(config);
  std::vector<Building> buildings;
  if (count > 0) {
    if (config.alpha <= 0.0) {
      throw ConfigError("world: alpha must be positive when buildings are requested");
    }
    const double area = config.area_x_m * config.area_y_m;
    const double side = std::sqrt(config.alpha * area / count);
    int nx = std::max(1, static_cast<int>(
                             std::lround(std::sqrt(count * config.area_x_m / config.area_y_m))));
    nx = std::min(nx, count);
    const int ny = (count + nx - 1) / nx;
    const double cell_x = config.area_x_m / nx;
    const double cell_y = config.area_y_m / ny;
    if (side > cell_x || side > cell_y) {
      std::ostringstream msg;
      msg << "world: infeasible packing, square side " << side << " m exceeds grid cell "
          << std::min(cell_x, cell_y) << " m (alpha too high for beta)";
      throw ConfigError(msg.str());
    }
    // Pick `count` of the nx*ny cells (partial Fisher-Yates), then jitter within each.
    std::vector<int> cells(static_cast<std::size_t>(nx) * ny);
    for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
    for (int i = 0; i < count; ++i) {
      const auto remaining = static_cast<std::uint64_t>(cells.size() - i);
      const auto j = i + static_cast<int>(rng() % remaining);
      std::swap(cells[i], cells[j]);
    }
    std::sort(cells.begin(), cells.begin() + count);
    const double sigma = config.delta_m / std::sqrt(M_PI / 2.0);
    buildings.reserve(count);
    for (int i = 0; i < count; ++i) {
      const int col = cells[i] % nx;
      const int row = cells[i] / nx;
      Building bld;
      bld.width = side;
      bld.depth = side;
      bld.x = col * cell_x + uniform(rng, 0.0, cell_x - side);
      bld.y = row * cell_y + uniform(rng, 0.0, cell_y - side);
      bld.height_m = sigma * std::sqrt(-2.0 * std::log(1.0 - uniform01(rng)));
      buildings.push_back(bld);
    }
  }

  Rng user_rng(derive_seed(config.seed, 0x55534552ULL));
  std::vector<UserState> users(static_cast<std::size_t>(config.num_users));
  for (auto& user : users) {
    user.position = Vec3(uniform(user_rng, 0.0, config.area_x_m),
                         uniform(user_rng, 0.0, config.area_y_m), kUserHeightM);
    if (config.user_mobility == Mobility::RandomWaypoint) {
      retarget_user(user, config, user_rng);
    } else {
      user.waypoint = user.position;
    }
  }
  return World(config, std::move(buildings), std::move(users));
}

UavStepResult step_uav(const UavState& state, const UavMove& move, double slot_dt_s,
                       const Airspace& airspace, const EnergyModel& energy) {
  if (!std::isfinite(move.distance_m) || !std::isfinite(move.pitch_rad) ||
      !std::isfinite(move.yaw_rad) || !std::isfinite(slot_dt_s)) {
    throw std::invalid_argument("step_uav: non-finite action");
  }
  if (move.distance_m < 0.0) throw std::invalid_argument("step_uav: negative distance");
  const double cp = std::cos(move.pitch_rad);
  const Vec3 displacement = move.distance_m * Vec3(cp * std::cos(move.yaw_rad),
                                                   cp * std::sin(move.yaw_rad),
                                                   std::sin(move.pitch_rad));
  Airspace box = airspace;
  box.h_min_m = state.h_min_m;
  box.h_max_m = state.h_max_m;
  const Vec3 target = state.position + displacement;

  UavStepResult result;
  result.violated_boundary = !box.contains(target);
  result.state = state;
  result.state.position = result.violated_boundary ? box.clip(target) : target;
  result.distance_moved_m = (result.state.position - state.position).norm();
  result.energy_j = energy.slot_energy_j(result.distance_moved_m, slot_dt_s);
  result.state.cumulative_energy_j += result.energy_j;
  return result;
}

void step_users(std::vector<UserState>& users, const WorldConfig& config, double slot_dt_s,
                Rng& rng) {
  if (config.user_mobility == Mobility::QuasiStationary) return;
  for (auto& user : users) {
    const double budget = user.speed_mps * slot_dt_s;
    const Vec3 to_target = user.waypoint - user.position;
    const double remaining = to_target.norm();
    if (remaining <= budget) {
      user.position = user.waypoint;
      retarget_user(user, config, rng);
    } else {
      user.position += to_target * (budget / remaining);
    }
  }
}

}  // namespace uavnet::env
