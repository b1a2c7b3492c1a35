#ifndef UAVNET_ENV_HPP
#define UAVNET_ENV_HPP

#include "uavnet/common.hpp"

#include <iosfwd>
#include <vector>

namespace uavnet::env {

inline constexpr double kUserHeightM = 1.5;

enum class Mobility { QuasiStationary, RandomWaypoint };

/// Statistical description of an urban area (ITU local building model)
/// plus the ground population living in it.
struct WorldConfig {
  double area_x_m = 1000.0;
  double area_y_m = 1000.0;
  double alpha = 0.3;   // built-up area ratio
  double beta = 300.0;  // buildings per km^2
  double delta_m = 30.0;  // mean building height (Rayleigh)
  Vec3 gcs_position = Vec3(0.0, 500.0, 0.0);
  int num_users = 0;
  Mobility user_mobility = Mobility::QuasiStationary;
  double user_speed_min_mps = 0.5;
  double user_speed_max_mps = 1.5;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Building {
  double x = 0.0;  // lower-left corner
  double y = 0.0;
  double width = 0.0;
  double depth = 0.0;
  double height_m = 0.0;
};

struct UserState {
  Vec3 position = Vec3::Zero();
  Vec3 waypoint = Vec3::Zero();
  double speed_mps = 0.0;
};

struct Airspace {
  double x_max_m = 1000.0;
  double y_max_m = 1000.0;
  double h_min_m = 100.0;
  double h_max_m = 800.0;

  bool contains(const Vec3& p) const {
    return p.x() >= 0.0 && p.x() <= x_max_m && p.y() >= 0.0 && p.y() <= y_max_m &&
           p.z() >= h_min_m && p.z() <= h_max_m;
  }
  Vec3 clip(const Vec3& p) const;
};

/// Hover + propulsion energy: per slot, hover_power_w * dt + joules_per_m * distance.
struct EnergyModel {
  double hover_power_w = 100.0;
  double joules_per_m = 5.0;

  double slot_energy_j(double distance_moved_m, double slot_dt_s) const {
    return hover_power_w * slot_dt_s + joules_per_m * distance_moved_m;
  }
};

struct UavState {
  Vec3 position = Vec3::Zero();
  double h_min_m = 100.0;
  double h_max_m = 800.0;
  double tx_power_dbm = 24.0;
  double cumulative_energy_j = 0.0;
};

/// One UAV's movement for a slot: distance along the (pitch, yaw) direction.
struct UavMove {
  double distance_m = 0.0;
  double pitch_rad = 0.0;
  double yaw_rad = 0.0;
};

struct UavStepResult {
  UavState state;
  bool violated_boundary = false;
  double distance_moved_m = 0.0;
  double energy_j = 0.0;
};

/// A generated scene. Immutable once built; safe to share across runs.
class World {
public:
  World(WorldConfig config, std::vector<Building> buildings, std::vector<UserState> users);

  const WorldConfig& config() const { return config_; }
  const std::vector<Building>& buildings() const { return buildings_; }
  const std::vector<UserState>& users() const { return users_; }
  const Vec3& gcs_position() const { return config_.gcs_position; }

  /// Geometric line-of-sight between two points. Symmetric; a == b counts as LoS.
  bool is_los(const Vec3& a, const Vec3& b) const;

  void write_csv(std::ostream& os) const;

private:
  WorldConfig config_;
  std::vector<Building> buildings_;
  std::vector<UserState> users_;
  // Uniform grid over the area; each cell lists buildings overlapping it.
  double cell_m_ = 1.0;
  int cells_x_ = 1;
  int cells_y_ = 1;
  std::vector<std::vector<int>> cell_index_;
};

/// Number of buildings the configuration asks for: round(beta * area_km2).
int building_count(const WorldConfig& config);

World generate_world(const WorldConfig& config);

/// Segment test against a single box footprint x [0, height]; exposed for tests.
bool segment_hits_building(const Building& bld, const Vec3& a, const Vec3& b);

UavStepResult step_uav(const UavState& state, const UavMove& move, double slot_dt_s,
                       const Airspace& airspace, const EnergyModel& energy = {});

void step_users(std::vector<UserState>& users, const WorldConfig& config, double slot_dt_s,
                Rng& rng);

/// Draws a fresh random waypoint and speed for a user.
void retarget_user(UserState& user, const WorldConfig& config, Rng& rng);

}  // namespace uavnet::env

#endif  // UAVNET_ENV_HPP
