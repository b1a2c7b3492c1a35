#ifndef UAVNET_CHANNEL_HPP
#define UAVNET_CHANNEL_HPP

#include "uavnet/common.hpp"

#include <iosfwd>
#include <limits>

namespace uavnet::env {
class World;
}

namespace uavnet::channel {

inline constexpr double kThermalNoiseDbmPerHz = -174.0;
// Aerial regime of the urban-macro air-to-ground path-loss table.
inline constexpr double kUtgMinAltitudeM = 22.5;
inline constexpr double kUtgMaxAltitudeM = 300.0;

struct ChannelParams {
  double fc_ghz = 2.0;
  double bandwidth_hz = 10e6;
  double noise_power_dbm = kThermalNoiseDbmPerHz + 70.0;  // 10 MHz
  double rician_k_db = 15.0;

  void validate() const;
};

/// Thermal noise over a bandwidth, -174 dBm/Hz + 10 log10(B).
double thermal_noise_dbm(double bandwidth_hz);

/// Defaults with the noise floor matched to the bandwidth.
ChannelParams make_params(double fc_ghz, double bandwidth_hz, double rician_k_db = 15.0);

struct LinkSample {
  int tx_id = -1;
  int rx_id = -1;
  double d3d_m = 0.0;
  bool los = true;
  double path_loss_db = 0.0;
  double small_scale_power_gain = 1.0;
  double channel_gain_linear = 0.0;
  double capacity_bps = 0.0;
};

/// Urban-macro aerial UtG path loss (UAV height in (22.5, 300] m).
/// Throws OutOfModelError outside that regime.
double utg_path_loss_db(double d3d_m, double h_uav_m, double fc_ghz, bool los);

/// Free-space (Friis) loss for a UAV-to-UAV link.
double utu_path_loss_db(double d_m, double fc_ghz);

/// |h|^2 with unit mean: Rician with factor K for LoS, exponential for NLoS.
/// An infinite K yields exactly 1.
double small_scale_power_gain(bool los, double rician_k_db, Rng& rng);

/// Shannon rate B log2(1 + SNR) with the small-scale gain folded into the SNR.
double link_capacity_bps(double p_tx_dbm, double path_loss_db, double ss_gain, double noise_dbm,
                         double bandwidth_hz);

/// Linear gain 10^(-PL/10) * ss_gain.
inline double channel_gain_linear(double path_loss_db, double ss_gain) {
  return std::pow(10.0, -path_loss_db / 10.0) * ss_gain;
}

/// Evaluates one UAV-to-ground link end to end: geometric LoS, path loss, a
/// fading draw, and the resulting capacity.
LinkSample evaluate_utg_link(const env::World& world, int uav_id, const Vec3& uav_pos,
                             int user_id, const Vec3& user_pos, double p_tx_dbm,
                             const ChannelParams& params, Rng& rng);

/// Same, for an altitude that may leave the table's regime: the altitude used
/// in the height-dependent term is clamped into (22.5, 300] m.
LinkSample evaluate_utg_link_clamped(const env::World& world, int uav_id, const Vec3& uav_pos,
                                     int user_id, const Vec3& user_pos, double p_tx_dbm,
                                     const ChannelParams& params, Rng& rng);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const LinkSample& link);

}  // namespace uavnet::channel

#endif  // UAVNET_CHANNEL_HPP
