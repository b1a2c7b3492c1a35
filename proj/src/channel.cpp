#include "uavnet/channel.hpp"

#include "uavnet/env.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace uavnet::channel {

void ChannelParams::validate() const {
  if (!(fc_ghz > 0.0)) throw ConfigError("channel: fc_ghz must be positive");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("channel: bandwidth_hz must be positive");
  if (!std::isfinite(noise_power_dbm)) throw ConfigError("channel: noise_power_dbm not finite");
  if (std::isnan(rician_k_db)) throw ConfigError("channel: rician_k_db is NaN");
}

double thermal_noise_dbm(double bandwidth_hz) {
  return kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz);
}

ChannelParams make_params(double fc_ghz, double bandwidth_hz, double rician_k_db) {
  ChannelParams params;
  params.fc_ghz = fc_ghz;
  params.bandwidth_hz = bandwidth_hz;
  params.noise_power_dbm = thermal_noise_dbm(bandwidth_hz);
  params.rician_k_db = rician_k_db;
  return params;
}

double utg_path_loss_db(double d3d_m, double h_uav_m, double fc_ghz, bool los) {
  if (!(d3d_m > 0.0)) throw std::invalid_argument("utg_path_loss_db: distance must be positive");
  if (!(h_uav_m > kUtgMinAltitudeM && h_uav_m <= kUtgMaxAltitudeM)) {
    std::ostringstream msg;
    msg << "utg_path_loss_db: UAV altitude " << h_uav_m << " m outside (" << kUtgMinAltitudeM
        << ", " << kUtgMaxAltitudeM << "] m";
    throw OutOfModelError(msg.str());
  }
  const double los_db = 28.0 + 22.0 * std::log10(d3d_m) + 20.0 * std::log10(fc_ghz);
  if (los) return los_db;
  const double nlos_db = -17.5 + (46.0 - 7.0 * std::log10(h_uav_m)) * std::log10(d3d_m) +
                         20.0 * std::log10(40.0 * M_PI * fc_ghz / 3.0);
  // NLoS never beats LoS; the raw fit crosses below it at very short range.
  return std::max(los_db, nlos_db);
}

double utu_path_loss_db(double d_m, double fc_ghz) {
  if (!(d_m > 0.0)) throw std::invalid_argument("utu_path_loss_db: distance must be positive");
  return 20.0 * std::log10(d_m) + 20.0 * std::log10(fc_ghz * 1e9) - 147.55;
}

double small_scale_power_gain(bool los, double rician_k_db, Rng& rng) {
  if (!los) {
    return -std::log(1.0 - uniform01(rng));
  }
  if (std::isinf(rician_k_db) && rician_k_db > 0.0) return 1.0;
  const double k = std::pow(10.0, rician_k_db / 10.0);
  const double los_amp = std::sqrt(k / (k + 1.0));
  const double scatter = std::sqrt(1.0 / (2.0 * (k + 1.0)));
  const double re = los_amp + scatter * standard_normal(rng);
  const double im = scatter * standard_normal(rng);
  return re * re + im * im;
}

double link_capacity_bps(double p_tx_dbm, double path_loss_db, double ss_gain, double noise_dbm,
                         double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("link_capacity_bps: bandwidth <= 0");
  if (ss_gain < 0.0 || std::isnan(ss_gain)) {
    throw std::invalid_argument("link_capacity_bps: negative small-scale gain");
  }
  if (ss_gain == 0.0) return 0.0;
  const double snr_db = p_tx_dbm - path_loss_db + 10.0 * std::log10(ss_gain) - noise_dbm;
  return bandwidth_hz * std::log2(1.0 + std::pow(10.0, snr_db / 10.0));
}

namespace {

LinkSample evaluate(const env::World& world, int uav_id, const Vec3& uav_pos, int user_id,
                    const Vec3& user_pos, double p_tx_dbm, const ChannelParams& params, Rng& rng,
                    bool clamp_altitude) {
  LinkSample link;
  link.tx_id = uav_id;
  link.rx_id = user_id;
  link.d3d_m = (uav_pos - user_pos).norm();
  link.los = world.is_los(uav_pos, user_pos);
  double h = uav_pos.z();
  if (clamp_altitude) {
    h = std::clamp(h, std::nextafter(kUtgMinAltitudeM, kUtgMaxAltitudeM), kUtgMaxAltitudeM);
  }
  link.path_loss_db = utg_path_loss_db(std::max(link.d3d_m, 1.0), h, params.fc_ghz, link.los);
  link.small_scale_power_gain = small_scale_power_gain(link.los, params.rician_k_db, rng);
  link.channel_gain_linear = channel_gain_linear(link.path_loss_db, link.small_scale_power_gain);
  link.capacity_bps = link_capacity_bps(p_tx_dbm, link.path_loss_db, link.small_scale_power_gain,
                                        params.noise_power_dbm, params.bandwidth_hz);
  return link;
}

}  // namespace

LinkSample evaluate_utg_link(const env::World& world, int uav_id, const Vec3& uav_pos,
                             int user_id, const Vec3& user_pos, double p_tx_dbm,
                             const ChannelParams& params, Rng& rng) {
  return evaluate(world, uav_id, uav_pos, user_id, user_pos, p_tx_dbm, params, rng, false);
}

LinkSample evaluate_utg_link_clamped(const env::World& world, int uav_id, const Vec3& uav_pos,
                                     int user_id, const Vec3& user_pos, double p_tx_dbm,
                                     const ChannelParams& params, Rng& rng) {
  return evaluate(world, uav_id, uav_pos, user_id, user_pos, p_tx_dbm, params, rng, true);
}

void write_csv_header(std::ostream& os) {
  os << "tx_id,rx_id,d3d_m,los,path_loss_db,ss_gain,gain_linear,capacity_bps\n";
}

void write_csv_row(std::ostream& os, const LinkSample& link) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(10) << link.tx_id << ',' << link.rx_id << ',' << link.d3d_m << ','
      << (link.los ? 1 : 0) << ',' << link.path_loss_db << ',' << link.small_scale_power_gain
      << ',' << link.channel_gain_linear << ',' << link.capacity_bps << '\n';
  os << buf.str();
}

}  // namespace uavnet::channel
