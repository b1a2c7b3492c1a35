#ifndef UAVNET_METRICS_HPP
#define UAVNET_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uavnet::metrics {

/// Jain's fairness index (sum x)^2 / (n sum x^2). All-zero input is perfectly
/// fair by convention (returns 1).
double jain_index(std::span<const double> values);

/// Bits per joule; zero bits gives 0. Throws on non-positive energy.
double energy_efficiency(double bits, double joules);

struct RunSummary {
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> scalars;       // ordered by name
  std::map<std::string, std::string> series;   // name -> file

  static void write_csv_header(std::ostream& os, const std::vector<std::string>& scalar_names);
  void write_csv_row(std::ostream& os, const std::vector<std::string>& scalar_names) const;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

/// FNV-1a over `key=value` entries sorted by key, so field order never matters.
std::uint64_t config_hash(const std::map<std::string, std::string>& entries);

}  // namespace uavnet::metrics

#endif  // UAVNET_METRICS_HPP
