#include "uavnet/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace uavnet::metrics {

double jain_index(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("jain_index: empty input");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : values) {
    if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("jain_index: negative value");
    sum += v;
    sum_sq += v * v;
  }
  if (sum_sq == 0.0) return 1.0;
  return sum * sum / (static_cast<double>(values.size()) * sum_sq);
}

double energy_efficiency(double bits, double joules) {
  if (!(joules > 0.0)) throw std::invalid_argument("energy_efficiency: energy must be positive");
  if (bits == 0.0) return 0.0;
  return bits / joules;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t config_hash(const std::map<std::string, std::string>& entries) {
  std::string text;
  for (const auto& [key, value] : entries) text += key + "=" + value + "\n";
  return fnv1a(text);
}

void RunSummary::write_csv_header(std::ostream& os, const std::vector<std::string>& scalar_names) {
  os << "experiment,config_hash,seed";
  for (const auto& name : scalar_names) os << ',' << name;
  os << '\n';
}

void RunSummary::write_csv_row(std::ostream& os,
                               const std::vector<std::string>& scalar_names) const {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << experiment << ',' << std::hex << std::setw(16) << std::setfill('0') << config_hash
      << std::dec << std::setfill(' ') << ',' << seed << std::setprecision(10);
  for (const auto& name : scalar_names) {
    auto it = scalars.find(name);
    buf << ',';
    if (it != scalars.end()) buf << it->second;
  }
  buf << '\n';
  os << buf.str();
}

}  // namespace uavnet::metrics
