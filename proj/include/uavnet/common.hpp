#ifndef UAVNET_COMMON_HPP
#define UAVNET_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace uavnet {

using Vec3 = Eigen::Vector3d;
using Rng = std::mt19937_64;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Invalid or infeasible configuration (bad parameter, impossible layout, ...).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input outside the validity regime of an empirical model.
class OutOfModelError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Training produced a non-finite value.
class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Derives an independent stream seed from a base seed and a tag (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform draw in [0, 1) built from raw engine output so that streams are
// identical across standard library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Standard normal via Box-Muller; one draw per call.
inline double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) {
    u1 = uniform01(rng);
  }
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace uavnet

#endif  // UAVNET_COMMON_HPP
