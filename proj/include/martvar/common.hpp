#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace martvar {

// Tolerances used across the library.
inline constexpr double kSumTolerance = 1e-12;    // probability mass must sum to 1 within this
inline constexpr double kBayesTolerance = 1e-9;   // martingale consistency per coordinate
inline constexpr double kCertTolerance = 1e-9;    // a certificate holds iff slack >= -kCertTolerance
inline constexpr double kDualityGapTolerance = 1e-8;

/// Raised when an input exceeds a documented size guard.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a configuration value is outside the supported set.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an LP solve cannot be certified after retries.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pairwise summation. Error grows with log(n) instead of n, which matters
/// for large supports (e.g. product distributions on 2^l labels).
double stable_sum(const double* data, std::size_t n);
double stable_sum(const std::vector<double>& v);

/// Deterministic random source. All draws are derived from the raw mt19937_64
/// stream with hand-rolled conversions, so identical seeds give identical
/// sequences on every platform (std::uniform_real_distribution does not
/// guarantee that).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0,n).
  std::size_t uniform_index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

  /// Exponential with rate 1.
  double exponential();

  /// Flat Dirichlet sample of length n (normalized exponentials).
  std::vector<double> dirichlet(std::size_t n);

 private:
  std::mt19937_64 eng_;
};

/// Shortest text form that round-trips a double exactly (printf %.17g).
std::string format_double(double x);

}  // namespace martvar
