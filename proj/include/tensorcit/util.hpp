#ifndef TENSORCIT_UTIL_HPP
#define TENSORCIT_UTIL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tct {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Error categories, mapped to CLI exit codes (config=2, solver=3, io=4).
enum class ErrorKind { config, solver, io, domain, layout, argument };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

inline Error config_error(const std::string& msg) { return Error(ErrorKind::config, msg); }
inline Error solver_error(const std::string& msg) { return Error(ErrorKind::solver, msg); }
inline Error io_error(const std::string& msg) { return Error(ErrorKind::io, msg); }
inline Error domain_error(const std::string& msg) { return Error(ErrorKind::domain, msg); }
inline Error layout_error(const std::string& msg) { return Error(ErrorKind::layout, msg); }
inline Error argument_error(const std::string& msg) { return Error(ErrorKind::argument, msg); }

/// Counter-based generator (splitmix64 stream). The k-th draw depends only on
/// (seed, k), so noisy datasets are reproducible across platforms and languages:
///   z   = seed + (k+1) * 0x9E3779B97F4A7C15
///   z   = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z   = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   z   = z ^ (z >> 31)
///   out = (z >> 11) * 2^-52 - 1        (uniform on [-1, 1))
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0) : seed_(seed), counter_(start) {}

  static double value_at(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t z = seed + (k + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-52 - 1.0;
  }

  /// Next draw, uniform on [-1, 1).
  double next_symmetric() { return value_at(seed_, counter_++); }

  /// Next draw, uniform on [0, 1).
  double next_unit() { return 0.5 * (next_symmetric() + 1.0); }

  /// Next draw, uniform on [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  std::uint64_t counter() const { return counter_; }
  void set_counter(std::uint64_t c) { counter_ = c; }

private:
  std::uint64_t seed_;
  std::uint64_t counter_;
};

}  // namespace tct

#endif
