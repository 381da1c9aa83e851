#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace rulasim {

/// Deterministic random stream: a mt19937_64 engine with hand-rolled
/// distributions, so that sequences are bit-identical across standard
/// library implementations. Substreams are addressed by (master, a, b);
/// std::seed_seq expansion is fully specified by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng derive(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(master),
                      static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(a),
                      static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b),
                      static_cast<std::uint32_t>(b >> 32)};
    Rng rng(0);
    rng.engine_.seed(seq);
    return rng;
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached and returned by the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_positive();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Circularly-symmetric complex normal with E{|z|^2} = 1, i.e. real and
  /// imaginary parts are independent N(0, 1/2). Does not touch the
  /// real-normal spare cache.
  std::complex<double> cnormal() {
    const double u1 = uniform_positive();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

 private:
  // Uniform on (0, 1]; keeps log() finite.
  double uniform_positive() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rulasim
