#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

// Counter-based random streams. Every draw is a pure function of
// (stream key, counter), so results never depend on evaluation order and
// distinct purposes (noise, block sampling, data generation, graphs) can
// consume from independent streams without interfering.

namespace dsbcd::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derive a stream key by folding an arbitrary list of integer parts into a
// base seed. Used as the single seed-splitting mechanism everywhere:
// master seed -> cell -> run -> (agent, round, purpose).
template <typename... Parts>
constexpr std::uint64_t derive(std::uint64_t base, Parts... parts) {
  std::uint64_t h = finalize(base + kGolden);
  ((h = finalize(h ^ finalize(static_cast<std::uint64_t>(parts) + kGolden))),
   ...);
  return h;
}

// Purpose tags, mixed into stream keys so draws for different uses never
// alias even at equal (agent, round) coordinates.
namespace purpose {
inline constexpr std::uint64_t kBlockPick = 0xB10C;
inline constexpr std::uint64_t kNoise = 0x401E;
inline constexpr std::uint64_t kObjective = 0x0B7E;
inline constexpr std::uint64_t kGraph = 0x64AF;
inline constexpr std::uint64_t kCell = 0xCE11;
inline constexpr std::uint64_t kRun = 0x52EE;
inline constexpr std::uint64_t kSchedule = 0x5C8D;
inline constexpr std::uint64_t kEngine = 0xE461;
}  // namespace purpose

// Inverse of the standard normal CDF, Acklam's rational approximation
// (relative error below 1.2e-9). Exactly antisymmetric around u = 1/2, so
// streams built on it are unbiased by construction.
inline double inverse_normal_cdf(double u) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u > 1.0 - low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - u));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = u - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// A keyed counter-based stream: value i is finalize(key + (i+1)*golden),
// i.e. splitmix64 evaluated at an arbitrary position.
struct Stream {
  std::uint64_t key = 0;

  std::uint64_t bits(std::uint64_t counter) const {
    return finalize(key + (counter + 1) * kGolden);
  }

  // Uniform on the open interval (0, 1): 53-bit mantissa at bin centers.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via inverse CDF; one counter per variate.
  double normal(std::uint64_t counter) const {
    return inverse_normal_cdf(uniform(counter));
  }

  // Index into the categorical distribution given by cumulative weights
  // cum[0..n-1] (cum[n-1] == 1).
  template <typename Vec>
  int categorical(std::uint64_t counter, const Vec& cum) const {
    const double u = uniform(counter);
    const int n = static_cast<int>(cum.size());
    for (int s = 0; s < n; ++s) {
      if (u < cum[s]) return s;
    }
    return n - 1;
  }
};

// Stateful view over a Stream for sequential consumers (graph generation,
// shuffles). Satisfies UniformRandomBitGenerator.
struct SequentialRng {
  Stream stream;
  std::uint64_t counter = 0;

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return stream.bits(counter++); }

  double next_uniform() { return stream.uniform(counter++); }
  double next_normal() { return stream.normal(counter++); }

  // Unbiased-enough bounded draw via 128-bit multiply (Lemire).
  std::uint64_t next_below(std::uint64_t n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>((*this)()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }
};

}  // namespace dsbcd::rng
