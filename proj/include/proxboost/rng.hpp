// rng.hpp -- counter-based splittable random streams.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace proxboost {

namespace detail {

// SplitMix64 finalizer. Bijective 64-bit mixer with full avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kChildTag = 0xA5B35705987C7E6Dull;

}  // namespace detail

/**
 * A deterministic random stream keyed by (seed, hierarchical path).
 *
 * Streams derived from distinct paths are statistically independent;
 * the same (seed, path) always reproduces the same draw sequence.
 * A stream is a single-owner value: pass it by move, never share it.
 */
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  static RngStream root(std::uint64_t seed) {
    return RngStream(detail::mix64(seed + detail::kGolden));
  }

  // Independent substream for path element `index`; does not advance this stream.
  RngStream child(std::uint64_t index) const {
    const std::uint64_t salted =
        detail::mix64(index + detail::kChildTag) + detail::kGolden;
    return RngStream(detail::mix64(key_ ^ salted));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  // Uniform on [0,1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1); safe under log().
  double next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u = next_open();
    const double v = next_double();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * M_PI * v;
    cached_ = r * std::sin(angle);
    have_cached_ = true;
    return r * std::cos(angle);
  }

  // Student-t with dof nu > 0 (unit scale). Polar form: the radius
  // sqrt(nu*(u^(-2/nu)-1)) is the radial law of a bivariate t, whose
  // coordinate marginals are exactly t_nu.
  double next_student_t(double nu) {
    const double u = next_open();
    const double v = next_double();
    const double r2 = nu * (std::pow(u, -2.0 / nu) - 1.0);
    return std::sqrt(r2) * std::cos(2.0 * M_PI * v);
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // 64-bit multiply-shift; bias is < 2^-64 * n, negligible for n << 2^64.
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

/**
 * Derive the stream keyed by `seed` and `path`. Path entries address a
 * hierarchy such as [trial, stage, query, draw-block]; distinct paths give
 * independent streams. Equivalent to root(seed).child(p0).child(p1)...
 */
inline RngStream derive_rng(std::uint64_t seed,
                            std::span<const std::uint64_t> path) {
  RngStream s = RngStream::root(seed);
  for (std::uint64_t p : path) s = s.child(p);
  return s;
}

inline RngStream derive_rng(std::uint64_t seed,
                            std::initializer_list<std::uint64_t> path) {
  return derive_rng(seed, std::span<const std::uint64_t>(path.begin(), path.size()));
}

}  // namespace proxboost
