#pragma once

#include <cstdint>
#include <random>

namespace edmeta {

// SplitMix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// A seeded random stream. Streams are cheap to construct and must not be
// shared between threads; derive one per consumer with `split`.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))),
        engine_(key_) {}

  // Child stream `index`; depends only on this stream's construction key,
  // never on how many values have been drawn.
  RngStream split(std::uint64_t index) const { return RngStream(key_, index + 1); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    for (;;) {
      double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

  double normal() { return normal_(engine_); }

  // Gamma with the given shape and unit scale.
  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(engine_);
  }

  long binomial(long n, double p) {
    return std::binomial_distribution<long>(n, p)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace edmeta
