#pragma once
// Seeded substreams for Monte Carlo loops. Each fixed-size chunk of work gets
// its own mt19937_64 seeded by splitmix64(seed, chunk), so results do not
// depend on the number of threads.

#include <cmath>
#include <cstdint>
#include <random>

namespace recourse {

inline constexpr const char* kRngName = "mt19937_64/splitmix64-chunked";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Substream {
 public:
  Substream(std::uint64_t seed, std::uint64_t chunk) : gen_(splitmix64(seed ^ splitmix64(chunk + 1))) {}

  std::uint64_t bits() { return gen_(); }
  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  // Box-Muller; written out so the stream is identical across standard libraries.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace recourse
