#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace psafe {

/// Seeded random stream. Doubles are produced from the top 53 bits so the
/// sequence does not depend on library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  int index(int n) {
    int i = static_cast<int>(uniform01() * n);
    return i >= n ? n - 1 : i;
  }

  /// Samples from a distribution summing to ~1; the last positive entry
  /// absorbs any rounding remainder.
  int sample(std::span<const double> probs) {
    double u = uniform01();
    double acc = 0;
    int last_positive = 0;
    for (size_t a = 0; a < probs.size(); ++a) {
      if (probs[a] > 0) last_positive = static_cast<int>(a);
      acc += probs[a];
      if (u < acc) return static_cast<int>(a);
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

/// Deterministic seed derivation for named sub-streams, independent of
/// platform hashing.
std::uint64_t mix_seed(std::uint64_t master, std::string_view tag,
                       std::uint64_t index = 0);

}  // namespace psafe
