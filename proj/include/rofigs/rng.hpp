#pragma once

#include <cstdint>
#include <vector>

namespace rofigs {

// splitmix64-based generator. Deliberately not std::mt19937 +
// std::uniform_*_distribution: those are implementation-defined, and model
// artifacts must be reproducible bit-for-bit from (data, config, seed)
// across compilers.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1), 53-bit resolution
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // uniform integer in [0, n), Lemire's multiply-shift
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Fisher-Yates
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n), ascending
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
  std::uint64_t state_;
};

// Deterministic seed derivation for nested work units (per fold, per
// candidate, per restart, ...). Mixing is order-sensitive.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0,
                          std::uint64_t d = 0);

}  // namespace rofigs
