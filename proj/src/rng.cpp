#include "rofigs/rng.hpp"

#include <algorithm>
#include <numeric>

namespace rofigs {

std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (k > n) k = n;
  // partial Fisher-Yates: first k entries are the sample
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c, std::uint64_t d) {
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed + 0x9e3779b97f4a7c15ULL);
  h = mix(h ^ (a + 0xa0761d6478bd642fULL));
  h = mix(h ^ (b + 0xe7037ed1a0b428dbULL));
  h = mix(h ^ (c + 0x8ebc6af09c88c6e3ULL));
  h = mix(h ^ (d + 0x589965cc75374cc3ULL));
  return h;
}

}  // namespace rofigs
