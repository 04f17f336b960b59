#include "grf/rng.hpp"

#include <array>

namespace grf {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t robot, std::uint64_t tick,
                           StreamPurpose purpose) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ robot);
  h = splitmix64(h ^ tick);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  std::array<std::uint32_t, 4> words{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                                     static_cast<std::uint32_t>(robot), static_cast<std::uint32_t>(tick)};
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

}  // namespace grf
