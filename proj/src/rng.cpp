#include "ebcm/rng.hpp"

namespace ebcm {

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64_mix(master);
  for (std::uint64_t k : keys) {
    h = splitmix64_mix(h ^ splitmix64_mix(k + 0x632be59bd9b4e019ULL));
  }
  return h;
}

}  // namespace ebcm
