#include "kernclust/rng.hpp"

namespace kernclust {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(root);
  for (std::uint64_t idx : path) {
    h = mix64(h ^ mix64(idx + 0x632be59bd9b4e019ULL));
  }
  return h;
}

}  // namespace kernclust
