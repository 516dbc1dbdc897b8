#include "siadmm/rng.hpp"

namespace siadmm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t tag_hash(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment,
                          std::string_view algorithm, std::uint64_t replication,
                          std::string_view phase) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ tag_hash(experiment));
  s = splitmix64(s ^ tag_hash(algorithm));
  s = splitmix64(s ^ splitmix64(replication + 0x5bd1e995ULL));
  s = splitmix64(s ^ tag_hash(phase));
  return s;
}

}  // namespace siadmm
