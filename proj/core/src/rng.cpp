#include "fcnet/rng.hpp"

namespace fcnet {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s, uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

uint64_t RandomStreams::bits(std::string_view kind, std::string_view entity, uint64_t n) const {
  uint64_t h = fnv1a(kind, 1469598103934665603ull);
  h = fnv1a("\x1f", h);
  h = fnv1a(entity, h);
  return splitmix64(splitmix64(seed_ ^ h) + n);
}

double RandomStreams::uniform01(std::string_view kind, std::string_view entity,
                                uint64_t n) const {
  // 53 random bits, offset by half a step: never exactly 0 or 1.
  return (static_cast<double>(bits(kind, entity, n) >> 11) + 0.5) * 0x1.0p-53;
}

uint64_t RandomStreams::derive(uint64_t seed, uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed2701ull));
}

}  // namespace fcnet
