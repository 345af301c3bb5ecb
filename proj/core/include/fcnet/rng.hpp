#pragma once

#include <cstdint>
#include <string_view>

namespace fcnet {

// Counter-based random streams: the n-th value for an entity is a pure
// function of (seed, kind, entity, n). Draws are independent of the order in
// which they are requested, so interleaving never perturbs a stream.
class RandomStreams {
 public:
  explicit RandomStreams(uint64_t seed) : seed_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t bits(std::string_view kind, std::string_view entity, uint64_t n) const;

  // Strictly inside (0, 1).
  double uniform01(std::string_view kind, std::string_view entity, uint64_t n) const;

  // Stable per-replication seed derivation.
  static uint64_t derive(uint64_t seed, uint64_t index);

 private:
  uint64_t seed_;
};

}  // namespace fcnet
