#pragma once

#include <cstdint>
#include <initializer_list>

namespace qpfe {

// Counter-based random stream: a keyed hash evaluated at (key, counter).
// Draw i of a stream never depends on draw j, so shots can be partitioned
// across workers in any order and still reproduce bit-identical results.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(std::uint64_t seed) : key_(mix(seed)) {}

  // Derives a child stream; fold order is significant.
  [[nodiscard]] RngStream fold(std::uint64_t v) const {
    RngStream s;
    s.key_ = mix(key_ ^ mix(v));
    return s;
  }
  [[nodiscard]] RngStream fold(std::initializer_list<std::uint64_t> vs) const {
    RngStream s = *this;
    for (auto v : vs) s = s.fold(v);
    return s;
  }

  [[nodiscard]] std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ ^ mix(counter ^ 0x5851F42D4C957F2DULL));
  }

  // Uniform double in [0, 1), 53 significant bits.
  [[nodiscard]] double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, 2^width); width <= 64.
  [[nodiscard]] std::uint64_t bitfield(std::uint64_t counter, int width) const {
    return width >= 64 ? bits(counter) : bits(counter) & ((1ULL << width) - 1);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
};

// Stream tags, to keep independent purposes on independent substreams.
namespace stream_tag {
inline constexpr std::uint64_t kModel = 0x6D72662D6D6F6465ULL;
inline constexpr std::uint64_t kGraph = 0x677261706873ULL;
inline constexpr std::uint64_t kSeed = 0x7365656473ULL;
inline constexpr std::uint64_t kShot = 0x73686F7473ULL;
}  // namespace stream_tag

}  // namespace qpfe
