#pragma once

#include <array>
#include <cstdint>

namespace relev {

/// Philox4x32-10 block: a keyed bijection of a 128-bit counter. Output depends
/// only on (key, counter), so any replication's stream can be regenerated
/// without touching shared state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Maps 52 random bits onto the open interval (0, 1); the half-step offset keeps
/// the largest value at 1 - 2^-53, which is exactly representable.
inline double bits_to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Uniform stream for one (master seed, replication, lane). Draw i of the
/// stream is a pure function of those values and i.
class UniformStream {
 public:
  UniformStream(std::uint64_t master_seed, std::uint64_t replication, std::uint32_t lane = 0)
      : key_{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)},
        replication_(replication),
        lane_(lane) {}

  /// The i-th uniform of the stream.
  double at(std::uint32_t index) const {
    const auto out = philox4x32({static_cast<std::uint32_t>(replication_),
                                 static_cast<std::uint32_t>(replication_ >> 32), index, lane_},
                                key_);
    return bits_to_open_unit((static_cast<std::uint64_t>(out[0]) << 32) | out[1]);
  }

  /// Sequential access for callers that consume an unbounded number of draws.
  double next() { return at(cursor_++); }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t replication_;
  std::uint32_t lane_;
  std::uint32_t cursor_ = 0;
};

}  // namespace relev
