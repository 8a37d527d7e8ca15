#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace lexc {

// Philox4x32-10 block function (Salmon et al., SC'11). Exposed for the
// known-answer test.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Counter-based random stream keyed by (seed, shard, substream).
//
// The draw index is the low 64 bits of the Philox counter; shard and substream
// occupy the high words. Any stream can therefore be constructed directly,
// without generating its predecessors, and streams with distinct keys never
// share a counter block.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint32_t shard, std::uint32_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  double exponential();

  // Independent child stream; shares seed and shard.
  RngStream substream(std::uint32_t index) const { return RngStream(seed_, shard_, index); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t shard() const noexcept { return shard_; }
  std::uint32_t substream_index() const noexcept { return substream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint32_t shard_;
  std::uint32_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;  // words consumed from buffer_, in pairs
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace lexc
