#pragma once

#include <array>
#include <cstdint>

namespace lpgm {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Counter-based random stream keyed by (seed, stream_id). Output number k
/// depends only on (seed, stream_id, k), so streams can be handed to
/// workers in any order without changing results.
class RngState {
 public:
  RngState(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  /// Number of 32-bit words consumed so far.
  std::uint64_t position() const { return block_ == 0 ? 0 : (block_ - 1) * 4 + lane_; }

  std::uint32_t next_u32();
  /// Uniform on the open interval (0, 1), 53 bits.
  double uniform();
  /// Standard normal (Box-Muller, one variate per two uniforms).
  double normal();

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  unsigned lane_ = 4;
  std::array<std::uint32_t, 4> buffer_{};
};

}  // namespace lpgm
