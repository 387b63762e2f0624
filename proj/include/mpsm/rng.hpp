#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace mpsm {

/// Serializable position of an RngStream.
struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t counter = 0;
  std::uint32_t position = 4;

  bool operator==(const RngState&) const = default;
};

/// Counter-based random stream (Philox4x32-10).
///
/// The key is the 64-bit seed and the upper half of the 128-bit counter is
/// the stream id, so (seed, stream) pairs address disjoint, reproducible
/// sequences on every platform. Distribution transforms are implemented
/// here rather than through <random> so that draws are bit-identical across
/// standard libraries.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static RngStream from_state(const RngState& state);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }
  RngState state() const;

  /// Child stream for work item `index`; independent of how many draws the
  /// parent has made.
  RngStream split(std::uint64_t index) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller, one variate per two uniforms).
  double normal();
  /// Complex normal with E|z|^2 = 1.
  std::complex<double> complex_normal();

  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  std::uint32_t position_ = 4;
};

}  // namespace mpsm
