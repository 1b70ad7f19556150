#pragma once

#include <array>
#include <cstdint>

namespace levysep {

/// Counter-based random stream built on Philox4x32-10.
///
/// The 64-bit master seed is the Philox key; the 128-bit counter is
/// (streamId, blockIndex). Each block yields four 32-bit words, consumed as
/// two 64-bit words. Identical (masterSeed, streamId) pairs therefore give
/// identical sequences on every platform. See docs/RNG.md for the exact
/// derivation of uniforms, normals and the other variates.
///
/// A stream is a value type and is not thread safe; give each worker its own.
class RngStream {
 public:
  RngStream(std::uint64_t masterSeed, std::uint64_t streamId) noexcept;

  std::uint64_t masterSeed() const noexcept { return masterSeed_; }
  std::uint64_t streamId() const noexcept { return streamId_; }

  std::uint64_t next_u64() noexcept;

  /// Uniform on the open interval (0, 1); 53 random bits, offset by half an ulp.
  double uniform() noexcept;

  /// Standard normal via Box-Muller. Draws come in pairs; the spare is cached.
  double normal() noexcept;

  /// Exponential with unit mean, -log(U).
  double exponential() noexcept;

  /// Gamma(shape, 1) returned as its logarithm, so tiny shapes do not
  /// underflow. Marsaglia-Tsang, boosted by U^(1/shape) for shape < 1.
  double log_gamma_variate(double shape) noexcept;

  /// Poisson(mean) by Knuth's multiplication method, in chunks of mean <= 30.
  std::uint64_t poisson(double mean) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t masterSeed_;
  std::uint64_t streamId_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spareNormal_ = 0.0;
  bool hasSpare_ = false;
};

/// Philox4x32-10 block function. Exposed for the known-answer test.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Component tags used when deriving per-replication streams.
enum class Component : std::uint64_t {
  Brownian = 1,
  Signal = 2,
  Independent = 3,  // the W' path
  Extra = 4,
};

/// streamId = mix64(mix64(replication) ^ (tag * golden-ratio constant)).
std::uint64_t derive_stream_id(std::uint64_t replication, Component tag) noexcept;

}  // namespace levysep
