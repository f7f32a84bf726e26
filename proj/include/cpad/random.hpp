#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace cpad {

/// Source of uniformly random bytes. Implementations are not thread-safe;
/// parallel kernels draw all randomness up front on the calling thread.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

/// OpenSSL-backed CSPRNG.
class SystemRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

/// Deterministic SHA-256 counter-mode stream keyed by a 64-bit seed.
/// Used for reproducible simulator traces and golden files; never for real keys.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed);
  void fill(std::span<std::uint8_t> out) override;

 private:
  void refill();

  std::array<std::uint8_t, 32> key_{};
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t used_ = 32;
};

}  // namespace cpad
