#pragma once

// Symmetric bilinear group over BLS12-381.
//
// The protocol is written for a Type-1 pairing e: G x G -> G_T. BLS12-381 is
// asymmetric, so an element of G is carried as a mirrored pair (g1^x, g2^x)
// with the same discrete log in both source groups. pair(a, b) takes the G1
// half of one argument and the G2 half of the other, which makes the map
// symmetric. Elements produced by hashing have no known discrete log and so
// carry only their G1 half; they can be paired with any mirrored element.

#include <array>
#include <atomic>
#include <cstdint>
#include <type_traits>
#include <utility>

#include <blst.h>

#include "cpad/bytes.hpp"
#include "cpad/random.hpp"

namespace cpad {

/// Element of Z_p, p the (255-bit) prime order of G and G_T.
class Scalar {
 public:
  static constexpr std::size_t kEncodedSize = 32;
  using Encoding = std::array<std::uint8_t, kEncodedSize>;

  Scalar() = default;  // zero

  static Scalar from_u64(std::uint64_t v);
  static Scalar from_int(std::int64_t v);
  static Scalar one() { return from_u64(1); }
  static Scalar random(RandomSource& rng);
  static Scalar random_nonzero(RandomSource& rng);
  /// Big-endian integer of any length, reduced mod p.
  static Scalar reduce(ByteView big_endian);
  /// Strict 32-byte big-endian decode; values >= p are rejected.
  static Scalar decode(ByteView bytes);

  Encoding encode() const;
  bool is_zero() const;

  /// Throws std::domain_error for zero.
  Scalar inverse() const;
  /// Exponentiation in the multiplicative group of Z_p. Counted as exp_Zp.
  Scalar pow(const Scalar& e) const;

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  friend bool operator==(const Scalar& a, const Scalar& b);

  const blst_fr& raw() const { return fr_; }

 private:
  blst_fr fr_{};
};

class TargetElem;

/// Element of G. See the file comment for the mirrored representation.
class GroupElem {
 public:
  static constexpr std::size_t kEncodedSize = 1 + 48 + 96;
  using Encoding = std::array<std::uint8_t, kEncodedSize>;

  GroupElem();  // identity

  static const GroupElem& generator();
  /// Validates curve and subgroup membership and, for mirrored elements,
  /// that both halves share a discrete log.
  static GroupElem decode(ByteView bytes);

  Encoding encode() const;

  GroupElem pow(const Scalar& e) const;                // exp_G
  GroupElem operator*(const GroupElem& o) const;       // mul_G
  GroupElem inverse() const;

  bool is_identity() const;
  bool mirrored() const { return mirrored_; }

  friend bool operator==(const GroupElem& a, const GroupElem& b);

 private:
  friend class TargetElem;
  friend TargetElem pair(const GroupElem& a, const GroupElem& b);
  friend GroupElem hash_to_group(ByteView bytes);

  blst_p1 p1_{};
  blst_p2 p2_{};
  bool mirrored_ = true;
};

/// Element of G_T (order-p subgroup of Fp12*).
class TargetElem {
 public:
  static constexpr std::size_t kEncodedSize = 12 * 48;
  using Encoding = std::array<std::uint8_t, kEncodedSize>;

  TargetElem();  // identity

  static TargetElem decode(ByteView bytes);
  Encoding encode() const;

  TargetElem pow(const Scalar& e) const;               // exp_GT
  TargetElem operator*(const TargetElem& o) const;     // mul_GT
  TargetElem operator/(const TargetElem& o) const;     // mul_GT
  TargetElem inverse() const;

  bool is_identity() const;
  friend bool operator==(const TargetElem& a, const TargetElem& b);

 private:
  friend TargetElem pair(const GroupElem& a, const GroupElem& b);
  blst_fp12 v_{};
};

/// e(a, b). Needs at least one mirrored argument; throws
/// Error(InvalidEncoding) when both are hash-derived G1-only elements.
TargetElem pair(const GroupElem& a, const GroupElem& b);

/// SHA-256 of the input read as a big-endian integer, reduced mod p.
Scalar hash_to_scalar(ByteView bytes);

/// RFC 9380 hash-to-curve into G1; never the identity. The result is not mirrored.
GroupElem hash_to_group(ByteView bytes);

// ---------------------------------------------------------------------------
// Operation counting

struct OpCounter {
  std::uint64_t exp_G = 0;
  std::uint64_t mul_G = 0;
  std::uint64_t exp_GT = 0;
  std::uint64_t mul_GT = 0;
  std::uint64_t pairings = 0;
  std::uint64_t exp_Zp = 0;

  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

namespace detail {

enum class Op { ExpG, MulG, ExpGT, MulGT, Pairing, ExpZp };

struct CounterSink {
  std::atomic<std::uint64_t> counts[6]{};
  OpCounter snapshot() const;
};

CounterSink* active_sink() noexcept;
void record(Op op) noexcept;

/// Routes counts from the current thread into `sink` for its lifetime.
/// OpenMP kernels rebind each worker to the caller's sink.
class SinkBinding {
 public:
  explicit SinkBinding(CounterSink* sink) noexcept;
  ~SinkBinding();
  SinkBinding(const SinkBinding&) = delete;
  SinkBinding& operator=(const SinkBinding&) = delete;

 private:
  CounterSink* previous_;
};

}  // namespace detail

/// Runs `f` and reports the group operations it executed on this thread
/// (and on worker threads spawned by the library's parallel kernels).
/// Returns {result, counts}, or just the counts when `f` returns void.
template <class F>
auto counter_scope(F&& f) {
  detail::CounterSink sink;
  detail::SinkBinding bind(&sink);
  if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
    std::forward<F>(f)();
    return sink.snapshot();
  } else {
    auto result = std::forward<F>(f)();
    return std::pair<decltype(result), OpCounter>{std::move(result), sink.snapshot()};
  }
}

}  // namespace cpad
