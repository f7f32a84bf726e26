#include "cpad/group.hpp"

#include <cstring>
#include <stdexcept>

#include "cpad/error.hpp"

namespace cpad {

namespace {

// Largest exponent bit length; the BLS12-381 subgroup order is 255 bits.
constexpr std::size_t kScalarBits = 255;

constexpr std::uint8_t kMirroredTag = 0x01;
constexpr std::uint8_t kG1OnlyTag = 0x02;

constexpr char kHashToGroupDst[] = "CPAD-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_";

blst_scalar to_blst_scalar(const Scalar& s) {
  blst_scalar out;
  blst_scalar_from_fr(&out, &s.raw());
  return out;
}

bool scalar_bit(const Scalar::Encoding& be, std::size_t bit) {
  // bit 0 is the least significant
  return (be[31 - bit / 8] >> (bit % 8)) & 1;
}

bool is_zero_bytes(const std::uint8_t* p, std::size_t n) {
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc |= p[i];
  return acc == 0;
}

// e(P, Q) with no instrumentation; identity if either input is the point at infinity.
blst_fp12 raw_pairing(const blst_p1& p, const blst_p2& q) {
  if (blst_p1_is_inf(&p) || blst_p2_is_inf(&q)) return *blst_fp12_one();
  blst_p1_affine pa;
  blst_p2_affine qa;
  blst_p1_to_affine(&pa, &p);
  blst_p2_to_affine(&qa, &q);
  blst_fp12 out;
  blst_miller_loop(&out, &qa, &pa);
  blst_final_exp(&out, &out);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scalar

Scalar Scalar::from_u64(std::uint64_t v) {
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  Scalar s;
  blst_fr_from_uint64(&s.fr_, limbs);
  return s;
}

Scalar Scalar::from_int(std::int64_t v) {
  if (v >= 0) return from_u64(static_cast<std::uint64_t>(v));
  return -from_u64(static_cast<std::uint64_t>(-(v + 1)) + 1);
}

Scalar Scalar::random(RandomSource& rng) {
  // 512 bits reduced mod p: statistical distance from uniform is ~2^-257.
  std::array<std::uint8_t, 64> wide;
  rng.fill(wide);
  return reduce(wide);
}

Scalar Scalar::random_nonzero(RandomSource& rng) {
  for (;;) {
    Scalar s = random(rng);
    if (!s.is_zero()) return s;
  }
}

Scalar Scalar::reduce(ByteView big_endian) {
  blst_scalar tmp;
  if (big_endian.empty()) return Scalar{};
  blst_scalar_from_be_bytes(&tmp, big_endian.data(), big_endian.size());
  Scalar s;
  blst_fr_from_scalar(&s.fr_, &tmp);
  return s;
}

Scalar Scalar::decode(ByteView bytes) {
  if (bytes.size() != kEncodedSize) {
    throw Error(ErrorCode::InvalidEncoding, "scalar must be 32 bytes");
  }
  blst_scalar tmp;
  blst_scalar_from_bendian(&tmp, bytes.data());
  if (!blst_scalar_fr_check(&tmp)) {
    throw Error(ErrorCode::InvalidEncoding, "scalar not reduced modulo the group order");
  }
  Scalar s;
  blst_fr_from_scalar(&s.fr_, &tmp);
  return s;
}

Scalar::Encoding Scalar::encode() const {
  const blst_scalar tmp = to_blst_scalar(*this);
  Encoding out;
  blst_bendian_from_scalar(out.data(), &tmp);
  return out;
}

bool Scalar::is_zero() const {
  const Scalar zero;
  return *this == zero;
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero scalar");
  Scalar out;
  blst_fr_eucl_inverse(&out.fr_, &fr_);
  return out;
}

Scalar Scalar::pow(const Scalar& e) const {
  detail::record(detail::Op::ExpZp);
  const Encoding bits = e.encode();
  Scalar acc = one();
  for (std::size_t i = kScalarBits; i-- > 0;) {
    blst_fr_sqr(&acc.fr_, &acc.fr_);
    if (scalar_bit(bits, i)) blst_fr_mul(&acc.fr_, &acc.fr_, &fr_);
  }
  return acc;
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar r;
  blst_fr_add(&r.fr_, &fr_, &o.fr_);
  return r;
}

Scalar Scalar::operator-(const Scalar& o) const {
  Scalar r;
  blst_fr_sub(&r.fr_, &fr_, &o.fr_);
  return r;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar r;
  blst_fr_mul(&r.fr_, &fr_, &o.fr_);
  return r;
}

Scalar Scalar::operator-() const {
  Scalar r;
  blst_fr_cneg(&r.fr_, &fr_, true);
  return r;
}

bool operator==(const Scalar& a, const Scalar& b) {
  return std::memcmp(&a.fr_, &b.fr_, sizeof(blst_fr)) == 0;
}

// ---------------------------------------------------------------------------
// GroupElem

GroupElem::GroupElem() = default;

const GroupElem& GroupElem::generator() {
  static const GroupElem g = [] {
    GroupElem e;
    e.p1_ = *blst_p1_generator();
    e.p2_ = *blst_p2_generator();
    return e;
  }();
  return g;
}

GroupElem GroupElem::decode(ByteView bytes) {
  if (bytes.size() != kEncodedSize) {
    throw Error(ErrorCode::InvalidEncoding, "group element must be 145 bytes");
  }
  const std::uint8_t tag = bytes[0];
  if (tag != kMirroredTag && tag != kG1OnlyTag) {
    throw Error(ErrorCode::InvalidEncoding, "unknown group element tag");
  }
  GroupElem out;
  out.mirrored_ = tag == kMirroredTag;

  blst_p1_affine a1;
  if (blst_p1_uncompress(&a1, bytes.data() + 1) != BLST_SUCCESS ||
      !blst_p1_affine_in_g1(&a1)) {
    throw Error(ErrorCode::InvalidEncoding, "G1 half not in the prime-order subgroup");
  }
  blst_p1_from_affine(&out.p1_, &a1);

  if (out.mirrored_) {
    blst_p2_affine a2;
    if (blst_p2_uncompress(&a2, bytes.data() + 49) != BLST_SUCCESS ||
        !blst_p2_affine_in_g2(&a2)) {
      throw Error(ErrorCode::InvalidEncoding, "G2 half not in the prime-order subgroup");
    }
    blst_p2_from_affine(&out.p2_, &a2);
    // Both halves must carry the same discrete log: e(x1, g2) == e(g1, x2).
    const blst_fp12 lhs = raw_pairing(out.p1_, *blst_p2_generator());
    const blst_fp12 rhs = raw_pairing(*blst_p1_generator(), out.p2_);
    if (!blst_fp12_is_equal(&lhs, &rhs)) {
      throw Error(ErrorCode::InvalidEncoding, "mirrored halves disagree");
    }
  } else if (!is_zero_bytes(bytes.data() + 49, 96)) {
    throw Error(ErrorCode::InvalidEncoding, "G1-only element with non-zero G2 field");
  }

  const Encoding again = out.encode();
  if (!std::equal(bytes.begin(), bytes.end(), again.begin())) {
    throw Error(ErrorCode::InvalidEncoding, "non-canonical group element encoding");
  }
  return out;
}

GroupElem::Encoding GroupElem::encode() const {
  Encoding out{};
  out[0] = mirrored_ ? kMirroredTag : kG1OnlyTag;
  blst_p1_compress(out.data() + 1, &p1_);
  if (mirrored_) blst_p2_compress(out.data() + 49, &p2_);
  return out;
}

GroupElem GroupElem::pow(const Scalar& e) const {
  detail::record(detail::Op::ExpG);
  const blst_scalar s = to_blst_scalar(e);
  GroupElem out;
  out.mirrored_ = mirrored_;
  blst_p1_mult(&out.p1_, &p1_, s.b, kScalarBits);
  if (mirrored_) blst_p2_mult(&out.p2_, &p2_, s.b, kScalarBits);
  return out;
}

GroupElem GroupElem::operator*(const GroupElem& o) const {
  detail::record(detail::Op::MulG);
  GroupElem out;
  out.mirrored_ = mirrored_ && o.mirrored_;
  blst_p1_add_or_double(&out.p1_, &p1_, &o.p1_);
  if (out.mirrored_) blst_p2_add_or_double(&out.p2_, &p2_, &o.p2_);
  return out;
}

GroupElem GroupElem::inverse() const {
  GroupElem out = *this;
  blst_p1_cneg(&out.p1_, true);
  if (mirrored_) blst_p2_cneg(&out.p2_, true);
  return out;
}

bool GroupElem::is_identity() const { return blst_p1_is_inf(&p1_); }

bool operator==(const GroupElem& a, const GroupElem& b) {
  if (a.mirrored_ != b.mirrored_) return false;
  if (!blst_p1_is_equal(&a.p1_, &b.p1_)) return false;
  return !a.mirrored_ || blst_p2_is_equal(&a.p2_, &b.p2_);
}

// ---------------------------------------------------------------------------
// TargetElem

TargetElem::TargetElem() : v_(*blst_fp12_one()) {}

TargetElem TargetElem::decode(ByteView bytes) {
  if (bytes.size() != kEncodedSize) {
    throw Error(ErrorCode::InvalidEncoding, "target element must be 576 bytes");
  }
  TargetElem out;
  const std::uint8_t* p = bytes.data();
  for (auto& f6 : out.v_.fp6) {
    for (auto& f2 : f6.fp2) {
      for (auto& f : f2.fp) {
        blst_fp_from_bendian(&f, p);
        p += 48;
      }
    }
  }
  const Encoding again = out.encode();
  if (!std::equal(bytes.begin(), bytes.end(), again.begin())) {
    throw Error(ErrorCode::InvalidEncoding, "non-canonical field element in G_T encoding");
  }
  if (!blst_fp12_in_group(&out.v_)) {
    throw Error(ErrorCode::InvalidEncoding, "value outside the order-p subgroup of G_T");
  }
  return out;
}

TargetElem::Encoding TargetElem::encode() const {
  Encoding out;
  std::uint8_t* p = out.data();
  for (const auto& f6 : v_.fp6) {
    for (const auto& f2 : f6.fp2) {
      for (const auto& f : f2.fp) {
        blst_bendian_from_fp(p, &f);
        p += 48;
      }
    }
  }
  return out;
}

TargetElem TargetElem::pow(const Scalar& e) const {
  detail::record(detail::Op::ExpGT);
  const Scalar::Encoding bits = e.encode();
  TargetElem acc;
  for (std::size_t i = kScalarBits; i-- > 0;) {
    blst_fp12_cyclotomic_sqr(&acc.v_, &acc.v_);
    if (scalar_bit(bits, i)) blst_fp12_mul(&acc.v_, &acc.v_, &v_);
  }
  return acc;
}

TargetElem TargetElem::operator*(const TargetElem& o) const {
  detail::record(detail::Op::MulGT);
  TargetElem out;
  blst_fp12_mul(&out.v_, &v_, &o.v_);
  return out;
}

TargetElem TargetElem::operator/(const TargetElem& o) const {
  return *this * o.inverse();
}

TargetElem TargetElem::inverse() const {
  // G_T sits in the cyclotomic subgroup, where inversion is conjugation.
  TargetElem out = *this;
  blst_fp12_conjugate(&out.v_);
  return out;
}

bool TargetElem::is_identity() const { return blst_fp12_is_one(&v_); }

bool operator==(const TargetElem& a, const TargetElem& b) {
  return blst_fp12_is_equal(&a.v_, &b.v_);
}

// ---------------------------------------------------------------------------

TargetElem pair(const GroupElem& a, const GroupElem& b) {
  TargetElem out;
  if (b.mirrored_) {
    out.v_ = raw_pairing(a.p1_, b.p2_);
  } else if (a.mirrored_) {
    out.v_ = raw_pairing(b.p1_, a.p2_);
  } else {
    throw Error(ErrorCode::InvalidEncoding, "pairing needs at least one mirrored element");
  }
  detail::record(detail::Op::Pairing);
  return out;
}

Scalar hash_to_scalar(ByteView bytes) {
  const auto digest = sha256(bytes);
  return Scalar::reduce(digest);
}

GroupElem hash_to_group(ByteView bytes) {
  Bytes msg(bytes.begin(), bytes.end());
  for (std::uint8_t counter = 0;; ++counter) {
    GroupElem out;
    out.mirrored_ = false;
    blst_hash_to_g1(&out.p1_, msg.data(), msg.size(),
                    reinterpret_cast<const std::uint8_t*>(kHashToGroupDst),
                    sizeof(kHashToGroupDst) - 1, nullptr, 0);
    if (!out.is_identity()) return out;
    if (counter == 0) msg.push_back(0);
    msg.back() = static_cast<std::uint8_t>(counter + 1);
  }
}

// ---------------------------------------------------------------------------
// Counters

namespace detail {

namespace {
thread_local CounterSink* t_sink = nullptr;
}

OpCounter CounterSink::snapshot() const {
  OpCounter c;
  c.exp_G = counts[static_cast<int>(Op::ExpG)].load(std::memory_order_relaxed);
  c.mul_G = counts[static_cast<int>(Op::MulG)].load(std::memory_order_relaxed);
  c.exp_GT = counts[static_cast<int>(Op::ExpGT)].load(std::memory_order_relaxed);
  c.mul_GT = counts[static_cast<int>(Op::MulGT)].load(std::memory_order_relaxed);
  c.pairings = counts[static_cast<int>(Op::Pairing)].load(std::memory_order_relaxed);
  c.exp_Zp = counts[static_cast<int>(Op::ExpZp)].load(std::memory_order_relaxed);
  return c;
}

CounterSink* active_sink() noexcept { return t_sink; }

void record(Op op) noexcept {
  if (t_sink) t_sink->counts[static_cast<int>(op)].fetch_add(1, std::memory_order_relaxed);
}

SinkBinding::SinkBinding(CounterSink* sink) noexcept : previous_(t_sink) { t_sink = sink; }
SinkBinding::~SinkBinding() { t_sink = previous_; }

}  // namespace detail

}  // namespace cpad
