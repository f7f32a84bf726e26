#include <gtest/gtest.h>

#include <set>

#include "cpad/error.hpp"
#include "cpad/group.hpp"
#include "support.hpp"

namespace cpad {
namespace {

using testing::from_mpz;
using testing::group_order;
using testing::to_mpz;

const GroupElem& g() { return GroupElem::generator(); }

// ---- Scalar ---------------------------------------------------------------

TEST(Scalar, EncodeDecodeRoundtrip) {
  SeededRandom rng(1);
  for (int i = 0; i < 100; ++i) {
    const Scalar x = Scalar::random(rng);
    EXPECT_EQ(Scalar::decode(x.encode()), x);
  }
}

TEST(Scalar, DecodeRejectsOrderAndAbove) {
  Scalar::Encoding enc{};
  mpz_export(enc.data(), nullptr, 1, 1, 1, 0, group_order().get_mpz_t());
  EXPECT_THROW(Scalar::decode(enc), Error);
  enc.fill(0xff);
  EXPECT_THROW(Scalar::decode(enc), Error);
  EXPECT_THROW(Scalar::decode(ByteView(enc.data(), 31)), Error);
}

TEST(Scalar, ReduceMatchesGmp) {
  SeededRandom rng(2);
  for (std::size_t len : {0u, 1u, 16u, 31u, 32u, 33u, 48u, 64u, 100u}) {
    for (int trial = 0; trial < 50; ++trial) {
      Bytes in(len);
      rng.fill(in);
      const mpz_class expect = to_mpz(in) % group_order();
      EXPECT_EQ(to_mpz(Scalar::reduce(in)), expect) << "len " << len;
    }
  }
  Bytes all_ones(32, 0xff);
  EXPECT_EQ(to_mpz(Scalar::reduce(all_ones)), to_mpz(all_ones) % group_order());
}

TEST(Scalar, ArithmeticMatchesGmp) {
  SeededRandom rng(3);
  const mpz_class& r = group_order();
  for (int i = 0; i < 100; ++i) {
    const Scalar a = Scalar::random(rng);
    const Scalar b = Scalar::random(rng);
    const mpz_class A = to_mpz(a), B = to_mpz(b);
    EXPECT_EQ(to_mpz(a + b), (A + B) % r);
    EXPECT_EQ(to_mpz(a * b), (A * B) % r);
    EXPECT_EQ(to_mpz(a - b), ((A - B) % r + r) % r);
    mpz_class pw;
    mpz_powm(pw.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t(), r.get_mpz_t());
    EXPECT_EQ(to_mpz(a.pow(b)), pw);
  }
}

TEST(Scalar, FieldLaws) {
  SeededRandom rng(4);
  for (int i = 0; i < 100; ++i) {
    const Scalar a = Scalar::random(rng), b = Scalar::random(rng), c = Scalar::random(rng);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    const Scalar x = Scalar::random_nonzero(rng);
    EXPECT_EQ(x * x.inverse(), Scalar::one());
  }
  EXPECT_THROW(Scalar().inverse(), std::domain_error);
}

TEST(Scalar, FromIntWrapsNegatives) {
  EXPECT_EQ(Scalar::from_int(-1) + Scalar::one(), Scalar());
  EXPECT_EQ(to_mpz(Scalar::from_int(-3)), group_order() - 3);
  EXPECT_EQ(from_mpz(mpz_class(12345)), Scalar::from_u64(12345));
}

// ---- GroupElem / TargetElem ------------------------------------------------

TEST(GroupElem, EncodeDecodeRoundtrip) {
  SeededRandom rng(5);
  for (int i = 0; i < 20; ++i) {
    const GroupElem x = g().pow(Scalar::random(rng));
    const auto enc = x.encode();
    const GroupElem y = GroupElem::decode(enc);
    EXPECT_EQ(x, y);
    EXPECT_EQ(y.encode(), enc);
  }
  const GroupElem id;
  EXPECT_TRUE(id.is_identity());
  EXPECT_EQ(GroupElem::decode(id.encode()), id);
  const GroupElem h = hash_to_group(as_bytes("x"));
  EXPECT_FALSE(h.mirrored());
  EXPECT_EQ(GroupElem::decode(h.encode()), h);
}

TEST(GroupElem, EqualElementsEncodeIdentically) {
  const GroupElem a = g().pow(Scalar::from_u64(6));
  const GroupElem b = g().pow(Scalar::from_u64(2)).pow(Scalar::from_u64(3));
  const GroupElem c = g().pow(Scalar::from_u64(4)) * g().pow(Scalar::from_u64(2));
  EXPECT_EQ(a.encode(), b.encode());
  EXPECT_EQ(a.encode(), c.encode());
}

TEST(GroupElem, DecodeRejectsMismatchedHalves) {
  const auto a = g().pow(Scalar::from_u64(2)).encode();
  const auto b = g().pow(Scalar::from_u64(3)).encode();
  GroupElem::Encoding spliced = a;
  std::copy(b.begin() + 49, b.end(), spliced.begin() + 49);
  EXPECT_THROW(GroupElem::decode(spliced), Error);
}

TEST(GroupElem, DecodeRejectsMalformedInput) {
  auto enc = g().encode();
  EXPECT_THROW(GroupElem::decode(ByteView(enc.data(), enc.size() - 1)), Error);
  auto bad_tag = enc;
  bad_tag[0] = 0x07;
  EXPECT_THROW(GroupElem::decode(bad_tag), Error);
  auto flipped = enc;
  flipped[10] ^= 0x01;
  EXPECT_THROW(GroupElem::decode(flipped), Error);
  // A G1-only element must carry an all-zero G2 field.
  auto h = hash_to_group(as_bytes("y")).encode();
  h[100] = 1;
  EXPECT_THROW(GroupElem::decode(h), Error);
}

TEST(GroupElem, InverseAndIdentity) {
  SeededRandom rng(6);
  const GroupElem x = g().pow(Scalar::random_nonzero(rng));
  EXPECT_TRUE((x * x.inverse()).is_identity());
  EXPECT_EQ(x * GroupElem(), x);
  EXPECT_TRUE(g().pow(Scalar()).is_identity());
}

TEST(Pairing, SmallExponents) {
  const TargetElem lhs = pair(g().pow(Scalar::from_u64(2)), g().pow(Scalar::from_u64(3)));
  EXPECT_EQ(lhs, pair(g(), g()).pow(Scalar::from_u64(6)));
}

TEST(Pairing, IdentityArgument) {
  EXPECT_TRUE(pair(GroupElem(), g()).is_identity());
  EXPECT_TRUE(pair(g(), GroupElem()).is_identity());
  EXPECT_FALSE(pair(g(), g()).is_identity());
}

TEST(Pairing, RandomBilinearity) {
  SeededRandom rng(7);
  const TargetElem egg = pair(g(), g());
  for (int i = 0; i < 100; ++i) {
    const Scalar a = Scalar::random(rng), b = Scalar::random(rng);
    const Scalar ab = from_mpz(to_mpz(a) * to_mpz(b));
    EXPECT_EQ(pair(g().pow(a), g().pow(b)), egg.pow(ab));
  }
}

TEST(Pairing, SymmetricAndHashedArguments) {
  SeededRandom rng(8);
  const GroupElem x = g().pow(Scalar::random(rng));
  const GroupElem y = g().pow(Scalar::random(rng));
  EXPECT_EQ(pair(x, y), pair(y, x));
  const GroupElem h = hash_to_group(as_bytes("m"));
  const Scalar s = Scalar::random(rng);
  EXPECT_EQ(pair(h.pow(s), g()), pair(h, g().pow(s)));
  EXPECT_EQ(pair(h, x), pair(x, h));
  EXPECT_THROW(pair(h, h), Error);
}

TEST(TargetElem, EncodeDecodeRoundtrip) {
  SeededRandom rng(9);
  const TargetElem t = pair(g(), g()).pow(Scalar::random(rng));
  const auto enc = t.encode();
  EXPECT_EQ(TargetElem::decode(enc), t);
  EXPECT_EQ(TargetElem::decode(enc).encode(), enc);
  EXPECT_EQ(TargetElem::decode(TargetElem().encode()), TargetElem());
  auto bad = enc;
  bad[47] ^= 1;
  EXPECT_THROW(TargetElem::decode(bad), Error);
  EXPECT_THROW(TargetElem::decode(ByteView(enc.data(), 100)), Error);
}

TEST(TargetElem, GroupLaws) {
  SeededRandom rng(10);
  const TargetElem a = pair(g(), g()).pow(Scalar::random(rng));
  const TargetElem b = pair(g(), g()).pow(Scalar::random(rng));
  EXPECT_EQ((a * b) / b, a);
  EXPECT_TRUE((a * a.inverse()).is_identity());
  EXPECT_EQ(a.pow(Scalar::from_u64(3)), a * a * a);
  EXPECT_EQ(a.pow(Scalar::from_int(-1)), a.inverse());
}

// ---- hashing ---------------------------------------------------------------

TEST(HashToScalar, GoldenVectors) {
  // SHA-256 digests reduced mod p with Python big integers.
  EXPECT_EQ(to_hex(hash_to_scalar({}).encode()),
            "6fc31cef6f5e9ecc67c21cc08fcde11ed3f09de1649d374da495991c7852b854");
  EXPECT_EQ(to_hex(hash_to_scalar(as_bytes("abc")).encode()),
            "468a6f6c656452a20e0768d6540c4a1e5c45bda096191e9db410ff62f20015ac");
}

TEST(HashToScalar, DeterministicAndBitSensitive) {
  SeededRandom rng(11);
  EXPECT_EQ(hash_to_scalar(as_bytes("same")), hash_to_scalar(as_bytes("same")));
  for (int i = 0; i < 10000; ++i) {
    Bytes m(32);
    rng.fill(m);
    Bytes m2 = m;
    m2[i % 32] ^= static_cast<std::uint8_t>(1u << (i % 8));
    ASSERT_NE(hash_to_scalar(m), hash_to_scalar(m2));
  }
}

TEST(HashToGroup, DeterministicNonIdentityDistinct) {
  SeededRandom rng(12);
  EXPECT_EQ(hash_to_group(as_bytes("same")), hash_to_group(as_bytes("same")));
  std::set<GroupElem::Encoding> seen;
  for (int i = 0; i < 10000; ++i) {
    Bytes m(16);
    rng.fill(m);
    const GroupElem h = hash_to_group(m);
    ASSERT_FALSE(h.is_identity());
    seen.insert(h.encode());
  }
  EXPECT_EQ(seen.size(), 10000u);
}

// ---- counters ----------------------------------------------------------------

TEST(OpCounter, SinglePairing) {
  const auto [t, c] = counter_scope([] { return pair(g(), g()); });
  EXPECT_FALSE(t.is_identity());
  EXPECT_EQ(c, (OpCounter{.pairings = 1}));
}

TEST(OpCounter, TwoExponentiationsAndAProduct) {
  const auto [x, c] = counter_scope([] { return g().pow(Scalar::from_u64(5)) * g().pow(Scalar::from_u64(7)); });
  EXPECT_EQ(x, g().pow(Scalar::from_u64(12)));
  EXPECT_EQ(c, (OpCounter{.exp_G = 2, .mul_G = 1}));
}

TEST(OpCounter, TargetAndScalarOps) {
  const TargetElem t = pair(g(), g());
  const auto c = counter_scope([&] {
    const TargetElem u = t.pow(Scalar::from_u64(3));
    (void)(u * t);
    (void)(u / t);
    (void)Scalar::from_u64(2).pow(Scalar::from_u64(10));
  });
  EXPECT_EQ(c, (OpCounter{.exp_GT = 1, .mul_GT = 2, .exp_Zp = 1}));
}

TEST(OpCounter, ScopesDoNotLeak) {
  const auto outer = counter_scope([] {
    const auto inner = counter_scope([] { return pair(g(), g()); });
    EXPECT_EQ(inner.second.pairings, 1u);
  });
  EXPECT_EQ(outer, OpCounter{});
}

}  // namespace
}  // namespace cpad
