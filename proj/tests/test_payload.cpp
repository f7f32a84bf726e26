#include <gtest/gtest.h>

#include <random>
#include <set>

#include "cpad/error.hpp"
#include "cpad/payload.hpp"

namespace cpad {
namespace {

TargetElem random_target(RandomSource& rng) {
  const GroupElem& g = GroupElem::generator();
  return pair(g, g).pow(Scalar::random_nonzero(rng));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

TEST(DeriveKey, DeterministicSixteenBytes) {
  SeededRandom rng(41);
  const TargetElem k = random_target(rng);
  EXPECT_EQ(derive_key(k), derive_key(k));
  EXPECT_EQ(derive_key(k).size(), 16u);
  EXPECT_EQ(sizeof(SymmetricKey), 16u);
}

TEST(DeriveKey, DistinctTargetsGiveDistinctKeys) {
  SeededRandom rng(42);
  const GroupElem& g = GroupElem::generator();
  const TargetElem step = pair(g, g);
  TargetElem k = random_target(rng);
  std::set<SymmetricKey> keys;
  for (int i = 0; i < 10000; ++i) {
    keys.insert(derive_key(k));
    k = k * step;
  }
  EXPECT_EQ(keys.size(), 10000u);
}

TEST(Seal, Roundtrip) {
  SeededRandom rng(43);
  const TargetElem k = random_target(rng);
  const Scalar fname = Scalar::random(rng);
  for (std::size_t n : {0u, 1u, 15u, 16u, 17u, 1024u}) {
    Bytes data(n);
    rng.fill(data);
    const SealedPayload p = seal(data, k, fname, rng);
    EXPECT_EQ(p.nonce.size(), 12u);
    EXPECT_EQ(p.ciphertext.size(), n + 16);
    EXPECT_EQ(p.fname, fname);
    EXPECT_EQ(unseal(p, k, fname), data);
  }
}

TEST(Seal, FreshNonces) {
  SeededRandom rng(44);
  const TargetElem k = random_target(rng);
  const Scalar fname = Scalar::random(rng);
  const Bytes data(64, 0x5a);
  EXPECT_NE(seal(data, k, fname, rng).nonce, seal(data, k, fname, rng).nonce);
}

TEST(Seal, WrongKeyFails) {
  SeededRandom rng(45);
  const Scalar fname = Scalar::random(rng);
  for (int i = 0; i < 100; ++i) {
    const TargetElem k = random_target(rng);
    const SealedPayload p = seal(as_bytes("payload"), k, fname, rng);
    const TargetElem wrong = random_target(rng);
    EXPECT_EQ(code_of([&] { unseal(p, wrong, fname); }), ErrorCode::AuthenticationFailure);
  }
}

TEST(Seal, AlteredFnameFails) {
  SeededRandom rng(46);
  const TargetElem k = random_target(rng);
  const Scalar fname = Scalar::random(rng);
  const SealedPayload p = seal(as_bytes("payload"), k, fname, rng);
  EXPECT_EQ(code_of([&] { unseal(p, k, fname + Scalar::one()); }), ErrorCode::AuthenticationFailure);
}

TEST(Seal, RandomPayloadsRoundtripAndRejectTampering) {
  SeededRandom rng(47);
  std::mt19937_64 gen(47);
  const TargetElem k = random_target(rng);
  const Scalar fname = Scalar::random(rng);
  for (int i = 0; i < 1000; ++i) {
    // Mostly small payloads with a tail reaching 1 MiB.
    const std::size_t n = i % 50 == 0 ? (1u << 20) - gen() % 4096 : gen() % 8192;
    Bytes data(n);
    rng.fill(data);
    SealedPayload p = seal(data, k, fname, rng);
    ASSERT_EQ(unseal(p, k, fname), data);
    const std::size_t pos = gen() % p.ciphertext.size();
    p.ciphertext[pos] ^= static_cast<std::uint8_t>(1u << (gen() % 8));
    ASSERT_EQ(code_of([&] { unseal(p, k, fname); }), ErrorCode::AuthenticationFailure);
  }
}

TEST(Seal, TamperedNonceOrTruncationFails) {
  SeededRandom rng(48);
  const TargetElem k = random_target(rng);
  const Scalar fname = Scalar::random(rng);
  SealedPayload p = seal(as_bytes("abc"), k, fname, rng);
  SealedPayload bad_nonce = p;
  bad_nonce.nonce[0] ^= 1;
  EXPECT_EQ(code_of([&] { unseal(bad_nonce, k, fname); }), ErrorCode::AuthenticationFailure);
  SealedPayload short_nonce = p;
  short_nonce.nonce.pop_back();
  EXPECT_EQ(code_of([&] { unseal(short_nonce, k, fname); }), ErrorCode::AuthenticationFailure);
  SealedPayload truncated = p;
  truncated.ciphertext.resize(10);
  EXPECT_EQ(code_of([&] { unseal(truncated, k, fname); }), ErrorCode::AuthenticationFailure);
}

TEST(Tag, Completeness) {
  SeededRandom rng(49);
  const TargetElem k = random_target(rng);
  const Scalar fname = Scalar::random(rng);
  EXPECT_TRUE(check_tag(make_tag(fname, k), fname, k));
  EXPECT_EQ(make_tag(fname, k), make_tag(fname, k));
}

TEST(Tag, MatchesDefinition) {
  SeededRandom rng(50);
  const TargetElem k = random_target(rng);
  const Scalar fname = Scalar::random(rng);
  Bytes input{0x01, 0x00, 0x00, 0x00, 0x20};
  const auto f = fname.encode();
  input.insert(input.end(), f.begin(), f.end());
  const auto kb = k.encode();
  input.insert(input.end(), kb.begin(), kb.end());
  EXPECT_EQ(make_tag(fname, k).tau, hash_to_scalar(input));
}

TEST(Tag, WrongKeyOrFname) {
  SeededRandom rng(51);
  const GroupElem& g = GroupElem::generator();
  const TargetElem step = pair(g, g);
  const TargetElem k = random_target(rng);
  const Scalar fname = Scalar::random(rng);
  const DeletionTag tag = make_tag(fname, k);
  TargetElem other = k;
  for (int i = 0; i < 10000; ++i) {
    other = other * step;
    ASSERT_FALSE(check_tag(tag, fname, other));
  }
  EXPECT_FALSE(check_tag(tag, fname + Scalar::one(), k));
  EXPECT_FALSE(check_tag(tag, Scalar::random(rng), k));
}

}  // namespace
}  // namespace cpad
