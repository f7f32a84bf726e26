#include <gtest/gtest.h>

#include "cpad/codec.hpp"
#include "cpad/error.hpp"

namespace cpad {
namespace {

using tlv::Reader;
using tlv::Type;
using tlv::Writer;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

// ---- framing -------------------------------------------------------------------

TEST(Tlv, StreamHeaderAndRecordLayout) {
  Writer w;
  w.u32(0x01020304).text("hi");
  const Bytes s = w.stream();
  const Bytes expect{'C', 'P', 'A', 'D', 0x01,              //
                     0x06, 0, 0, 0, 4, 0x01, 0x02, 0x03, 0x04,  //
                     0x05, 0, 0, 0, 2, 'h', 'i'};
  EXPECT_EQ(s, expect);
  Reader r = Reader::from_stream(s);
  EXPECT_EQ(r.peek(), Type::U32);
  EXPECT_EQ(r.u32(), 0x01020304u);
  EXPECT_EQ(r.text(), "hi");
  EXPECT_TRUE(r.done());
}

TEST(Tlv, RejectsBadHeaders) {
  Writer w;
  w.u32(1);
  Bytes s = w.stream();
  Bytes bad_magic = s;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { Reader::from_stream(bad_magic); }), ErrorCode::InvalidEncoding);
  Bytes bad_version = s;
  bad_version[4] = 0x02;
  EXPECT_EQ(code_of([&] { Reader::from_stream(bad_version); }), ErrorCode::InvalidEncoding);
  EXPECT_EQ(code_of([&] { Reader::from_stream(ByteView(s.data(), 3)); }), ErrorCode::InvalidEncoding);
}

TEST(Tlv, RejectsTypeAndLengthViolations) {
  Writer w;
  w.u32(7);
  const Bytes recs = w.records();
  EXPECT_EQ(code_of([&] { Reader(recs).text(); }), ErrorCode::InvalidEncoding);
  Bytes truncated = recs;
  truncated.pop_back();
  EXPECT_EQ(code_of([&] { Reader(truncated).u32(); }), ErrorCode::InvalidEncoding);
  Bytes long_len = recs;
  long_len[4] = 9;
  EXPECT_EQ(code_of([&] { Reader(long_len).u32(); }), ErrorCode::InvalidEncoding);
  Writer short_scalar;
  short_scalar.record(Type::Scalar, Bytes(31, 0));
  EXPECT_EQ(code_of([&] { Reader(short_scalar.records()).scalar(); }), ErrorCode::InvalidEncoding);
  Writer extra;
  extra.u32(1).u32(2);
  Reader r(extra.records());
  r.u32();
  EXPECT_EQ(code_of([&] { r.expect_end(); }), ErrorCode::InvalidEncoding);
}

TEST(Tlv, NestedRecords) {
  Writer inner;
  inner.text("a").u32(5);
  Writer outer;
  outer.nested(Type::DeletionTag, inner);
  Reader r(outer.records());
  Reader in = r.nested(Type::DeletionTag);
  EXPECT_EQ(in.text(), "a");
  EXPECT_EQ(in.u32(), 5u);
  in.expect_end();
  r.expect_end();
}

TEST(Tlv, TypeTableIsFrozen) {
  EXPECT_EQ(static_cast<int>(Type::Scalar), 0x01);
  EXPECT_EQ(static_cast<int>(Type::GroupElem), 0x02);
  EXPECT_EQ(static_cast<int>(Type::TargetElem), 0x03);
  EXPECT_EQ(static_cast<int>(Type::Bytes), 0x04);
  EXPECT_EQ(static_cast<int>(Type::Text), 0x05);
  EXPECT_EQ(static_cast<int>(Type::U32), 0x06);
  EXPECT_EQ(static_cast<int>(Type::LsssProgram), 0x10);
  EXPECT_EQ(static_cast<int>(Type::KeyCiphertext), 0x11);
  EXPECT_EQ(static_cast<int>(Type::SealedPayload), 0x12);
  EXPECT_EQ(static_cast<int>(Type::PublicParams), 0x13);
  EXPECT_EQ(static_cast<int>(Type::MasterSecretKey), 0x14);
  EXPECT_EQ(static_cast<int>(Type::UserSecretKey), 0x15);
  EXPECT_EQ(static_cast<int>(Type::SigningKey), 0x16);
  EXPECT_EQ(static_cast<int>(Type::VerifyKey), 0x17);
  EXPECT_EQ(static_cast<int>(Type::DeletionRequest), 0x18);
  EXPECT_EQ(static_cast<int>(Type::DeletionResponse), 0x19);
  EXPECT_EQ(static_cast<int>(Type::ObjectDeletionState), 0x1A);
  EXPECT_EQ(static_cast<int>(Type::DeletionTag), 0x1B);
  EXPECT_EQ(static_cast<int>(Type::FogRecord), 0x20);
  EXPECT_EQ(static_cast<int>(Type::CloudRecord), 0x21);
  EXPECT_EQ(static_cast<int>(Type::ObjectRecord), 0x22);
  EXPECT_EQ(tlv::type_name(Type::KeyCiphertext), "KeyCiphertext");
}

// ---- domain schemas ------------------------------------------------------------

class CodecTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::vector<std::string> u{"dummy", "A", "B", "C"};
    SetupResult res = setup(u, rng_);
    pp_ = std::move(res.pp);
    msk_ = std::move(res.msk);
    sk_ = keygen(msk_, pp_, {"dummy", "A", "B"}, rng_);
    enc_ = encapsulate(pp_, parse_policy("dummy AND (A OR B) AND (B OR C)"), rng_);
    ssk_ = SigningKeypair::generate(rng_);
  }

  template <class T>
  void roundtrip(const T& v) {
    const Bytes s = codec::to_stream(v);
    const T back = codec::from_stream<T>(s);
    EXPECT_EQ(back, v);
    EXPECT_EQ(codec::to_stream(back), s);
  }

  SeededRandom rng_{71};
  PublicParams pp_;
  MasterSecretKey msk_;
  UserSecretKey sk_;
  Encapsulation enc_;
  SigningKeypair ssk_;
};

TEST_F(CodecTest, Roundtrips) {
  roundtrip(pp_);
  roundtrip(msk_);
  roundtrip(sk_);
  roundtrip(enc_.ct);
  roundtrip(enc_.ct.prog);
  roundtrip(ssk_);
  const Scalar fname = Scalar::random(rng_);
  roundtrip(seal(as_bytes("data"), enc_.key, fname, rng_));
  const DeletionTag tau = make_tag(fname, enc_.key);
  roundtrip(tau);
  auto [req, state] = make_del_request(fname, tau, ssk_, rng_);
  roundtrip(req);
  roundtrip(state);
  roundtrip(make_response(Scalar::from_u64(9), ssk_));
}

TEST_F(CodecTest, PublicParamsKeepUniverseOrder) {
  const PublicParams back = codec::from_stream<PublicParams>(codec::to_stream(pp_));
  EXPECT_EQ(back.universe, pp_.universe);
}

TEST_F(CodecTest, CiphertextLayout) {
  const Bytes s = codec::to_stream(enc_.ct);
  Reader r = Reader::from_stream(s);
  Reader in = r.nested(Type::KeyCiphertext);
  std::vector<Type> types;
  while (!in.done()) {
    types.push_back(in.peek());
    in.record(types.back());
  }
  std::vector<Type> expect{Type::LsssProgram, Type::TargetElem, Type::GroupElem};
  for (std::size_t i = 0; i < enc_.ct.rows.size(); ++i) {
    expect.push_back(Type::GroupElem);
    expect.push_back(Type::GroupElem);
  }
  EXPECT_EQ(types, expect);
}

TEST_F(CodecTest, RequestSignatureIsLastRecord) {
  const Scalar fname = Scalar::random(rng_);
  const DeletionRequest req = make_del_request(fname, make_tag(fname, enc_.key), ssk_, rng_).first;
  const Bytes s = codec::to_stream(req);
  Reader r = Reader::from_stream(s);
  Reader in = r.nested(Type::DeletionRequest);
  EXPECT_EQ(in.text(), "delete");
  EXPECT_EQ(in.scalar(), fname);
  EXPECT_EQ(in.text(), "dummy");
  EXPECT_EQ(in.scalar(), req.q);
  EXPECT_EQ(in.scalar(), req.theta);
  EXPECT_EQ(in.group(), req.signature);
  in.expect_end();
}

TEST_F(CodecTest, RejectsCorruptInputWithoutCrashing) {
  const Bytes good = codec::to_stream(enc_.ct);
  SeededRandom rng(72);
  for (int i = 0; i < 300; ++i) {
    Bytes bad = good;
    Bytes pick(4);
    rng.fill(pick);
    const std::size_t pos = (pick[0] << 16 | pick[1] << 8 | pick[2]) % bad.size();
    bad[pos] ^= static_cast<std::uint8_t>(1u << (pick[3] % 8));
    try {
      const KeyCiphertext ct = codec::from_stream<KeyCiphertext>(bad);
      // A flip can land on a Scalar matrix entry and still decode.
      EXPECT_NE(ct, enc_.ct);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::InvalidEncoding || e.code() == ErrorCode::SyntaxError) << e.what();
    }
  }
  for (std::size_t cut = 0; cut < good.size(); cut += 97) {
    EXPECT_THROW(codec::from_stream<KeyCiphertext>(ByteView(good.data(), cut)), Error);
  }
}

TEST_F(CodecTest, SigningKeyHalvesMustMatch) {
  SigningKeypair bad = ssk_;
  bad.sec = bad.sec + Scalar::one();
  EXPECT_EQ(code_of([&] { codec::from_stream<SigningKeypair>(codec::to_stream(bad)); }),
            ErrorCode::InvalidEncoding);
}

TEST_F(CodecTest, RepeatedAttributeInKeyRejected) {
  Writer in;
  in.group(sk_.K).group(sk_.L).u32(2);
  in.text("A").group(sk_.per_attr.at("A")).text("A").group(sk_.per_attr.at("A"));
  Writer w;
  w.nested(Type::UserSecretKey, in);
  EXPECT_EQ(code_of([&] { codec::from_stream<UserSecretKey>(w.stream()); }), ErrorCode::InvalidEncoding);
}

TEST_F(CodecTest, WrongRecordTypeRejected) {
  const Bytes s = codec::to_stream(msk_);
  EXPECT_EQ(code_of([&] { codec::from_stream<UserSecretKey>(s); }), ErrorCode::InvalidEncoding);
}

}  // namespace
}  // namespace cpad
