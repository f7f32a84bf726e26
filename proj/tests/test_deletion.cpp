#include <gtest/gtest.h>

#include <random>

#include "cpad/deletion.hpp"
#include "cpad/error.hpp"
#include "support.hpp"

namespace cpad {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

AttributeSet with_dummy(std::vector<std::string> names) {
  AttributeSet s(names.begin(), names.end());
  s.insert(std::string(kDummyAttribute));
  return s;
}

// ---- signatures ---------------------------------------------------------------

TEST(Signature, Completeness) {
  SeededRandom rng(61);
  const SigningKeypair kp = SigningKeypair::generate(rng);
  EXPECT_EQ(kp.v, GroupElem::generator().pow(kp.sec));
  const GroupElem sig = sign(kp, as_bytes("hello"));
  EXPECT_TRUE(verify_sig(kp.v, as_bytes("hello"), sig));
  EXPECT_EQ(sig, sign(kp, as_bytes("hello")));
  EXPECT_EQ(pair(sig, GroupElem::generator()), pair(hash_to_group(as_bytes("hello")), kp.v));
}

TEST(Signature, WrongMessageRejected) {
  SeededRandom rng(62);
  const SigningKeypair kp = SigningKeypair::generate(rng);
  for (int i = 0; i < 100; ++i) {
    Bytes m(24), m2(24);
    rng.fill(m);
    rng.fill(m2);
    ASSERT_FALSE(verify_sig(kp.v, m2, sign(kp, m)));
  }
}

TEST(Signature, WrongKeyRejected) {
  SeededRandom rng(63);
  for (int i = 0; i < 100; ++i) {
    const SigningKeypair a = SigningKeypair::generate(rng);
    const SigningKeypair b = SigningKeypair::generate(rng);
    ASSERT_FALSE(verify_sig(b.v, as_bytes("m"), sign(a, as_bytes("m"))));
  }
}

TEST(Signature, DegenerateKeysRejected) {
  SeededRandom rng(64);
  const SigningKeypair kp = SigningKeypair::generate(rng);
  const GroupElem sig = sign(kp, as_bytes("m"));
  EXPECT_FALSE(verify_sig(GroupElem(), as_bytes("m"), sig));
  EXPECT_FALSE(verify_sig(hash_to_group(as_bytes("k")), as_bytes("m"), sig));
  EXPECT_FALSE(verify_sig(kp.v, as_bytes("m"), GroupElem()));
}

// ---- protocol fixture ------------------------------------------------------------

class DeletionTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::vector<std::string> u{"dummy"};
    for (const auto& a : testing::attribute_names(12)) u.push_back(a);
    SetupResult res = setup(u, rng_);
    pp_ = std::move(res.pp);
    msk_ = std::move(res.msk);
    ssk_ = SigningKeypair::generate(rng_);
    fsk_ = SigningKeypair::generate(rng_);
  }

  struct Upload {
    Scalar fname;
    Encapsulation enc;
    DeletionTag tau;
  };

  Upload upload(const std::string& policy) {
    Upload up{Scalar::random(rng_), encapsulate(pp_, parse_policy(policy), rng_), {}};
    up.tau = make_tag(up.fname, up.enc.key);
    return up;
  }

  SeededRandom rng_{60};
  PublicParams pp_;
  MasterSecretKey msk_;
  SigningKeypair ssk_;
  SigningKeypair fsk_;
};

TEST_F(DeletionTest, RequestShapeAndCounts) {
  const Upload up = upload("dummy AND A1");
  const auto [out, c] = counter_scope([&] { return make_del_request(up.fname, up.tau, ssk_, rng_); });
  const auto& [req, state] = out;
  EXPECT_EQ(c, (OpCounter{.exp_G = 1, .exp_Zp = 1}));
  EXPECT_EQ(req.attr, kDummyAttribute);
  EXPECT_EQ(req.fname, up.fname);
  EXPECT_FALSE(req.q.is_zero());
  EXPECT_FALSE(state.u.is_zero());
  EXPECT_EQ(state.q.pow(state.u), req.theta);
  EXPECT_EQ(state.tau, up.tau);
  EXPECT_TRUE(verify_sig(ssk_.v, req.signed_body(), req.signature));
  EXPECT_NO_THROW(check_del_request(req, ssk_.v));
}

TEST_F(DeletionTest, RequestDigestCoversEveryField) {
  const Upload up = upload("dummy AND A1");
  const DeletionRequest req = make_del_request(up.fname, up.tau, ssk_, rng_).first;
  DeletionRequest t = req;
  t.q = t.q + Scalar::one();
  EXPECT_EQ(code_of([&] { check_del_request(t, ssk_.v); }), ErrorCode::BadSignature);
  t = req;
  t.theta = t.theta + Scalar::one();
  EXPECT_EQ(code_of([&] { check_del_request(t, ssk_.v); }), ErrorCode::BadSignature);
  t = req;
  t.fname = t.fname + Scalar::one();
  EXPECT_EQ(code_of([&] { check_del_request(t, ssk_.v); }), ErrorCode::BadSignature);
  t = req;
  t.attr = "A1";
  EXPECT_EQ(code_of([&] { check_del_request(t, ssk_.v); }), ErrorCode::InvalidEncoding);
  EXPECT_EQ(code_of([&] { check_del_request(req, fsk_.v); }), ErrorCode::BadSignature);
}

TEST_F(DeletionTest, ReencryptMutatesOnlyDummyRows) {
  const Upload up = upload("dummy AND (A1 OR A2) AND A3");
  const DeletionRequest req = make_del_request(up.fname, up.tau, ssk_, rng_).first;
  const ReencryptResult res = reencrypt(up.enc.ct, req, fsk_, ssk_.v, rng_);
  EXPECT_EQ(res.ct.C_bar, up.enc.ct.C_bar);
  EXPECT_EQ(res.ct.C_prime, up.enc.ct.C_prime);
  EXPECT_EQ(res.ct.prog, up.enc.ct.prog);
  for (std::size_t i = 0; i < res.ct.rows.size(); ++i) {
    EXPECT_EQ(res.ct.rows[i].C, up.enc.ct.rows[i].C);
    if (up.enc.ct.prog.rho[i] == kDummyAttribute) {
      EXPECT_NE(res.ct.rows[i].D, up.enc.ct.rows[i].D);
    } else {
      EXPECT_EQ(res.ct.rows[i].D.encode(), up.enc.ct.rows[i].D.encode());
    }
  }
  EXPECT_TRUE(verify_sig(fsk_.v, res.response.signed_body(), res.response.signature));
}

TEST_F(DeletionTest, ReencryptCounts) {
  const Upload up = upload("dummy AND A1 AND A2");
  const DeletionRequest req = make_del_request(up.fname, up.tau, ssk_, rng_).first;
  const auto c = counter_scope([&] { (void)reencrypt(up.enc.ct, req, fsk_, ssk_.v, rng_); });
  EXPECT_EQ(c.exp_Zp, 2u);
  // One exponentiation for the single dummy row, one for the response signature.
  EXPECT_EQ(c.exp_G, 1u + 1u);
  // The request signature check.
  EXPECT_EQ(c.pairings, 2u);

  const auto update = counter_scope([&] { (void)apply_dummy_update(up.enc.ct, Scalar::from_u64(7)); });
  EXPECT_EQ(update, (OpCounter{.exp_G = 1}));
}

TEST_F(DeletionTest, UpdateAppliesToEveryDummyRow) {
  // Hand-built program with two dummy rows, outside the shape encapsulate accepts.
  KeyCiphertext ct;
  ct.prog.matrix = {{Scalar::one()}, {Scalar::one()}, {Scalar::one()}};
  ct.prog.rho = {"dummy", "A1", "dummy"};
  for (int i = 0; i < 3; ++i) ct.rows.push_back(CipherRow{GroupElem::generator(), GroupElem::generator()});
  const auto [out, c] = counter_scope([&] { return apply_dummy_update(ct, Scalar::from_u64(5)); });
  EXPECT_EQ(c.exp_G, 2u);
  const GroupElem expect = GroupElem::generator().pow(Scalar::from_u64(5).inverse());
  EXPECT_EQ(out.rows[0].D, expect);
  EXPECT_EQ(out.rows[1].D, GroupElem::generator());
  EXPECT_EQ(out.rows[2].D, expect);
}

TEST_F(DeletionTest, BadRequestLeavesCiphertextAlone) {
  const Upload up = upload("dummy AND A1");
  DeletionRequest req = make_del_request(up.fname, up.tau, ssk_, rng_).first;
  req.signature = sign(fsk_, req.signed_body());
  const KeyCiphertext before = up.enc.ct;
  EXPECT_EQ(code_of([&] { reencrypt(up.enc.ct, req, fsk_, ssk_.v, rng_); }), ErrorCode::BadSignature);
  EXPECT_EQ(up.enc.ct, before);
}

TEST_F(DeletionTest, PostDeletionKeysRecoverWrongValue) {
  std::mt19937_64 gen(65);
  const auto names = testing::attribute_names(12);
  for (int trial = 0; trial < 10; ++trial) {
    const AccessPolicy policy = testing::random_cpad_policy(gen, 1 + gen() % 8, names);
    const Upload up{Scalar::random(rng_), encapsulate(pp_, policy, rng_), {}};
    const DeletionTag tau = make_tag(up.fname, up.enc.key);
    std::vector<UserSecretKey> keys;
    for (int i = 0; i < 3; ++i) keys.push_back(keygen(msk_, pp_, testing::minimal_satisfying_set(policy, gen), rng_));
    for (const auto& sk : keys) ASSERT_EQ(decapsulate(up.enc.ct, sk, pp_), up.enc.key);

    const DeletionRequest req = make_del_request(up.fname, tau, ssk_, rng_).first;
    const ReencryptResult res = reencrypt(up.enc.ct, req, fsk_, ssk_.v, rng_);
    for (const auto& sk : keys) {
      const TargetElem k2 = decapsulate(res.ct, sk, pp_);
      EXPECT_NE(k2, up.enc.key);
      EXPECT_FALSE(check_tag(tau, up.fname, k2));
    }
  }
}

TEST_F(DeletionTest, HonestFogVerifies) {
  const UserSecretKey own = keygen(msk_, pp_, with_dummy({"A1", "A2", "A3"}), rng_);
  for (int i = 0; i < 10; ++i) {
    const Upload up = upload("dummy AND (A1 OR A2) AND A3");
    const auto [req, state] = make_del_request(up.fname, up.tau, ssk_, rng_);
    const ReencryptResult res = reencrypt(up.enc.ct, req, fsk_, ssk_.v, rng_);
    EXPECT_TRUE(verify_deletion(res.response, res.ct, own, state, pp_, fsk_.v, up.fname));
  }
}

TEST_F(DeletionTest, SkippedUpdateFailsVerification) {
  const UserSecretKey own = keygen(msk_, pp_, with_dummy({"A1"}), rng_);
  for (int i = 0; i < 10; ++i) {
    const Upload up = upload("dummy AND A1");
    const auto [req, state] = make_del_request(up.fname, up.tau, ssk_, rng_);
    const Scalar v = Scalar::random_nonzero(rng_);
    const DeletionResponse resp = make_response(req.q.pow(v), fsk_);
    EXPECT_FALSE(verify_deletion(resp, up.enc.ct, own, state, pp_, fsk_.v, up.fname));
  }
}

TEST_F(DeletionTest, InconsistentGammaFailsVerification) {
  const UserSecretKey own = keygen(msk_, pp_, with_dummy({"A1"}), rng_);
  for (int i = 0; i < 10; ++i) {
    const Upload up = upload("dummy AND A1");
    const auto [req, state] = make_del_request(up.fname, up.tau, ssk_, rng_);
    const Scalar v = Scalar::random_nonzero(rng_);
    const Scalar wrong_gamma = Scalar::random_nonzero(rng_);
    ASSERT_NE(wrong_gamma, req.theta.pow(v));
    const KeyCiphertext ct = apply_dummy_update(up.enc.ct, wrong_gamma);
    const DeletionResponse resp = make_response(req.q.pow(v), fsk_);
    EXPECT_FALSE(verify_deletion(resp, ct, own, state, pp_, fsk_.v, up.fname));
  }
}

TEST_F(DeletionTest, ForgedResponseSignature) {
  const UserSecretKey own = keygen(msk_, pp_, with_dummy({"A1"}), rng_);
  const Upload up = upload("dummy AND A1");
  const auto [req, state] = make_del_request(up.fname, up.tau, ssk_, rng_);
  const ReencryptResult res = reencrypt(up.enc.ct, req, fsk_, ssk_.v, rng_);
  EXPECT_EQ(code_of([&] { verify_deletion(res.response, res.ct, own, state, pp_, ssk_.v, up.fname); }),
            ErrorCode::BadFogSignature);
}

TEST_F(DeletionTest, VerifyCountsTenAttributeObject) {
  std::string text = "dummy";
  for (int i = 1; i <= 9; ++i) text += " AND A" + std::to_string(i);
  const UserSecretKey own = keygen(msk_, pp_, with_dummy(testing::attribute_names(9)), rng_);
  const Upload up = upload(text);
  const auto [req, state] = make_del_request(up.fname, up.tau, ssk_, rng_);
  const ReencryptResult res = reencrypt(up.enc.ct, req, fsk_, ssk_.v, rng_);
  for (Exec exec : {Exec::Serial, Exec::Parallel}) {
    const auto [ok, c] = counter_scope(
        [&] { return verify_deletion_proof(res.response.eta, res.ct, own, state, up.fname, exec); });
    EXPECT_TRUE(ok);
    EXPECT_EQ(c.pairings, 2u * 10 + 1);
    EXPECT_EQ(c.exp_G, 1u);
    EXPECT_EQ(c.exp_Zp, 1u);
  }
  const auto full = counter_scope(
      [&] { return verify_deletion(res.response, res.ct, own, state, pp_, fsk_.v, up.fname); }).second;
  EXPECT_EQ(full.pairings, 2u * 10 + 1 + 2);
}

TEST(ExponentConsistency, BlindedExponentsAgree) {
  SeededRandom rng(66);
  for (int i = 0; i < 100; ++i) {
    const Scalar q = Scalar::random_nonzero(rng);
    const Scalar u = Scalar::random_nonzero(rng);
    const Scalar v = Scalar::random_nonzero(rng);
    const Scalar theta = q.pow(u);
    const Scalar eta = q.pow(v);
    ASSERT_EQ(eta.pow(u), theta.pow(v));
    mpz_class expect;
    const mpz_class uv = testing::to_mpz(u) * testing::to_mpz(v);
    mpz_powm(expect.get_mpz_t(), testing::to_mpz(q).get_mpz_t(), uv.get_mpz_t(), testing::group_order().get_mpz_t());
    ASSERT_EQ(testing::to_mpz(theta.pow(v)), expect);
  }
}

TEST_F(DeletionTest, PendingTable) {
  PendingDeletions pending;
  const Upload up = upload("dummy AND A1");
  const DeletionRequest req = pending.begin(up.fname, up.tau, ssk_, rng_);
  EXPECT_TRUE(pending.pending(up.fname));
  EXPECT_EQ(pending.get(up.fname).q, req.q);
  EXPECT_EQ(code_of([&] { pending.begin(up.fname, up.tau, ssk_, rng_); }), ErrorCode::PendingRequestExists);
  const ObjectDeletionState state = pending.resolve(up.fname);
  EXPECT_EQ(state.q.pow(state.u), req.theta);
  EXPECT_FALSE(pending.pending(up.fname));
  EXPECT_EQ(code_of([&] { pending.resolve(up.fname); }), ErrorCode::NoPendingRequest);
  EXPECT_EQ(code_of([&] { (void)pending.get(up.fname); }), ErrorCode::NoPendingRequest);
}

}  // namespace
}  // namespace cpad
