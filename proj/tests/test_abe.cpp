#include <gtest/gtest.h>

#include <random>

#include "cpad/abe.hpp"
#include "cpad/error.hpp"
#include "support.hpp"

namespace cpad {
namespace {

const GroupElem& g() { return GroupElem::generator(); }

std::vector<std::string> universe_of(std::size_t n) {
  std::vector<std::string> u{std::string(kDummyAttribute)};
  for (const auto& a : testing::attribute_names(n)) u.push_back(a);
  return u;
}

AttributeSet with_dummy(std::vector<std::string> names) {
  AttributeSet s(names.begin(), names.end());
  s.insert(std::string(kDummyAttribute));
  return s;
}

std::string and_chain(std::size_t extra) {
  std::string text(kDummyAttribute);
  for (std::size_t i = 1; i <= extra; ++i) text += " AND A" + std::to_string(i);
  return text;
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

class AbeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto u = universe_of(12);
    SetupResult res = setup(u, rng_, &oracle_);
    pp_ = std::move(res.pp);
    msk_ = std::move(res.msk);
  }

  SeededRandom rng_{31};
  SetupOracle oracle_;
  PublicParams pp_;
  MasterSecretKey msk_;
};

// ---- setup -------------------------------------------------------------------

TEST_F(AbeTest, SetupInvariants) {
  EXPECT_EQ(pair(msk_.g_alpha, g()), pp_.e_gg_alpha);
  EXPECT_EQ(pp_.attr_bases.size(), pp_.universe.size());
  EXPECT_FALSE(pp_.e_gg_alpha.is_identity());
  EXPECT_EQ(pp_.g_a, g().pow(oracle_.a));
  EXPECT_EQ(msk_.g_alpha, g().pow(oracle_.alpha));
  for (const auto& name : pp_.universe) EXPECT_TRUE(pp_.attr_bases.at(name).mirrored());
}

TEST(Setup, CountsForTenAttributes) {
  SeededRandom rng(32);
  const auto u = universe_of(9);
  const auto [res, c] = counter_scope([&] { return setup(u, rng); });
  EXPECT_GE(c.exp_G, 12u);
  EXPECT_LE(c.pairings, 1u);
  EXPECT_EQ(res.pp.attr_bases.size(), 10u);
}

TEST(Setup, RejectsBadUniverses) {
  SeededRandom rng(33);
  const std::vector<std::string> no_dummy{"A", "B"};
  EXPECT_EQ(code_of([&] { setup(no_dummy, rng); }), ErrorCode::MissingDummyAttribute);
  const std::vector<std::string> dup{"dummy", "A", "A"};
  EXPECT_EQ(code_of([&] { setup(dup, rng); }), ErrorCode::DuplicateAttribute);
  const std::vector<std::string> bad{"dummy", "bad$name"};
  EXPECT_THROW(setup(bad, rng), SyntaxError);
}

// ---- keygen ------------------------------------------------------------------

TEST_F(AbeTest, KeygenPairingInvariants) {
  const UserSecretKey sk = keygen(msk_, pp_, with_dummy({"A1", "A2", "A3"}), rng_);
  EXPECT_EQ(pair(sk.K, g()), pp_.e_gg_alpha * pair(pp_.g_a, sk.L));
  for (const auto& [x, kx] : sk.per_attr) EXPECT_EQ(pair(kx, g()), pair(pp_.attr_bases.at(x), sk.L));
  EXPECT_EQ(sk.attributes(), with_dummy({"A1", "A2", "A3"}));
}

TEST_F(AbeTest, KeygenFreshPerCall) {
  std::set<GroupElem::Encoding> seen;
  for (int i = 0; i < 100; ++i) seen.insert(keygen(msk_, pp_, with_dummy({"A1"}), rng_).K.encode());
  EXPECT_EQ(seen.size(), 100u);
}

TEST_F(AbeTest, KeygenCountsTenAttributes) {
  const AttributeSet attrs = with_dummy(testing::attribute_names(9));
  ASSERT_EQ(attrs.size(), 10u);
  const auto [sk, c] = counter_scope([&] { return keygen(msk_, pp_, attrs, rng_); });
  EXPECT_EQ(c, (OpCounter{.exp_G = 12, .mul_G = 1}));
  EXPECT_EQ(sk.per_attr.size(), 10u);
}

TEST_F(AbeTest, KeygenErrors) {
  EXPECT_EQ(code_of([&] { keygen(msk_, pp_, {"A1"}, rng_); }), ErrorCode::MissingDummyAttribute);
  EXPECT_EQ(code_of([&] { keygen(msk_, pp_, with_dummy({"Z9"}), rng_); }), ErrorCode::UnknownAttribute);
}

// ---- encapsulate / decapsulate ---------------------------------------------------

TEST_F(AbeTest, EncapsulateCountsFiftyRows) {
  std::vector<std::string> big_u = universe_of(49);
  SeededRandom rng(34);
  const SetupResult big = setup(big_u, rng);
  const AccessPolicy policy = parse_policy(and_chain(49));
  const auto [enc, c] = counter_scope([&] { return encapsulate(big.pp, policy, rng, Exec::Serial); });
  ASSERT_EQ(enc.ct.rows.size(), 50u);
  EXPECT_EQ(c.exp_G, 3u * 50 + 1);
  EXPECT_EQ(c.mul_G, 50u);
  const auto par = counter_scope([&] { return encapsulate(big.pp, policy, rng, Exec::Parallel); }).second;
  EXPECT_EQ(par, c);
}

TEST_F(AbeTest, FreshRowInvariantWithOracle) {
  const AccessPolicy policy = parse_policy("dummy AND (A1 OR A2 AND A3) AND (A4 OR A1)");
  EncapsulationOracle eo;
  const Encapsulation enc = encapsulate(pp_, policy, rng_, Exec::Parallel, &eo);
  const TargetElem e_ga_g = pair(pp_.g_a, g());
  ASSERT_EQ(eo.shares.lambda.size(), enc.ct.rows.size());
  for (std::size_t i = 0; i < enc.ct.rows.size(); ++i) {
    const auto& row = enc.ct.rows[i];
    const GroupElem& h = pp_.attr_bases.at(enc.ct.prog.rho[i]);
    EXPECT_EQ(pair(row.C, g()) * pair(h, row.D), e_ga_g.pow(eo.shares.lambda[i])) << "row " << i;
    EXPECT_EQ(row.D, g().pow(eo.r[i]));
  }
  EXPECT_EQ(enc.ct.C_prime, g().pow(eo.s));
  EXPECT_EQ(eo.shares.secret_vec[0], eo.s);
  EXPECT_EQ(enc.ct.C_bar, enc.key * pp_.e_gg_alpha.pow(eo.s));
}

TEST_F(AbeTest, AlgebraicCheckOnBlinding) {
  const AccessPolicy policy = parse_policy("dummy AND A1");
  EncapsulationOracle eo;
  const Encapsulation enc = encapsulate(pp_, policy, rng_, Exec::Serial, &eo);
  const UserSecretKey sk = keygen(msk_, pp_, with_dummy({"A1"}), rng_);
  const TargetElem blind = pp_.e_gg_alpha.pow(eo.s);
  EXPECT_EQ(pair(enc.ct.C_prime, sk.K) / blind, pair(pp_.g_a, sk.L).pow(eo.s));
}

TEST_F(AbeTest, CorrectnessRandomized) {
  std::mt19937_64 gen(35);
  const auto names = testing::attribute_names(12);
  for (int trial = 0; trial < 30; ++trial) {
    const AccessPolicy policy = testing::random_cpad_policy(gen, 1 + gen() % 19, names);
    const Exec exec = trial % 2 ? Exec::Parallel : Exec::Serial;
    const Encapsulation enc = encapsulate(pp_, policy, rng_, exec);
    AttributeSet attrs = testing::minimal_satisfying_set(policy, gen);
    // Extra unrelated attributes must not disturb decryption.
    attrs.insert(names[gen() % names.size()]);
    const UserSecretKey sk = keygen(msk_, pp_, attrs, rng_);
    ASSERT_EQ(decapsulate(enc.ct, sk, pp_, exec), enc.key) << to_string(policy);
  }
}

TEST_F(AbeTest, RejectionRandomized) {
  std::mt19937_64 gen(36);
  const auto names = testing::attribute_names(12);
  int checked = 0;
  while (checked < 30) {
    const AccessPolicy policy = testing::random_cpad_policy(gen, 1 + gen() % 10, names);
    const AttributeSet minimal = testing::minimal_satisfying_set(policy, gen);
    for (const auto& drop : minimal) {
      if (drop == kDummyAttribute) continue;
      AttributeSet attrs = minimal;
      attrs.erase(drop);
      ASSERT_FALSE(testing::brute_force_eval(policy.root, attrs));
      const Encapsulation enc = encapsulate(pp_, policy, rng_);
      const UserSecretKey sk = keygen(msk_, pp_, attrs, rng_);
      EXPECT_EQ(code_of([&] { decapsulate(enc.ct, sk, pp_); }), ErrorCode::NotAuthorized);
      ++checked;
      break;
    }
  }
}

TEST_F(AbeTest, DecapsulateCountsTenRows) {
  const AccessPolicy policy = parse_policy(and_chain(9));
  const Encapsulation enc = encapsulate(pp_, policy, rng_);
  const UserSecretKey sk = keygen(msk_, pp_, with_dummy(testing::attribute_names(9)), rng_);
  for (Exec exec : {Exec::Serial, Exec::Parallel}) {
    const auto [k, c] = counter_scope([&] { return decapsulate(enc.ct, sk, pp_, exec); });
    EXPECT_EQ(k, enc.key);
    EXPECT_EQ(c.pairings, 2u * 10 + 1);
  }
}

TEST_F(AbeTest, SerialAndParallelAgree) {
  const AccessPolicy policy = parse_policy("dummy AND (A1 OR A2) AND A3 AND (A4 OR A5 AND A6)");
  SeededRandom r1(37), r2(37);
  const Encapsulation a = encapsulate(pp_, policy, r1, Exec::Serial);
  const Encapsulation b = encapsulate(pp_, policy, r2, Exec::Parallel);
  EXPECT_EQ(a.ct, b.ct);
  EXPECT_EQ(a.key, b.key);
}

TEST_F(AbeTest, PolicyShapeErrors) {
  EXPECT_EQ(code_of([&] { encapsulate(pp_, parse_policy("A1 AND A2"), rng_); }), ErrorCode::PolicyMissingDummy);
  EXPECT_EQ(code_of([&] { encapsulate(pp_, parse_policy("dummy OR A2"), rng_); }), ErrorCode::PolicyMissingDummy);
  EXPECT_EQ(code_of([&] { encapsulate(pp_, parse_policy("(dummy OR A1) AND A2"), rng_); }),
            ErrorCode::PolicyMissingDummy);
  EXPECT_EQ(code_of([&] { encapsulate(pp_, parse_policy("dummy AND (A1 OR dummy)"), rng_); }),
            ErrorCode::DummyNotUnique);
  EXPECT_EQ(code_of([&] { encapsulate(pp_, parse_policy("dummy AND Q7"), rng_); }), ErrorCode::UnknownAttribute);
}

TEST_F(AbeTest, PreloadedProgram) {
  const LsssProgram prog = compile_lsss(parse_policy("dummy AND (A1 OR A2)"));
  const Encapsulation enc = encapsulate(pp_, prog, rng_);
  const UserSecretKey sk = keygen(msk_, pp_, with_dummy({"A2"}), rng_);
  EXPECT_EQ(decapsulate(enc.ct, sk, pp_), enc.key);

  // A program that some dummy-free set satisfies cannot support deletion.
  const LsssProgram weak = compile_lsss(parse_policy("dummy OR A1"));
  EXPECT_EQ(code_of([&] { encapsulate(pp_, weak, rng_); }), ErrorCode::PolicyMissingDummy);
}

TEST_F(AbeTest, CollusionCrossAssignments) {
  const AccessPolicy policy = parse_policy("dummy AND A1 AND A2");
  for (int trial = 0; trial < 10; ++trial) {
    const Encapsulation enc = encapsulate(pp_, policy, rng_);
    const UserSecretKey a = keygen(msk_, pp_, with_dummy({"A1"}), rng_);
    const UserSecretKey b = keygen(msk_, pp_, with_dummy({"A2"}), rng_);
    const ReconstructionPlan plan = find_reconstruction(enc.ct.prog, with_dummy({"A1", "A2"}));
    // Each of K, L, K_dummy, K_A1, K_A2 drawn from either key; the two
    // honest-looking assignments that use one key throughout are impossible
    // because neither key has both A1 and A2.
    for (unsigned mask = 0; mask < 32; ++mask) {
      auto pick = [&](unsigned bit) -> const UserSecretKey& { return mask >> bit & 1 ? b : a; };
      const GroupElem& K = pick(0).K;
      const GroupElem& Lk = pick(1).L;
      std::map<std::string, const GroupElem*> comp;
      comp["dummy"] = &pick(2).per_attr.at("dummy");
      const UserSecretKey& src_a1 = pick(3);
      const UserSecretKey& src_a2 = pick(4);
      if (!src_a1.per_attr.count("A1") || !src_a2.per_attr.count("A2")) continue;
      comp["A1"] = &src_a1.per_attr.at("A1");
      comp["A2"] = &src_a2.per_attr.at("A2");
      std::vector<PairingTerm> terms;
      for (std::size_t j = 0; j < plan.rows.size(); ++j) {
        const std::size_t i = plan.rows[j];
        terms.push_back(PairingTerm{&enc.ct.rows[i].C, &enc.ct.rows[i].D, comp.at(enc.ct.prog.rho[i]), plan.omega[j]});
      }
      EXPECT_NE(recover_key(enc.ct, K, Lk, terms, Exec::Serial), enc.key) << "mask " << mask;
    }
  }
}

}  // namespace
}  // namespace cpad
