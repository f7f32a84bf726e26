#include <gtest/gtest.h>

#include <random>

#include "cpad/error.hpp"
#include "cpad/policy.hpp"
#include "support.hpp"

namespace cpad {
namespace {

using testing::brute_force_eval;
using testing::random_tree;

PolicyNode L(const char* a) { return PolicyNode::leaf(a); }

Scalar S(std::int64_t v) { return Scalar::from_int(v); }

std::vector<std::vector<Scalar>> mat(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
  std::vector<std::vector<Scalar>> out;
  for (const auto& r : rows) {
    std::vector<Scalar> row;
    for (auto v : r) row.push_back(S(v));
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<Scalar> combine(const LsssProgram& prog, const ReconstructionPlan& plan) {
  std::vector<Scalar> sum(prog.cols());
  for (std::size_t j = 0; j < plan.rows.size(); ++j) {
    for (std::size_t c = 0; c < prog.cols(); ++c) sum[c] += plan.omega[j] * prog.matrix[plan.rows[j]][c];
  }
  return sum;
}

std::vector<Scalar> target(std::size_t n) {
  std::vector<Scalar> t(n);
  t[0] = Scalar::one();
  return t;
}

// ---- parser ------------------------------------------------------------------

TEST(ParsePolicy, DummyAndOr) {
  EXPECT_EQ(parse_policy("dummy AND (A OR B)").root,
            PolicyNode::all_of({L("dummy"), PolicyNode::any_of({L("A"), L("B")})}));
}

TEST(ParsePolicy, SingleLeaf) { EXPECT_EQ(parse_policy("A").root, L("A")); }

TEST(ParsePolicy, AndBindsTighterThanOr) {
  const AccessPolicy reference = parse_policy("(A AND B) OR C");
  EXPECT_EQ(parse_policy("A AND B OR C"), reference);
  EXPECT_EQ(reference.root, PolicyNode::any_of({PolicyNode::all_of({L("A"), L("B")}), L("C")}));
  EXPECT_EQ(parse_policy("C OR A AND B").root, PolicyNode::any_of({L("C"), PolicyNode::all_of({L("A"), L("B")})}));
}

TEST(ParsePolicy, KeywordsAreCaseInsensitive) {
  EXPECT_EQ(parse_policy("a and b Or c"), parse_policy("a AND b OR c"));
}

TEST(ParsePolicy, ChainsFlattenIntoOneGate) {
  EXPECT_EQ(parse_policy("A AND B AND C").root, PolicyNode::all_of({L("A"), L("B"), L("C")}));
}

TEST(ParsePolicy, AttributeCharset) {
  EXPECT_EQ(parse_policy("_x:y-1").root, L("_x:y-1"));
  EXPECT_THROW(parse_policy("1abc"), SyntaxError);
}

TEST(ParsePolicy, ErrorsCarryOffsets) {
  try {
    parse_policy("A AND (B OR");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 11u);
  }
  try {
    parse_policy("A B");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
  try {
    parse_policy("A AND $");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 6u);
  }
}

TEST(ParsePolicy, EmptyAndNegation) {
  try {
    parse_policy("   ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyPolicy);
  }
  try {
    parse_policy("A AND NOT B");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotonePolicy);
  }
}

TEST(ParsePolicy, PrintParseRoundtrip) {
  std::mt19937_64 gen(21);
  const auto names = testing::attribute_names(5);
  for (int i = 0; i < 100; ++i) {
    const AccessPolicy p{random_tree(gen, 1 + gen() % 8, names)};
    const std::string text = to_string(p);
    const AccessPolicy back = parse_policy(text);
    EXPECT_EQ(to_string(back), text);
    // Same formula up to flattening of nested same-kind gates.
    for (unsigned mask = 0; mask < 32; ++mask) {
      AttributeSet s;
      for (unsigned b = 0; b < 5; ++b) {
        if (mask >> b & 1) s.insert(names[b]);
      }
      ASSERT_EQ(brute_force_eval(back.root, s), brute_force_eval(p.root, s)) << text;
    }
  }
}

TEST(ParsePolicy, ToStringIsCanonical) {
  EXPECT_EQ(to_string(parse_policy("dummy   and (a or  b)")), "dummy AND (a OR b)");
  EXPECT_EQ(to_string(parse_policy("(A AND B) OR C")), "A AND B OR C");
  EXPECT_EQ(to_string(parse_policy("(A OR B) AND C")), "(A OR B) AND C");
}

// ---- compile_lsss ------------------------------------------------------------

TEST(CompileLsss, Or) {
  const LsssProgram p = compile_lsss(parse_policy("A OR B"));
  EXPECT_EQ(p.matrix, mat({{1}, {1}}));
  EXPECT_EQ(p.rho, (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(try_find_reconstruction(p, {"A"}));
  EXPECT_TRUE(try_find_reconstruction(p, {"B"}));
  EXPECT_TRUE(try_find_reconstruction(p, {"A", "B"}));
  EXPECT_FALSE(try_find_reconstruction(p, {}));
}

TEST(CompileLsss, And) {
  const LsssProgram p = compile_lsss(parse_policy("A AND B"));
  EXPECT_EQ(p.matrix, mat({{1, 1}, {0, -1}}));
  EXPECT_EQ(p.rho, (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(try_find_reconstruction(p, {"A", "B"}));
  EXPECT_FALSE(try_find_reconstruction(p, {"A"}));
  EXPECT_FALSE(try_find_reconstruction(p, {"B"}));
  EXPECT_FALSE(try_find_reconstruction(p, {}));
}

TEST(CompileLsss, DimensionsFollowLeafCount) {
  std::mt19937_64 gen(22);
  const auto names = testing::attribute_names(6);
  for (int i = 0; i < 200; ++i) {
    const std::size_t leaves = 1 + gen() % 12;
    const AccessPolicy p{random_tree(gen, leaves, names)};
    const LsssProgram prog = compile_lsss(p);
    EXPECT_EQ(prog.rows(), leaves);
    EXPECT_LE(prog.cols(), leaves);
    EXPECT_EQ(prog.rho, p.leaves());
  }
}

TEST(CompileLsss, SpanMatchesFormulaOnAllSubsets) {
  std::mt19937_64 gen(23);
  const auto names = testing::attribute_names(6);
  for (int i = 0; i < 300; ++i) {
    const AccessPolicy p{random_tree(gen, 1 + gen() % 6, names)};
    const LsssProgram prog = compile_lsss(p);
    for (unsigned mask = 0; mask < 64; ++mask) {
      AttributeSet s;
      for (unsigned b = 0; b < 6; ++b) {
        if (mask >> b & 1) s.insert(names[b]);
      }
      const auto plan = try_find_reconstruction(prog, s);
      ASSERT_EQ(plan.has_value(), brute_force_eval(p.root, s)) << to_string(p);
      if (plan) {
        ASSERT_EQ(combine(prog, *plan), target(prog.cols()));
        for (std::size_t row : plan->rows) ASSERT_TRUE(s.count(prog.rho[row]));
      }
    }
  }
}

TEST(CompileLsss, ValidateRejectsRaggedPrograms) {
  LsssProgram p;
  p.matrix = mat({{1, 1}, {0}});
  p.rho = {"A", "B"};
  EXPECT_THROW(p.validate(), Error);
  p.matrix = mat({{1}});
  EXPECT_THROW(p.validate(), Error);
}

// ---- shares and reconstruction ------------------------------------------------

TEST(MakeShares, PureOrCopiesSecret) {
  SeededRandom rng(24);
  const LsssProgram p = compile_lsss(parse_policy("A OR B OR C OR D"));
  ASSERT_EQ(p.cols(), 1u);
  const ShareVector sh = make_shares(p, S(7), rng);
  for (const auto& l : sh.lambda) EXPECT_EQ(l, S(7));
}

TEST(MakeShares, AndMatrixVectorProduct) {
  const LsssProgram p = compile_lsss(parse_policy("A AND B"));
  // v = (5, 3): lambda = M v.
  const std::vector<Scalar> v{S(5), S(3)};
  std::vector<Scalar> lambda;
  for (const auto& row : p.matrix) lambda.push_back(row[0] * v[0] + row[1] * v[1]);
  EXPECT_EQ(lambda, (std::vector<Scalar>{S(8), S(-3)}));

  SeededRandom rng(25);
  const ShareVector sh = make_shares(p, S(5), rng);
  EXPECT_EQ(sh.secret_vec[0], S(5));
  EXPECT_EQ(sh.lambda[0], S(5) + sh.secret_vec[1]);
  EXPECT_EQ(sh.lambda[1], -sh.secret_vec[1]);
}

TEST(MakeShares, SharesMatchMatrixProduct) {
  std::mt19937_64 gen(26);
  SeededRandom rng(26);
  const auto names = testing::attribute_names(5);
  for (int i = 0; i < 50; ++i) {
    const LsssProgram p = compile_lsss(AccessPolicy{random_tree(gen, 1 + gen() % 10, names)});
    const ShareVector sh = make_shares(p, Scalar::random(rng), rng);
    ASSERT_EQ(sh.secret_vec.size(), p.cols());
    for (std::size_t r = 0; r < p.rows(); ++r) {
      Scalar dot;
      for (std::size_t c = 0; c < p.cols(); ++c) dot += p.matrix[r][c] * sh.secret_vec[c];
      ASSERT_EQ(sh.lambda[r], dot);
    }
  }
}

TEST(FindReconstruction, OrSingleRow) {
  const LsssProgram p = compile_lsss(parse_policy("A OR B"));
  const ReconstructionPlan plan = find_reconstruction(p, {"A"});
  EXPECT_EQ(plan.rows, (std::vector<std::size_t>{0}));
  EXPECT_EQ(plan.omega, (std::vector<Scalar>{S(1)}));
}

TEST(FindReconstruction, AndCoefficients) {
  const LsssProgram p = compile_lsss(parse_policy("A AND B"));
  const ReconstructionPlan plan = find_reconstruction(p, {"A", "B"});
  EXPECT_EQ(plan.rows, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(plan.omega, (std::vector<Scalar>{S(1), S(1)}));
  EXPECT_EQ(combine(p, plan), target(2));
}

TEST(FindReconstruction, AndNotAuthorized) {
  const LsssProgram p = compile_lsss(parse_policy("A AND B"));
  try {
    find_reconstruction(p, {"A"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAuthorized);
  }
}

TEST(FindReconstruction, LowestRowWins) {
  const LsssProgram p = compile_lsss(parse_policy("A OR B OR A"));
  const ReconstructionPlan plan = find_reconstruction(p, {"A", "B"});
  EXPECT_EQ(plan.rows, (std::vector<std::size_t>{0}));
}

TEST(FindReconstruction, SharesRecombineToSecret) {
  std::mt19937_64 gen(27);
  SeededRandom rng(27);
  const auto names = testing::attribute_names(6);
  for (int i = 0; i < 100; ++i) {
    const AccessPolicy p{random_tree(gen, 1 + gen() % 12, names)};
    const LsssProgram prog = compile_lsss(p);
    const Scalar s = Scalar::random(rng);
    const ShareVector sh = make_shares(prog, s, rng);
    const AttributeSet attrs = testing::minimal_satisfying_set(p, gen);
    const ReconstructionPlan plan = find_reconstruction(prog, attrs);
    Scalar acc;
    for (std::size_t j = 0; j < plan.rows.size(); ++j) acc += plan.omega[j] * sh.lambda[plan.rows[j]];
    ASSERT_EQ(acc, s) << to_string(p);
  }
}

}  // namespace
}  // namespace cpad
