#include <gtest/gtest.h>

#include "cpad/kernels.hpp"

namespace cpad {
namespace {

struct Fixture {
  explicit Fixture(std::size_t n, std::uint64_t seed) : rng(seed) {
    const GroupElem& g = GroupElem::generator();
    g_a = g.pow(Scalar::random_nonzero(rng));
    L = g.pow(Scalar::random_nonzero(rng));
    for (std::size_t i = 0; i < n; ++i) {
      bases.push_back(g.pow(Scalar::random_nonzero(rng)));
      keys.push_back(g.pow(Scalar::random_nonzero(rng)));
    }
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back(RowInput{&bases[i], Scalar::random(rng), Scalar::random_nonzero(rng)});
    }
  }

  SeededRandom rng;
  GroupElem g_a;
  GroupElem L;
  std::vector<GroupElem> bases;
  std::vector<GroupElem> keys;
  std::vector<RowInput> rows;
};

TEST(Kernels, EncryptRowsMatchFormula) {
  Fixture f(7, 91);
  const GroupElem& g = GroupElem::generator();
  const auto out = kernels::encrypt_rows_serial(g, f.g_a, f.rows);
  ASSERT_EQ(out.size(), f.rows.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const GroupElem expect_c = f.g_a.pow(f.rows[i].lambda) * f.bases[i].pow(-f.rows[i].r);
    EXPECT_EQ(out[i].C, expect_c);
    EXPECT_EQ(out[i].D, g.pow(f.rows[i].r));
  }
}

TEST(Kernels, SerialAndParallelEncryptAgree) {
  for (std::size_t n : {0u, 1u, 2u, 17u, 64u}) {
    Fixture f(n, 92 + n);
    const GroupElem& g = GroupElem::generator();
    auto [serial, serial_counts] = counter_scope([&] { return kernels::encrypt_rows_serial(g, f.g_a, f.rows); });
    auto [parallel, parallel_counts] =
        counter_scope([&] { return kernels::encrypt_rows_parallel(g, f.g_a, f.rows); });
    EXPECT_EQ(serial, parallel) << "n=" << n;
    EXPECT_EQ(serial_counts, parallel_counts) << "n=" << n;
  }
}

TEST(Kernels, PairingTermsMatchFormula) {
  Fixture f(5, 93);
  const GroupElem& g = GroupElem::generator();
  const auto rows = kernels::encrypt_rows_serial(g, f.g_a, f.rows);
  std::vector<PairingTerm> terms;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    terms.push_back(PairingTerm{&rows[i].C, &rows[i].D, &f.keys[i], Scalar::random(f.rng)});
  }
  const auto out = kernels::pairing_terms_serial(f.L, terms);
  ASSERT_EQ(out.size(), terms.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const TargetElem expect = (pair(rows[i].C, f.L) * pair(rows[i].D, f.keys[i])).pow(terms[i].omega);
    EXPECT_EQ(out[i], expect);
  }
}

TEST(Kernels, SerialAndParallelPairingsAgree) {
  for (std::size_t n : {0u, 1u, 3u, 16u}) {
    Fixture f(n, 94 + n);
    const GroupElem& g = GroupElem::generator();
    const auto rows = kernels::encrypt_rows_serial(g, f.g_a, f.rows);
    std::vector<PairingTerm> terms;
    for (std::size_t i = 0; i < n; ++i) {
      terms.push_back(PairingTerm{&rows[i].C, &rows[i].D, &f.keys[i], Scalar::random(f.rng)});
    }
    auto [serial, serial_counts] = counter_scope([&] { return kernels::pairing_terms_serial(f.L, terms); });
    auto [parallel, parallel_counts] = counter_scope([&] { return kernels::pairing_terms_parallel(f.L, terms); });
    EXPECT_EQ(serial, parallel) << "n=" << n;
    EXPECT_EQ(serial_counts, parallel_counts) << "n=" << n;
    EXPECT_EQ(serial_counts.pairings, 2 * n);
  }
}

TEST(Kernels, ThreadCountPositive) { EXPECT_GE(kernels::parallel_threads(), 1); }

}  // namespace
}  // namespace cpad
