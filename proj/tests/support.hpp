#pragma once

// Shared helpers for the test suites: independent oracles (GMP arithmetic
// mod p, brute-force formula evaluation) and random policy generators.

#include <gmpxx.h>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cpad/group.hpp"
#include "cpad/policy.hpp"

namespace cpad::testing {

/// Prime order of G as a GMP integer, written out independently of the backend.
inline const mpz_class& group_order() {
  static const mpz_class r("73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001", 16);
  return r;
}

inline mpz_class to_mpz(const Scalar& s) {
  const auto enc = s.encode();
  mpz_class out;
  mpz_import(out.get_mpz_t(), enc.size(), 1, 1, 1, 0, enc.data());
  return out;
}

inline mpz_class to_mpz(ByteView big_endian) {
  mpz_class out;
  if (!big_endian.empty()) mpz_import(out.get_mpz_t(), big_endian.size(), 1, 1, 1, 0, big_endian.data());
  return out;
}

inline Scalar from_mpz(mpz_class v) {
  v %= group_order();
  if (v < 0) v += group_order();
  Scalar::Encoding enc{};
  std::size_t count = 0;
  std::vector<std::uint8_t> tmp(32);
  mpz_export(tmp.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  std::copy(tmp.begin(), tmp.begin() + count, enc.end() - count);
  return Scalar::decode(enc);
}

/// Truth value of a formula tree, evaluated directly on the tree.
inline bool brute_force_eval(const PolicyNode& n, const AttributeSet& attrs) {
  switch (n.kind) {
    case PolicyNode::Kind::Leaf:
      return attrs.count(n.attr) != 0;
    case PolicyNode::Kind::And:
      for (const auto& c : n.children) {
        if (!brute_force_eval(c, attrs)) return false;
      }
      return true;
    case PolicyNode::Kind::Or:
      for (const auto& c : n.children) {
        if (brute_force_eval(c, attrs)) return true;
      }
      return false;
  }
  return false;
}

/// Random AND/OR tree with exactly `leaves` leaves drawn (with repetition)
/// from `names`. Gates get 2 or 3 children.
inline PolicyNode random_tree(std::mt19937_64& gen, std::size_t leaves, const std::vector<std::string>& names) {
  if (leaves == 1) {
    return PolicyNode::leaf(names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(gen)]);
  }
  std::size_t arity = leaves >= 3 && gen() % 3 == 0 ? 3 : 2;
  std::vector<std::size_t> sizes(arity, 1);
  for (std::size_t extra = leaves - arity; extra > 0; --extra) sizes[gen() % arity]++;
  std::vector<PolicyNode> kids;
  for (std::size_t s : sizes) kids.push_back(random_tree(gen, s, names));
  return gen() % 2 ? PolicyNode::all_of(std::move(kids)) : PolicyNode::any_of(std::move(kids));
}

/// dummy AND <random subformula>, the shape encapsulate accepts.
inline AccessPolicy random_cpad_policy(std::mt19937_64& gen, std::size_t leaves,
                                       const std::vector<std::string>& names) {
  std::vector<PolicyNode> kids;
  kids.push_back(PolicyNode::leaf(std::string(kDummyAttribute)));
  kids.push_back(random_tree(gen, leaves, names));
  return AccessPolicy{PolicyNode::all_of(std::move(kids))};
}

/// A minimal satisfying set found greedily: start from all leaves, drop
/// attributes while the formula stays true.
inline AttributeSet minimal_satisfying_set(const AccessPolicy& p, std::mt19937_64& gen) {
  const auto leaves = p.leaves();
  AttributeSet all(leaves.begin(), leaves.end());
  std::vector<std::string> order(all.begin(), all.end());
  std::shuffle(order.begin(), order.end(), gen);
  for (const auto& a : order) {
    AttributeSet trial = all;
    trial.erase(a);
    if (brute_force_eval(p.root, trial)) all = std::move(trial);
  }
  return all;
}

inline std::vector<std::string> attribute_names(std::size_t n, const std::string& prefix = "A") {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace cpad::testing
