#include "cpad/abe.hpp"

#include <algorithm>
#include <set>

#include "cpad/error.hpp"

namespace cpad {

namespace {

void check_attribute_name(const std::string& name) {
  const AccessPolicy p = parse_policy(name);
  if (p.root.kind != PolicyNode::Kind::Leaf || p.root.attr != name) {
    throw SyntaxError(0, "'" + name + "' is not a valid attribute name");
  }
}

void check_dummy_placement(const AccessPolicy& policy) {
  const auto leaves = policy.leaves();
  const auto dummies = std::count(leaves.begin(), leaves.end(), kDummyAttribute);
  if (dummies == 0) throw Error(ErrorCode::PolicyMissingDummy, "policy does not mention dummy");
  if (dummies > 1) throw Error(ErrorCode::DummyNotUnique, "dummy occurs more than once");
  const auto& root = policy.root;
  const bool at_root = root.kind == PolicyNode::Kind::And &&
                       std::any_of(root.children.begin(), root.children.end(), [](const PolicyNode& c) {
                         return c.kind == PolicyNode::Kind::Leaf && c.attr == kDummyAttribute;
                       });
  if (!at_root) {
    throw Error(ErrorCode::PolicyMissingDummy, "dummy must be a direct input of a root-level AND");
  }
}

void check_known_attributes(const PublicParams& pp, const LsssProgram& prog) {
  for (const auto& a : prog.rho) {
    if (!pp.attr_bases.count(a)) throw Error(ErrorCode::UnknownAttribute, "'" + a + "' is not in the universe");
  }
}

Encapsulation encapsulate_program(const PublicParams& pp, const LsssProgram& prog, RandomSource& rng,
                                  Exec exec, EncapsulationOracle* oracle) {
  // Fresh uniform k = e(g, g)^z.
  const Scalar z = Scalar::random(rng);
  const Scalar s = Scalar::random(rng);
  ShareVector shares = make_shares(prog, s, rng);
  std::vector<Scalar> r(prog.rows());
  for (auto& ri : r) ri = Scalar::random(rng);

  std::vector<RowInput> inputs;
  inputs.reserve(prog.rows());
  for (std::size_t i = 0; i < prog.rows(); ++i) {
    inputs.push_back(RowInput{&pp.attr_bases.at(prog.rho[i]), shares.lambda[i], r[i]});
  }

  Encapsulation out;
  out.key = pair(pp.g, pp.g).pow(z);
  out.ct.rows = kernels::encrypt_rows(exec, pp.g, pp.g_a, inputs);
  out.ct.C_bar = out.key * pp.e_gg_alpha.pow(s);
  out.ct.C_prime = pp.g.pow(s);
  out.ct.prog = prog;

  if (oracle) {
    oracle->s = s;
    oracle->shares = std::move(shares);
    oracle->r = std::move(r);
  }
  return out;
}

}  // namespace

AttributeSet UserSecretKey::attributes() const {
  AttributeSet out;
  for (const auto& [name, _] : per_attr) out.insert(name);
  return out;
}

SetupResult setup(std::span<const std::string> universe, RandomSource& rng, SetupOracle* oracle) {
  std::set<std::string> seen;
  for (const auto& a : universe) {
    check_attribute_name(a);
    if (!seen.insert(a).second) throw Error(ErrorCode::DuplicateAttribute, "'" + a + "' listed twice");
  }
  if (!seen.count(std::string(kDummyAttribute))) {
    throw Error(ErrorCode::MissingDummyAttribute, "universe must contain dummy");
  }

  const Scalar alpha = Scalar::random_nonzero(rng);
  const Scalar a = Scalar::random_nonzero(rng);

  SetupResult out;
  auto& pp = out.pp;
  pp.g = GroupElem::generator();
  out.msk.g_alpha = pp.g.pow(alpha);
  pp.g_a = pp.g.pow(a);
  pp.universe.assign(universe.begin(), universe.end());
  for (const auto& name : universe) {
    pp.attr_bases.emplace(name, pp.g.pow(Scalar::random_nonzero(rng)));
  }
  pp.e_gg_alpha = pair(out.msk.g_alpha, pp.g);

  if (oracle) *oracle = SetupOracle{alpha, a};
  return out;
}

UserSecretKey keygen(const MasterSecretKey& msk, const PublicParams& pp, const AttributeSet& attrs,
                     RandomSource& rng) {
  if (!attrs.count(std::string(kDummyAttribute))) {
    throw Error(ErrorCode::MissingDummyAttribute, "every key must carry dummy");
  }
  for (const auto& x : attrs) {
    if (!pp.attr_bases.count(x)) throw Error(ErrorCode::UnknownAttribute, "'" + x + "' is not in the universe");
  }

  const Scalar t = Scalar::random_nonzero(rng);
  UserSecretKey sk;
  sk.K = msk.g_alpha * pp.g_a.pow(t);
  sk.L = pp.g.pow(t);
  for (const auto& x : attrs) sk.per_attr.emplace(x, pp.attr_bases.at(x).pow(t));
  return sk;
}

Encapsulation encapsulate(const PublicParams& pp, const AccessPolicy& policy, RandomSource& rng, Exec exec,
                          EncapsulationOracle* oracle) {
  check_dummy_placement(policy);
  LsssProgram prog = compile_lsss(policy);
  check_known_attributes(pp, prog);
  return encapsulate_program(pp, prog, rng, exec, oracle);
}

Encapsulation encapsulate(const PublicParams& pp, const LsssProgram& prog, RandomSource& rng, Exec exec,
                          EncapsulationOracle* oracle) {
  prog.validate();
  check_known_attributes(pp, prog);
  const auto dummies = std::count(prog.rho.begin(), prog.rho.end(), kDummyAttribute);
  if (dummies == 0) throw Error(ErrorCode::PolicyMissingDummy, "no row is labelled dummy");
  if (dummies > 1) throw Error(ErrorCode::DummyNotUnique, "more than one row is labelled dummy");
  AttributeSet others(prog.rho.begin(), prog.rho.end());
  others.erase(std::string(kDummyAttribute));
  if (try_find_reconstruction(prog, others)) {
    throw Error(ErrorCode::PolicyMissingDummy, "program is satisfiable without dummy");
  }
  return encapsulate_program(pp, prog, rng, exec, oracle);
}

TargetElem recover_key(const KeyCiphertext& ct, const GroupElem& K, const GroupElem& L,
                       std::span<const PairingTerm> terms, Exec exec) {
  const std::vector<TargetElem> factors = kernels::pairing_terms(exec, L, terms);
  TargetElem a = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) a = a * factors[i];
  // e(C', K) / A = e(g, g)^(alpha s)
  const TargetElem blinding = pair(ct.C_prime, K) / a;
  return ct.C_bar / blinding;
}

TargetElem decapsulate(const KeyCiphertext& ct, const UserSecretKey& sk, const PublicParams& /*pp*/,
                       Exec exec) {
  if (ct.rows.size() != ct.prog.rows()) {
    throw Error(ErrorCode::InvalidEncoding, "ciphertext row count does not match its program");
  }
  const ReconstructionPlan plan = find_reconstruction(ct.prog, sk.attributes());
  std::vector<PairingTerm> terms;
  terms.reserve(plan.rows.size());
  for (std::size_t j = 0; j < plan.rows.size(); ++j) {
    const std::size_t i = plan.rows[j];
    terms.push_back(PairingTerm{&ct.rows[i].C, &ct.rows[i].D, &sk.per_attr.at(ct.prog.rho[i]), plan.omega[j]});
  }
  return recover_key(ct, sk.K, sk.L, terms, exec);
}

}  // namespace cpad
