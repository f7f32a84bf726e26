#pragma once

// Ciphertext-policy ABE over an LSSS access structure (Waters-style), used as
// the key-encapsulation half of the hybrid scheme: a fresh G_T element k is
// encapsulated under the policy, and the data key is derived from k.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "cpad/group.hpp"
#include "cpad/kernels.hpp"
#include "cpad/policy.hpp"

namespace cpad {

struct PublicParams {
  GroupElem g;
  TargetElem e_gg_alpha;                       // e(g, g)^alpha
  GroupElem g_a;                               // g^a
  std::map<std::string, GroupElem> attr_bases; // h_x for every x in the universe
  std::vector<std::string> universe;           // setup order, includes "dummy"

  friend bool operator==(const PublicParams&, const PublicParams&) = default;
};

struct MasterSecretKey {
  GroupElem g_alpha;

  friend bool operator==(const MasterSecretKey&, const MasterSecretKey&) = default;
};

/// Secret exponents behind a setup, handed out only when a caller asks for
/// them (tests). Never serialized.
struct SetupOracle {
  Scalar alpha;
  Scalar a;
};

struct SetupResult {
  PublicParams pp;
  MasterSecretKey msk;
};

/// Errors: MissingDummyAttribute, DuplicateAttribute, SyntaxError for
/// attribute names outside the policy grammar.
SetupResult setup(std::span<const std::string> universe, RandomSource& rng,
                  SetupOracle* oracle = nullptr);

struct UserSecretKey {
  GroupElem K;                               // g^alpha g^(a t)
  GroupElem L;                               // g^t
  std::map<std::string, GroupElem> per_attr; // K_x = h_x^t

  AttributeSet attributes() const;

  friend bool operator==(const UserSecretKey&, const UserSecretKey&) = default;
};

/// Errors: UnknownAttribute, MissingDummyAttribute.
UserSecretKey keygen(const MasterSecretKey& msk, const PublicParams& pp, const AttributeSet& attrs,
                     RandomSource& rng);

struct KeyCiphertext {
  TargetElem C_bar;   // k e(g,g)^(alpha s)
  GroupElem C_prime;  // g^s
  std::vector<CipherRow> rows;
  LsssProgram prog;

  friend bool operator==(const KeyCiphertext&, const KeyCiphertext&) = default;
};

/// Encryption randomness, exposed to tests checking algebraic invariants.
struct EncapsulationOracle {
  Scalar s;
  ShareVector shares;
  std::vector<Scalar> r;
};

struct Encapsulation {
  TargetElem key;
  KeyCiphertext ct;
};

/// The policy root must be an AND with the dummy attribute as a direct input,
/// and dummy must occur exactly once. Errors: PolicyMissingDummy,
/// DummyNotUnique, UnknownAttribute.
Encapsulation encapsulate(const PublicParams& pp, const AccessPolicy& policy, RandomSource& rng,
                          Exec exec = Exec::Parallel, EncapsulationOracle* oracle = nullptr);

/// Encapsulates under a preloaded program. Requires exactly one dummy row
/// and that no set of attributes without dummy is authorized.
Encapsulation encapsulate(const PublicParams& pp, const LsssProgram& prog, RandomSource& rng,
                          Exec exec = Exec::Parallel, EncapsulationOracle* oracle = nullptr);

/// Recovers k when the key's attributes satisfy the policy; otherwise throws
/// Error(NotAuthorized). A ciphertext mutated by deletion yields a wrong k
/// without any error.
TargetElem decapsulate(const KeyCiphertext& ct, const UserSecretKey& sk, const PublicParams& pp,
                       Exec exec = Exec::Parallel);

/// Shared tail of decryption and deletion verification:
/// k = C_bar * prod(terms) / e(C', K).
TargetElem recover_key(const KeyCiphertext& ct, const GroupElem& K, const GroupElem& L,
                       std::span<const PairingTerm> terms, Exec exec);

}  // namespace cpad
