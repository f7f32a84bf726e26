#pragma once

// Data encapsulation: AES-128-GCM under a key derived from the encapsulated
// G_T element, plus the deletion tag tau = h(fname || k).

#include <array>

#include "cpad/bytes.hpp"
#include "cpad/group.hpp"

namespace cpad {

using SymmetricKey = std::array<std::uint8_t, 16>;

/// HKDF-SHA256 over the canonical encoding of k with a fixed label.
SymmetricKey derive_key(const TargetElem& k);

struct SealedPayload {
  Scalar fname;
  Bytes nonce;       // 12 bytes
  Bytes ciphertext;  // AES-GCM output followed by the 16-byte tag

  friend bool operator==(const SealedPayload&, const SealedPayload&) = default;
};

/// fname is bound as associated data.
SealedPayload seal(ByteView data, const TargetElem& k, const Scalar& fname, RandomSource& rng);

/// Throws Error(AuthenticationFailure) on a wrong key, wrong fname, or any tampering.
Bytes unseal(const SealedPayload& p, const TargetElem& k, const Scalar& fname);

struct DeletionTag {
  Scalar tau;

  friend bool operator==(const DeletionTag&, const DeletionTag&) = default;
};

/// tau = hash_to_scalar(TLV(fname) || encode(k)).
DeletionTag make_tag(const Scalar& fname, const TargetElem& k);

/// Constant-time comparison against a recomputed tag.
bool check_tag(const DeletionTag& tag, const Scalar& fname, const TargetElem& k);

}  // namespace cpad
