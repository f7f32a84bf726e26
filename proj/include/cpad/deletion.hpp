#pragma once

// Assured deletion handshake between a smart object and the fog node that
// stores its key ciphertext, and the BLS-style short signatures both use.
//
//   object:  q, u <- Z_p*,  theta = q^u               -> DR, signed
//   fog:     v <- Z_p*,  eta = q^v,  gamma = theta^v,  D_dummy <- D_dummy^(1/gamma)
//                                                     -> (eta, signed)
//   object:  gamma' = eta^u = gamma,  K'_dummy = K_dummy^gamma'
//            recompute k' from the updated ciphertext, accept iff h(fname || k') = tau

#include <map>
#include <string>
#include <utility>

#include "cpad/abe.hpp"
#include "cpad/payload.hpp"

namespace cpad {

struct SigningKeypair {
  Scalar sec;   // non-zero
  GroupElem v;  // g^sec

  static SigningKeypair generate(RandomSource& rng);

  friend bool operator==(const SigningKeypair&, const SigningKeypair&) = default;
};

/// hash_to_group(m)^sec.
GroupElem sign(const SigningKeypair& key, ByteView message);

/// e(sig, g) == e(hash_to_group(m), v). A non-mirrored public key is rejected.
bool verify_sig(const GroupElem& public_key, ByteView message, const GroupElem& sig);

struct DeletionRequest {
  Scalar fname;
  std::string attr{kDummyAttribute};
  Scalar q;
  Scalar theta;
  GroupElem signature;

  /// TLV records ("delete", fname, attr, q, theta); the signature covers
  /// their SHA-256 digest.
  Bytes signed_body() const;

  friend bool operator==(const DeletionRequest&, const DeletionRequest&) = default;
};

struct ObjectDeletionState {
  Scalar u;
  Scalar q;
  DeletionTag tau;

  friend bool operator==(const ObjectDeletionState&, const ObjectDeletionState&) = default;
};

struct DeletionResponse {
  Scalar eta;
  GroupElem signature;  // over TLV(eta)

  Bytes signed_body() const;

  friend bool operator==(const DeletionResponse&, const DeletionResponse&) = default;
};

/// Fresh non-zero q and u; theta = q^u.
std::pair<DeletionRequest, ObjectDeletionState> make_del_request(const Scalar& fname, const DeletionTag& tau,
                                                                 const SigningKeypair& ssk, RandomSource& rng);

/// Checks shape and signature of a request against the object's key.
/// Throws Error(BadSignature) or Error(InvalidEncoding).
void check_del_request(const DeletionRequest& req, const GroupElem& spk);

/// Replaces D_i by D_i^(1/gamma) on every row labelled dummy.
KeyCiphertext apply_dummy_update(const KeyCiphertext& ct, const Scalar& gamma);

DeletionResponse make_response(const Scalar& eta, const SigningKeypair& fsk);

struct ReencryptResult {
  KeyCiphertext ct;
  DeletionResponse response;
};

/// Fog-side re-encryption. A request that fails check_del_request leaves
/// the caller's ciphertext untouched.
ReencryptResult reencrypt(const KeyCiphertext& ct, const DeletionRequest& req, const SigningKeypair& fsk,
                          const GroupElem& spk, RandomSource& rng);

/// Tag check on a re-encrypted ciphertext using the adjusted dummy key.
/// Signature checking is left to verify_deletion.
bool verify_deletion_proof(const Scalar& eta, const KeyCiphertext& ct_updated, const UserSecretKey& sk,
                           const ObjectDeletionState& state, const Scalar& fname, Exec exec = Exec::Parallel);

/// Full object-side verification. Throws Error(BadFogSignature) when the
/// response signature does not verify under fpk, and Error(NotAuthorized)
/// when the object's key does not satisfy the ciphertext policy.
bool verify_deletion(const DeletionResponse& resp, const KeyCiphertext& ct_updated, const UserSecretKey& sk,
                     const ObjectDeletionState& state, const PublicParams& pp, const GroupElem& fpk,
                     const Scalar& fname, Exec exec = Exec::Parallel);

/// Object-side table of outstanding requests: at most one per fname.
class PendingDeletions {
 public:
  /// Throws Error(PendingRequestExists) while a request for fname is unresolved.
  DeletionRequest begin(const Scalar& fname, const DeletionTag& tau, const SigningKeypair& ssk,
                        RandomSource& rng);
  /// Throws Error(NoPendingRequest).
  const ObjectDeletionState& get(const Scalar& fname) const;
  /// Removes and returns the state. Throws Error(NoPendingRequest).
  ObjectDeletionState resolve(const Scalar& fname);
  bool pending(const Scalar& fname) const;

  void restore(const Scalar& fname, ObjectDeletionState state);
  const std::map<Scalar::Encoding, ObjectDeletionState>& entries() const { return states_; }

 private:
  std::map<Scalar::Encoding, ObjectDeletionState> states_;
};

}  // namespace cpad
