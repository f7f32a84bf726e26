#include "cpad/deletion.hpp"

#include "cpad/error.hpp"
#include "cpad/tlv.hpp"

namespace cpad {

SigningKeypair SigningKeypair::generate(RandomSource& rng) {
  SigningKeypair kp;
  kp.sec = Scalar::random_nonzero(rng);
  kp.v = GroupElem::generator().pow(kp.sec);
  return kp;
}

GroupElem sign(const SigningKeypair& key, ByteView message) { return hash_to_group(message).pow(key.sec); }

bool verify_sig(const GroupElem& public_key, ByteView message, const GroupElem& sig) {
  if (!public_key.mirrored() || public_key.is_identity() || sig.is_identity()) return false;
  return pair(sig, GroupElem::generator()) == pair(hash_to_group(message), public_key);
}

Bytes DeletionRequest::signed_body() const {
  tlv::Writer w;
  w.text("delete").scalar(fname).text(attr).scalar(q).scalar(theta);
  const auto digest = sha256(w.records());
  return {digest.begin(), digest.end()};
}

Bytes DeletionResponse::signed_body() const { return tlv::scalar_record(eta); }

std::pair<DeletionRequest, ObjectDeletionState> make_del_request(const Scalar& fname, const DeletionTag& tau,
                                                                 const SigningKeypair& ssk, RandomSource& rng) {
  ObjectDeletionState state;
  state.q = Scalar::random_nonzero(rng);
  state.u = Scalar::random_nonzero(rng);
  state.tau = tau;

  DeletionRequest req;
  req.fname = fname;
  req.q = state.q;
  req.theta = state.q.pow(state.u);
  req.signature = sign(ssk, req.signed_body());
  return {std::move(req), std::move(state)};
}

void check_del_request(const DeletionRequest& req, const GroupElem& spk) {
  if (req.attr != kDummyAttribute) {
    throw Error(ErrorCode::InvalidEncoding, "deletion requests must target the dummy attribute");
  }
  if (req.q.is_zero() || req.theta.is_zero()) {
    throw Error(ErrorCode::InvalidEncoding, "q and theta must be non-zero");
  }
  if (!verify_sig(spk, req.signed_body(), req.signature)) {
    throw Error(ErrorCode::BadSignature, "deletion request signature does not verify");
  }
}

KeyCiphertext apply_dummy_update(const KeyCiphertext& ct, const Scalar& gamma) {
  const Scalar inv = gamma.inverse();
  KeyCiphertext out = ct;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    if (out.prog.rho.at(i) == kDummyAttribute) out.rows[i].D = out.rows[i].D.pow(inv);
  }
  return out;
}

DeletionResponse make_response(const Scalar& eta, const SigningKeypair& fsk) {
  DeletionResponse resp;
  resp.eta = eta;
  resp.signature = sign(fsk, resp.signed_body());
  return resp;
}

ReencryptResult reencrypt(const KeyCiphertext& ct, const DeletionRequest& req, const SigningKeypair& fsk,
                          const GroupElem& spk, RandomSource& rng) {
  check_del_request(req, spk);
  const Scalar v = Scalar::random_nonzero(rng);
  const Scalar eta = req.q.pow(v);
  const Scalar gamma = req.theta.pow(v);
  ReencryptResult out;
  out.ct = apply_dummy_update(ct, gamma);
  out.response = make_response(eta, fsk);
  return out;
}

bool verify_deletion_proof(const Scalar& eta, const KeyCiphertext& ct_updated, const UserSecretKey& sk,
                           const ObjectDeletionState& state, const Scalar& fname, Exec exec) {
  if (ct_updated.rows.size() != ct_updated.prog.rows()) {
    throw Error(ErrorCode::InvalidEncoding, "ciphertext row count does not match its program");
  }
  const auto dummy_key = sk.per_attr.find(std::string(kDummyAttribute));
  if (dummy_key == sk.per_attr.end()) {
    throw Error(ErrorCode::MissingDummyAttribute, "verifying key has no dummy component");
  }
  const Scalar gamma = eta.pow(state.u);
  if (gamma.is_zero()) return false;
  const GroupElem adjusted = dummy_key->second.pow(gamma);

  const ReconstructionPlan plan = find_reconstruction(ct_updated.prog, sk.attributes());
  std::vector<PairingTerm> terms;
  terms.reserve(plan.rows.size());
  for (std::size_t j = 0; j < plan.rows.size(); ++j) {
    const std::size_t i = plan.rows[j];
    const std::string& attr = ct_updated.prog.rho[i];
    const GroupElem* key_elem = attr == kDummyAttribute ? &adjusted : &sk.per_attr.at(attr);
    terms.push_back(PairingTerm{&ct_updated.rows[i].C, &ct_updated.rows[i].D, key_elem, plan.omega[j]});
  }
  const TargetElem k_prime = recover_key(ct_updated, sk.K, sk.L, terms, exec);
  return check_tag(state.tau, fname, k_prime);
}

bool verify_deletion(const DeletionResponse& resp, const KeyCiphertext& ct_updated, const UserSecretKey& sk,
                     const ObjectDeletionState& state, const PublicParams& /*pp*/, const GroupElem& fpk,
                     const Scalar& fname, Exec exec) {
  if (!verify_sig(fpk, resp.signed_body(), resp.signature)) {
    throw Error(ErrorCode::BadFogSignature, "deletion response signature does not verify");
  }
  if (resp.eta.is_zero()) return false;
  return verify_deletion_proof(resp.eta, ct_updated, sk, state, fname, exec);
}

DeletionRequest PendingDeletions::begin(const Scalar& fname, const DeletionTag& tau, const SigningKeypair& ssk,
                                        RandomSource& rng) {
  const auto key = fname.encode();
  if (states_.count(key)) {
    throw Error(ErrorCode::PendingRequestExists, "a deletion for this fname is already outstanding");
  }
  auto [req, state] = make_del_request(fname, tau, ssk, rng);
  states_.emplace(key, std::move(state));
  return req;
}

const ObjectDeletionState& PendingDeletions::get(const Scalar& fname) const {
  const auto it = states_.find(fname.encode());
  if (it == states_.end()) throw Error(ErrorCode::NoPendingRequest, "no deletion outstanding for this fname");
  return it->second;
}

ObjectDeletionState PendingDeletions::resolve(const Scalar& fname) {
  const auto it = states_.find(fname.encode());
  if (it == states_.end()) throw Error(ErrorCode::NoPendingRequest, "no deletion outstanding for this fname");
  ObjectDeletionState out = std::move(it->second);
  states_.erase(it);
  return out;
}

bool PendingDeletions::pending(const Scalar& fname) const { return states_.count(fname.encode()) != 0; }

void PendingDeletions::restore(const Scalar& fname, ObjectDeletionState state) {
  states_.insert_or_assign(fname.encode(), std::move(state));
}

}  // namespace cpad
