#pragma once

// TLV schemas for every persisted or transmitted domain value.

#include "cpad/abe.hpp"
#include "cpad/deletion.hpp"
#include "cpad/payload.hpp"
#include "cpad/policy.hpp"
#include "cpad/tlv.hpp"

namespace cpad::codec {

void put(tlv::Writer& w, const LsssProgram& v);
void put(tlv::Writer& w, const KeyCiphertext& v);
void put(tlv::Writer& w, const SealedPayload& v);
void put(tlv::Writer& w, const PublicParams& v);
void put(tlv::Writer& w, const MasterSecretKey& v);
void put(tlv::Writer& w, const UserSecretKey& v);
void put(tlv::Writer& w, const SigningKeypair& v);
void put(tlv::Writer& w, const DeletionRequest& v);
void put(tlv::Writer& w, const DeletionResponse& v);
void put(tlv::Writer& w, const ObjectDeletionState& v);
void put(tlv::Writer& w, const DeletionTag& v);

/// Public half of a signing key, as a VerifyKey record.
void put_verify_key(tlv::Writer& w, const GroupElem& v);
GroupElem get_verify_key(tlv::Reader& r);

template <class T>
T get(tlv::Reader& r);

template <> LsssProgram get<LsssProgram>(tlv::Reader& r);
template <> KeyCiphertext get<KeyCiphertext>(tlv::Reader& r);
template <> SealedPayload get<SealedPayload>(tlv::Reader& r);
template <> PublicParams get<PublicParams>(tlv::Reader& r);
template <> MasterSecretKey get<MasterSecretKey>(tlv::Reader& r);
template <> UserSecretKey get<UserSecretKey>(tlv::Reader& r);
template <> SigningKeypair get<SigningKeypair>(tlv::Reader& r);
template <> DeletionRequest get<DeletionRequest>(tlv::Reader& r);
template <> DeletionResponse get<DeletionResponse>(tlv::Reader& r);
template <> ObjectDeletionState get<ObjectDeletionState>(tlv::Reader& r);
template <> DeletionTag get<DeletionTag>(tlv::Reader& r);

template <class T>
Bytes to_stream(const T& v) {
  tlv::Writer w;
  put(w, v);
  return w.stream();
}

template <class T>
T from_stream(ByteView bytes) {
  tlv::Reader r = tlv::Reader::from_stream(bytes);
  T v = get<T>(r);
  r.expect_end();
  return v;
}

}  // namespace cpad::codec
