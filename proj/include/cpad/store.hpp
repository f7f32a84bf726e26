#pragma once

// Fog and cloud record stores. Each store keeps one TLV file per fname,
// `<dir>/<hex(fname)>.tlv`, replaced atomically on update, and holds an
// advisory lock on the directory for its lifetime. A store constructed
// without a directory lives in memory only.

#include <filesystem>
#include <map>
#include <optional>

#include "cpad/abe.hpp"
#include "cpad/deletion.hpp"
#include "cpad/payload.hpp"
#include "cpad/tlv.hpp"

namespace cpad {

struct FogRecord {
  Scalar fname;
  GroupElem spk;
  KeyCiphertext ct;

  friend bool operator==(const FogRecord&, const FogRecord&) = default;
};

struct CloudRecord {
  Scalar fname;
  GroupElem spk;
  SealedPayload payload;

  friend bool operator==(const CloudRecord&, const CloudRecord&) = default;
};

Bytes encode_record(const FogRecord& rec);
Bytes encode_record(const CloudRecord& rec);
FogRecord decode_fog_record(ByteView stream);
CloudRecord decode_cloud_record(ByteView stream);

namespace detail {

/// fname-keyed map of record streams mirrored to a directory.
class RecordFiles {
 public:
  RecordFiles(tlv::Type record_type, std::optional<std::filesystem::path> dir);
  ~RecordFiles();
  RecordFiles(const RecordFiles&) = delete;
  RecordFiles& operator=(const RecordFiles&) = delete;
  RecordFiles(RecordFiles&& other) noexcept;
  RecordFiles& operator=(RecordFiles&& other) noexcept;

  void put(const Scalar::Encoding& key, Bytes stream);
  const Bytes* find(const Scalar::Encoding& key) const;
  bool erase(const Scalar::Encoding& key);
  const std::map<Scalar::Encoding, Bytes>& entries() const { return entries_; }
  const std::optional<std::filesystem::path>& dir() const { return dir_; }

  /// Record layout of every entry, and agreement of memory with disk.
  void check(std::initializer_list<tlv::Type> layout) const;

 private:
  std::filesystem::path file_for(const Scalar::Encoding& key) const;
  void release() noexcept;

  tlv::Type type_;
  std::optional<std::filesystem::path> dir_;
  int lock_fd_ = -1;
  std::map<Scalar::Encoding, Bytes> entries_;
};

}  // namespace detail

/// Fog side: fname -> (spk, KeyCiphertext). Never holds a sealed payload.
class FogStore {
 public:
  FogStore() : files_(tlv::Type::FogRecord, std::nullopt) {}
  /// Loads every record in dir (created if missing). Throws Error(Io) when
  /// another store holds the directory lock, Error(InvalidEncoding) on a
  /// corrupt file.
  explicit FogStore(const std::filesystem::path& dir);

  void put(const FogRecord& rec);
  std::optional<FogRecord> get(const Scalar& fname) const;
  bool contains(const Scalar& fname) const;
  bool erase(const Scalar& fname);
  std::size_t size() const { return files_.entries().size(); }
  const std::map<Scalar::Encoding, Bytes>& raw() const { return files_.entries(); }

  /// Throws Error(InvalidEncoding) if any entry is not exactly
  /// (Scalar, VerifyKey, KeyCiphertext) or disk and memory disagree.
  void check_hygiene() const;

 private:
  detail::RecordFiles files_;
};

/// Cloud side: fname -> (spk, SealedPayload). Never holds a key ciphertext.
class CloudStore {
 public:
  CloudStore() : files_(tlv::Type::CloudRecord, std::nullopt) {}
  explicit CloudStore(const std::filesystem::path& dir);

  void put(const CloudRecord& rec);
  std::optional<CloudRecord> get(const Scalar& fname) const;
  bool contains(const Scalar& fname) const;
  bool erase(const Scalar& fname);
  std::size_t size() const { return files_.entries().size(); }
  const std::map<Scalar::Encoding, Bytes>& raw() const { return files_.entries(); }

  /// Throws Error(InvalidEncoding) if any entry is not exactly
  /// (Scalar, VerifyKey, SealedPayload) or disk and memory disagree.
  void check_hygiene() const;

 private:
  detail::RecordFiles files_;
};

enum class FogBehavior { Honest, SkipUpdate, InconsistentGamma };

/// Re-encryption as performed by a fog node. Honest is exactly reencrypt();
/// SkipUpdate answers without touching the ciphertext; InconsistentGamma
/// updates with theta^v + 1 instead of theta^v. All three check the request first.
ReencryptResult fog_reencrypt(const FogRecord& rec, const DeletionRequest& req, const SigningKeypair& fsk,
                              RandomSource& rng, FogBehavior behavior = FogBehavior::Honest);

/// Cloud-side deletion: validates req against the stored spk, then removes the
/// payload. Throws Error(UnknownFname) or Error(BadSignature); on either the
/// payload is retained.
void cloud_delete(CloudStore& store, const Scalar& fname, const DeletionRequest& req);

}  // namespace cpad
