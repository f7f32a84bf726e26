#pragma once

// TLV wire format.
//
//   stream := "CPAD" 0x01 record*
//   record := type:u8 length:u32be payload[length]
//
// Composite records carry a nested record sequence (no header) as payload.
// The type table is frozen; see docs/wire-format.md.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "cpad/bytes.hpp"
#include "cpad/group.hpp"

namespace cpad::tlv {

inline constexpr std::array<std::uint8_t, 4> kMagic{'C', 'P', 'A', 'D'};
inline constexpr std::uint8_t kVersion = 0x01;

enum class Type : std::uint8_t {
  Scalar = 0x01,
  GroupElem = 0x02,
  TargetElem = 0x03,
  Bytes = 0x04,
  Text = 0x05,
  U32 = 0x06,

  LsssProgram = 0x10,
  KeyCiphertext = 0x11,
  SealedPayload = 0x12,
  PublicParams = 0x13,
  MasterSecretKey = 0x14,
  UserSecretKey = 0x15,
  SigningKey = 0x16,
  VerifyKey = 0x17,
  DeletionRequest = 0x18,
  DeletionResponse = 0x19,
  ObjectDeletionState = 0x1A,
  DeletionTag = 0x1B,

  FogRecord = 0x20,
  CloudRecord = 0x21,
  ObjectRecord = 0x22,
};

std::string_view type_name(Type t) noexcept;

class Writer {
 public:
  Writer& record(Type type, ByteView payload);
  Writer& scalar(const cpad::Scalar& s);
  Writer& group(const cpad::GroupElem& g);
  Writer& target(const cpad::TargetElem& t);
  Writer& bytes(ByteView b);
  Writer& text(std::string_view s);
  Writer& u32(std::uint32_t v);
  Writer& nested(Type type, const Writer& inner);

  /// Bare record sequence.
  const cpad::Bytes& records() const { return buf_; }
  /// Magic, version, then the records.
  cpad::Bytes stream() const;

 private:
  cpad::Bytes buf_;
};

/// Strict reader over a record sequence. Every accessor checks the type code
/// and, for fixed-size types, the length; violations throw Error(InvalidEncoding).
/// The viewed buffer must outlive the reader.
class Reader {
 public:
  explicit Reader(ByteView records) : data_(records) {}
  /// Checks and strips the stream header.
  static Reader from_stream(ByteView stream);

  bool done() const { return pos_ == data_.size(); }
  Type peek() const;

  ByteView record(Type expected);
  cpad::Scalar scalar();
  cpad::GroupElem group();
  cpad::TargetElem target();
  cpad::Bytes bytes();
  std::string text();
  std::uint32_t u32();
  Reader nested(Type expected);

  void expect_end() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

/// A single Scalar record, the byte form used for associated data and tags.
cpad::Bytes scalar_record(const cpad::Scalar& s);

}  // namespace cpad::tlv
