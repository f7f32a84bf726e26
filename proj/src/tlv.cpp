#include "cpad/tlv.hpp"

#include <algorithm>
#include <limits>

#include "cpad/error.hpp"

namespace cpad::tlv {

std::string_view type_name(Type t) noexcept {
  switch (t) {
    case Type::Scalar: return "Scalar";
    case Type::GroupElem: return "GroupElem";
    case Type::TargetElem: return "TargetElem";
    case Type::Bytes: return "Bytes";
    case Type::Text: return "Text";
    case Type::U32: return "U32";
    case Type::LsssProgram: return "LsssProgram";
    case Type::KeyCiphertext: return "KeyCiphertext";
    case Type::SealedPayload: return "SealedPayload";
    case Type::PublicParams: return "PublicParams";
    case Type::MasterSecretKey: return "MasterSecretKey";
    case Type::UserSecretKey: return "UserSecretKey";
    case Type::SigningKey: return "SigningKey";
    case Type::VerifyKey: return "VerifyKey";
    case Type::DeletionRequest: return "DeletionRequest";
    case Type::DeletionResponse: return "DeletionResponse";
    case Type::ObjectDeletionState: return "ObjectDeletionState";
    case Type::DeletionTag: return "DeletionTag";
    case Type::FogRecord: return "FogRecord";
    case Type::CloudRecord: return "CloudRecord";
    case Type::ObjectRecord: return "ObjectRecord";
  }
  return "?";
}

Writer& Writer::record(Type type, ByteView payload) {
  if (payload.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::InvalidEncoding, "record payload exceeds 4 GiB");
  }
  const auto len = static_cast<std::uint32_t>(payload.size());
  buf_.push_back(static_cast<std::uint8_t>(type));
  for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(static_cast<std::uint8_t>(len >> shift));
  buf_.insert(buf_.end(), payload.begin(), payload.end());
  return *this;
}

Writer& Writer::scalar(const cpad::Scalar& s) { return record(Type::Scalar, s.encode()); }
Writer& Writer::group(const cpad::GroupElem& g) { return record(Type::GroupElem, g.encode()); }
Writer& Writer::target(const cpad::TargetElem& t) { return record(Type::TargetElem, t.encode()); }
Writer& Writer::bytes(ByteView b) { return record(Type::Bytes, b); }
Writer& Writer::text(std::string_view s) { return record(Type::Text, as_bytes(s)); }

Writer& Writer::u32(std::uint32_t v) {
  const std::array<std::uint8_t, 4> be{static_cast<std::uint8_t>(v >> 24), static_cast<std::uint8_t>(v >> 16),
                                       static_cast<std::uint8_t>(v >> 8), static_cast<std::uint8_t>(v)};
  return record(Type::U32, be);
}

Writer& Writer::nested(Type type, const Writer& inner) { return record(type, inner.records()); }

cpad::Bytes Writer::stream() const {
  cpad::Bytes out(kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.insert(out.end(), buf_.begin(), buf_.end());
  return out;
}

Reader Reader::from_stream(ByteView stream) {
  if (stream.size() < kMagic.size() + 1 || !std::equal(kMagic.begin(), kMagic.end(), stream.begin())) {
    throw Error(ErrorCode::InvalidEncoding, "missing CPAD magic");
  }
  if (stream[kMagic.size()] != kVersion) {
    throw Error(ErrorCode::InvalidEncoding, "unsupported wire format version");
  }
  return Reader(stream.subspan(kMagic.size() + 1));
}

Type Reader::peek() const {
  if (done()) throw Error(ErrorCode::InvalidEncoding, "unexpected end of record stream");
  return static_cast<Type>(data_[pos_]);
}

ByteView Reader::record(Type expected) {
  if (data_.size() - pos_ < 5) throw Error(ErrorCode::InvalidEncoding, "truncated record header");
  const auto type = static_cast<Type>(data_[pos_]);
  if (type != expected) {
    throw Error(ErrorCode::InvalidEncoding, "expected " + std::string(type_name(expected)) +
                                                " record, found type 0x" + to_hex(data_.subspan(pos_, 1)));
  }
  std::uint32_t len = 0;
  for (int i = 1; i <= 4; ++i) len = len << 8 | data_[pos_ + i];
  if (data_.size() - pos_ - 5 < len) throw Error(ErrorCode::InvalidEncoding, "truncated record payload");
  ByteView payload = data_.subspan(pos_ + 5, len);
  pos_ += 5 + len;
  return payload;
}

cpad::Scalar Reader::scalar() { return cpad::Scalar::decode(record(Type::Scalar)); }
cpad::GroupElem Reader::group() { return cpad::GroupElem::decode(record(Type::GroupElem)); }
cpad::TargetElem Reader::target() { return cpad::TargetElem::decode(record(Type::TargetElem)); }

cpad::Bytes Reader::bytes() {
  ByteView b = record(Type::Bytes);
  return {b.begin(), b.end()};
}

std::string Reader::text() {
  ByteView b = record(Type::Text);
  return {b.begin(), b.end()};
}

std::uint32_t Reader::u32() {
  ByteView b = record(Type::U32);
  if (b.size() != 4) throw Error(ErrorCode::InvalidEncoding, "U32 record must be 4 bytes");
  return std::uint32_t{b[0]} << 24 | std::uint32_t{b[1]} << 16 | std::uint32_t{b[2]} << 8 | b[3];
}

Reader Reader::nested(Type expected) { return Reader(record(expected)); }

void Reader::expect_end() const {
  if (!done()) throw Error(ErrorCode::InvalidEncoding, "trailing bytes after last record");
}

cpad::Bytes scalar_record(const cpad::Scalar& s) {
  Writer w;
  w.scalar(s);
  return w.records();
}

}  // namespace cpad::tlv
