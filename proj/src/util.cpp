#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include "cpad/bytes.hpp"
#include "cpad/error.hpp"
#include "cpad/random.hpp"

namespace cpad {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidEncoding: return "invalid-encoding";
    case ErrorCode::SyntaxError: return "syntax-error";
    case ErrorCode::EmptyPolicy: return "empty-policy";
    case ErrorCode::NonMonotonePolicy: return "non-monotone-policy";
    case ErrorCode::NotAuthorized: return "not-authorized";
    case ErrorCode::MissingDummyAttribute: return "missing-dummy-attribute";
    case ErrorCode::DuplicateAttribute: return "duplicate-attribute";
    case ErrorCode::UnknownAttribute: return "unknown-attribute";
    case ErrorCode::PolicyMissingDummy: return "policy-missing-dummy";
    case ErrorCode::DummyNotUnique: return "dummy-not-unique";
    case ErrorCode::BadSignature: return "bad-signature";
    case ErrorCode::BadFogSignature: return "bad-fog-signature";
    case ErrorCode::UnknownFname: return "unknown-fname";
    case ErrorCode::NoPendingRequest: return "no-pending-request";
    case ErrorCode::PendingRequestExists: return "pending-request-exists";
    case ErrorCode::AuthenticationFailure: return "authentication-failure";
    case ErrorCode::NotFound: return "not-found";
    case ErrorCode::ScenarioError: return "scenario-error";
    case ErrorCode::Io: return "io-error";
  }
  return "unknown-error";
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw Error(ErrorCode::InvalidEncoding, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::InvalidEncoding, "non-hex character");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::array<std::uint8_t, 32> sha256(ByteView data) {
  std::array<std::uint8_t, 32> out;
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP_Digest(SHA-256) failed");
  }
  return out;
}

bool ct_equal(ByteView a, ByteView b) noexcept {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

void SystemRandom::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
}

SeededRandom::SeededRandom(std::uint64_t seed) {
  std::array<std::uint8_t, 26> material{};
  constexpr std::string_view label = "cpad-seeded-rng";
  std::copy(label.begin(), label.end(), material.begin());
  for (int i = 0; i < 8; ++i) material[18 + i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  key_ = sha256(material);
}

void SeededRandom::refill() {
  std::array<std::uint8_t, 40> input;
  std::copy(key_.begin(), key_.end(), input.begin());
  for (int i = 0; i < 8; ++i) input[32 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  ++counter_;
  block_ = sha256(input);
  used_ = 0;
}

void SeededRandom::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == block_.size()) refill();
    b = block_[used_++];
  }
}

}  // namespace cpad
