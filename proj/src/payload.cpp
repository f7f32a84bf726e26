#include "cpad/payload.hpp"

#include <memory>
#include <stdexcept>

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/kdf.h>

#include "cpad/error.hpp"
#include "cpad/tlv.hpp"

namespace cpad {

namespace {

constexpr std::string_view kKdfLabel = "cpad/v1/aead-key";
constexpr std::size_t kNonceSize = 12;
constexpr std::size_t kTagSize = 16;

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;

void ossl_check(int rc, const char* what) {
  if (rc != 1) throw std::runtime_error(std::string("OpenSSL failure: ") + what);
}

}  // namespace

SymmetricKey derive_key(const TargetElem& k) {
  const auto ikm = k.encode();
  EVP_KDF* kdf = EVP_KDF_fetch(nullptr, "HKDF", nullptr);
  if (!kdf) throw std::runtime_error("HKDF unavailable");
  EVP_KDF_CTX* ctx = EVP_KDF_CTX_new(kdf);
  EVP_KDF_free(kdf);
  if (!ctx) throw std::runtime_error("EVP_KDF_CTX_new failed");

  char digest[] = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_KDF_PARAM_DIGEST, digest, 0),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_KEY, const_cast<std::uint8_t*>(ikm.data()), ikm.size()),
      OSSL_PARAM_construct_octet_string(OSSL_KDF_PARAM_INFO, const_cast<char*>(kKdfLabel.data()),
                                        kKdfLabel.size()),
      OSSL_PARAM_construct_end(),
  };
  SymmetricKey out;
  const int rc = EVP_KDF_derive(ctx, out.data(), out.size(), params);
  EVP_KDF_CTX_free(ctx);
  ossl_check(rc, "HKDF derive");
  return out;
}

SealedPayload seal(ByteView data, const TargetElem& k, const Scalar& fname, RandomSource& rng) {
  const SymmetricKey key = derive_key(k);
  const Bytes aad = tlv::scalar_record(fname);

  SealedPayload out;
  out.fname = fname;
  out.nonce.resize(kNonceSize);
  rng.fill(out.nonce);
  out.ciphertext.resize(data.size() + kTagSize);

  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  ossl_check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), out.nonce.data()),
             "GCM init");
  int len = 0;
  ossl_check(EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())), "GCM aad");
  if (!data.empty()) {
    ossl_check(EVP_EncryptUpdate(ctx.get(), out.ciphertext.data(), &len, data.data(),
                                 static_cast<int>(data.size())),
               "GCM update");
  }
  ossl_check(EVP_EncryptFinal_ex(ctx.get(), out.ciphertext.data() + data.size(), &len), "GCM final");
  ossl_check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagSize, out.ciphertext.data() + data.size()),
             "GCM tag");
  return out;
}

Bytes unseal(const SealedPayload& p, const TargetElem& k, const Scalar& fname) {
  if (p.nonce.size() != kNonceSize || p.ciphertext.size() < kTagSize) {
    throw Error(ErrorCode::AuthenticationFailure, "malformed sealed payload");
  }
  const SymmetricKey key = derive_key(k);
  const Bytes aad = tlv::scalar_record(fname);
  const std::size_t body = p.ciphertext.size() - kTagSize;
  Bytes plain(body);
  Bytes tag(p.ciphertext.end() - kTagSize, p.ciphertext.end());

  CipherCtx ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
  ossl_check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(), p.nonce.data()), "GCM init");
  int len = 0;
  ossl_check(EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())), "GCM aad");
  if (body) {
    ossl_check(EVP_DecryptUpdate(ctx.get(), plain.data(), &len, p.ciphertext.data(), static_cast<int>(body)),
               "GCM update");
  }
  ossl_check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagSize, tag.data()), "GCM set tag");
  if (EVP_DecryptFinal_ex(ctx.get(), plain.data() + body, &len) != 1) {
    throw Error(ErrorCode::AuthenticationFailure, "payload authentication failed");
  }
  return plain;
}

DeletionTag make_tag(const Scalar& fname, const TargetElem& k) {
  Bytes input = tlv::scalar_record(fname);
  const auto kb = k.encode();
  input.insert(input.end(), kb.begin(), kb.end());
  return DeletionTag{hash_to_scalar(input)};
}

bool check_tag(const DeletionTag& tag, const Scalar& fname, const TargetElem& k) {
  const auto expected = tag.tau.encode();
  const auto actual = make_tag(fname, k).tau.encode();
  return ct_equal(expected, actual);
}

}  // namespace cpad
