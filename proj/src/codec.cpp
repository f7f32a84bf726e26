#include "cpad/codec.hpp"

#include "cpad/error.hpp"

namespace cpad::codec {

using tlv::Reader;
using tlv::Type;
using tlv::Writer;

namespace {

void put_attr_map(Writer& w, const std::vector<std::pair<const std::string*, const GroupElem*>>& entries) {
  w.u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& [name, elem] : entries) w.text(*name).group(*elem);
}

// Element counts come from untrusted input; bound them by what the
// remaining bytes could possibly hold before reserving memory.
std::uint32_t bounded_count(Reader& r, std::size_t max) {
  const std::uint32_t n = r.u32();
  if (n > max) throw Error(ErrorCode::InvalidEncoding, "element count out of range");
  return n;
}

constexpr std::size_t kMaxEntries = 1u << 20;

}  // namespace

void put(Writer& w, const LsssProgram& v) {
  v.validate();
  Writer in;
  in.u32(static_cast<std::uint32_t>(v.rows())).u32(static_cast<std::uint32_t>(v.cols()));
  for (const auto& row : v.matrix) {
    for (const auto& x : row) in.scalar(x);
  }
  for (const auto& a : v.rho) in.text(a);
  w.nested(Type::LsssProgram, in);
}

template <>
LsssProgram get<LsssProgram>(Reader& r) {
  Reader in = r.nested(Type::LsssProgram);
  const std::uint32_t l = bounded_count(in, kMaxEntries);
  const std::uint32_t n = bounded_count(in, kMaxEntries);
  if (l == 0 || n == 0 || std::uint64_t{l} * n > kMaxEntries) {
    throw Error(ErrorCode::InvalidEncoding, "LSSS dimensions out of range");
  }
  LsssProgram p;
  p.matrix.assign(l, std::vector<Scalar>(n));
  for (auto& row : p.matrix) {
    for (auto& x : row) x = in.scalar();
  }
  p.rho.reserve(l);
  for (std::uint32_t i = 0; i < l; ++i) p.rho.push_back(in.text());
  in.expect_end();
  p.validate();
  return p;
}

void put(Writer& w, const KeyCiphertext& v) {
  Writer in;
  put(in, v.prog);
  in.target(v.C_bar).group(v.C_prime);
  for (const auto& row : v.rows) in.group(row.C).group(row.D);
  w.nested(Type::KeyCiphertext, in);
}

template <>
KeyCiphertext get<KeyCiphertext>(Reader& r) {
  Reader in = r.nested(Type::KeyCiphertext);
  KeyCiphertext ct;
  ct.prog = get<LsssProgram>(in);
  ct.C_bar = in.target();
  ct.C_prime = in.group();
  ct.rows.reserve(ct.prog.rows());
  for (std::size_t i = 0; i < ct.prog.rows(); ++i) {
    CipherRow row;
    row.C = in.group();
    row.D = in.group();
    ct.rows.push_back(std::move(row));
  }
  in.expect_end();
  return ct;
}

void put(Writer& w, const SealedPayload& v) {
  Writer in;
  in.scalar(v.fname).bytes(v.nonce).bytes(v.ciphertext);
  w.nested(Type::SealedPayload, in);
}

template <>
SealedPayload get<SealedPayload>(Reader& r) {
  Reader in = r.nested(Type::SealedPayload);
  SealedPayload p;
  p.fname = in.scalar();
  p.nonce = in.bytes();
  p.ciphertext = in.bytes();
  in.expect_end();
  return p;
}

void put(Writer& w, const PublicParams& v) {
  Writer in;
  in.group(v.g).target(v.e_gg_alpha).group(v.g_a);
  std::vector<std::pair<const std::string*, const GroupElem*>> entries;
  for (const auto& name : v.universe) entries.emplace_back(&name, &v.attr_bases.at(name));
  put_attr_map(in, entries);
  w.nested(Type::PublicParams, in);
}

template <>
PublicParams get<PublicParams>(Reader& r) {
  Reader in = r.nested(Type::PublicParams);
  PublicParams pp;
  pp.g = in.group();
  pp.e_gg_alpha = in.target();
  pp.g_a = in.group();
  const std::uint32_t n = bounded_count(in, kMaxEntries);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = in.text();
    GroupElem h = in.group();
    if (!pp.attr_bases.emplace(name, std::move(h)).second) {
      throw Error(ErrorCode::InvalidEncoding, "'" + name + "' listed twice in public parameters");
    }
    pp.universe.push_back(std::move(name));
  }
  in.expect_end();
  if (!pp.attr_bases.count(std::string(kDummyAttribute))) {
    throw Error(ErrorCode::InvalidEncoding, "public parameters lack dummy");
  }
  if (pp.e_gg_alpha.is_identity()) throw Error(ErrorCode::InvalidEncoding, "e(g,g)^alpha is the identity");
  return pp;
}

void put(Writer& w, const MasterSecretKey& v) {
  Writer in;
  in.group(v.g_alpha);
  w.nested(Type::MasterSecretKey, in);
}

template <>
MasterSecretKey get<MasterSecretKey>(Reader& r) {
  Reader in = r.nested(Type::MasterSecretKey);
  MasterSecretKey msk{in.group()};
  in.expect_end();
  return msk;
}

void put(Writer& w, const UserSecretKey& v) {
  Writer in;
  in.group(v.K).group(v.L);
  std::vector<std::pair<const std::string*, const GroupElem*>> entries;
  for (const auto& [name, elem] : v.per_attr) entries.emplace_back(&name, &elem);
  put_attr_map(in, entries);
  w.nested(Type::UserSecretKey, in);
}

template <>
UserSecretKey get<UserSecretKey>(Reader& r) {
  Reader in = r.nested(Type::UserSecretKey);
  UserSecretKey sk;
  sk.K = in.group();
  sk.L = in.group();
  const std::uint32_t n = bounded_count(in, kMaxEntries);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = in.text();
    GroupElem k = in.group();
    if (!sk.per_attr.emplace(std::move(name), std::move(k)).second) {
      throw Error(ErrorCode::InvalidEncoding, "attribute repeated in user key");
    }
  }
  in.expect_end();
  return sk;
}

void put(Writer& w, const SigningKeypair& v) {
  Writer in;
  in.scalar(v.sec).group(v.v);
  w.nested(Type::SigningKey, in);
}

template <>
SigningKeypair get<SigningKeypair>(Reader& r) {
  Reader in = r.nested(Type::SigningKey);
  SigningKeypair kp;
  kp.sec = in.scalar();
  kp.v = in.group();
  in.expect_end();
  // Consistency check is bookkeeping, not protocol work: keep it out of any counter scope.
  detail::SinkBinding quiet(nullptr);
  if (kp.sec.is_zero() || !(GroupElem::generator().pow(kp.sec) == kp.v)) {
    throw Error(ErrorCode::InvalidEncoding, "signing key halves do not match");
  }
  return kp;
}

void put_verify_key(Writer& w, const GroupElem& v) {
  Writer in;
  in.group(v);
  w.nested(Type::VerifyKey, in);
}

GroupElem get_verify_key(Reader& r) {
  Reader in = r.nested(Type::VerifyKey);
  GroupElem v = in.group();
  in.expect_end();
  if (!v.mirrored() || v.is_identity()) throw Error(ErrorCode::InvalidEncoding, "unusable verification key");
  return v;
}

void put(Writer& w, const DeletionRequest& v) {
  Writer in;
  in.text("delete").scalar(v.fname).text(v.attr).scalar(v.q).scalar(v.theta).group(v.signature);
  w.nested(Type::DeletionRequest, in);
}

template <>
DeletionRequest get<DeletionRequest>(Reader& r) {
  Reader in = r.nested(Type::DeletionRequest);
  if (in.text() != "delete") throw Error(ErrorCode::InvalidEncoding, "deletion request must start with 'delete'");
  DeletionRequest req;
  req.fname = in.scalar();
  req.attr = in.text();
  req.q = in.scalar();
  req.theta = in.scalar();
  req.signature = in.group();
  in.expect_end();
  return req;
}

void put(Writer& w, const DeletionResponse& v) {
  Writer in;
  in.scalar(v.eta).group(v.signature);
  w.nested(Type::DeletionResponse, in);
}

template <>
DeletionResponse get<DeletionResponse>(Reader& r) {
  Reader in = r.nested(Type::DeletionResponse);
  DeletionResponse resp;
  resp.eta = in.scalar();
  resp.signature = in.group();
  in.expect_end();
  return resp;
}

void put(Writer& w, const DeletionTag& v) {
  Writer in;
  in.scalar(v.tau);
  w.nested(Type::DeletionTag, in);
}

template <>
DeletionTag get<DeletionTag>(Reader& r) {
  Reader in = r.nested(Type::DeletionTag);
  DeletionTag t{in.scalar()};
  in.expect_end();
  return t;
}

void put(Writer& w, const ObjectDeletionState& v) {
  Writer in;
  in.scalar(v.u).scalar(v.q);
  put(in, v.tau);
  w.nested(Type::ObjectDeletionState, in);
}

template <>
ObjectDeletionState get<ObjectDeletionState>(Reader& r) {
  Reader in = r.nested(Type::ObjectDeletionState);
  ObjectDeletionState s;
  s.u = in.scalar();
  s.q = in.scalar();
  s.tau = get<DeletionTag>(in);
  in.expect_end();
  return s;
}

}  // namespace cpad::codec
