#include "cpad/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "cpad/codec.hpp"
#include "cpad/error.hpp"

namespace cpad {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kExtension = ".tlv";
constexpr std::string_view kLockName = ".lock";

[[noreturn]] void io_fail(const std::string& what) {
  throw Error(ErrorCode::Io, what + ": " + std::strerror(errno));
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_all(int fd, ByteView data, const fs::path& path) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("write " + path.string());
    }
    off += static_cast<std::size_t>(n);
  }
}

// Write to a sibling temp file, flush it to disk, then rename over the target.
void atomic_replace(const fs::path& target, ByteView data) {
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp");
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) io_fail("open " + tmp.string());
  try {
    write_all(fd, data, tmp);
    if (::fsync(fd) != 0) io_fail("fsync " + tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), target.c_str()) != 0) io_fail("rename " + tmp.string());
}

std::vector<tlv::Type> layout_of(ByteView stream, tlv::Type outer) {
  tlv::Reader r = tlv::Reader::from_stream(stream);
  tlv::Reader in = r.nested(outer);
  r.expect_end();
  std::vector<tlv::Type> types;
  while (!in.done()) {
    const tlv::Type t = in.peek();
    in.record(t);
    types.push_back(t);
  }
  return types;
}

}  // namespace

Bytes encode_record(const FogRecord& rec) {
  tlv::Writer in;
  in.scalar(rec.fname);
  codec::put_verify_key(in, rec.spk);
  codec::put(in, rec.ct);
  tlv::Writer w;
  w.nested(tlv::Type::FogRecord, in);
  return w.stream();
}

Bytes encode_record(const CloudRecord& rec) {
  tlv::Writer in;
  in.scalar(rec.fname);
  codec::put_verify_key(in, rec.spk);
  codec::put(in, rec.payload);
  tlv::Writer w;
  w.nested(tlv::Type::CloudRecord, in);
  return w.stream();
}

FogRecord decode_fog_record(ByteView stream) {
  tlv::Reader r = tlv::Reader::from_stream(stream);
  tlv::Reader in = r.nested(tlv::Type::FogRecord);
  r.expect_end();
  FogRecord rec;
  rec.fname = in.scalar();
  rec.spk = codec::get_verify_key(in);
  rec.ct = codec::get<KeyCiphertext>(in);
  in.expect_end();
  return rec;
}

CloudRecord decode_cloud_record(ByteView stream) {
  tlv::Reader r = tlv::Reader::from_stream(stream);
  tlv::Reader in = r.nested(tlv::Type::CloudRecord);
  r.expect_end();
  CloudRecord rec;
  rec.fname = in.scalar();
  rec.spk = codec::get_verify_key(in);
  rec.payload = codec::get<SealedPayload>(in);
  in.expect_end();
  if (!(rec.payload.fname == rec.fname)) {
    throw Error(ErrorCode::InvalidEncoding, "cloud record fname disagrees with its payload");
  }
  return rec;
}

namespace detail {

RecordFiles::RecordFiles(tlv::Type record_type, std::optional<fs::path> dir)
    : type_(record_type), dir_(std::move(dir)) {
  if (!dir_) return;
  std::error_code ec;
  fs::create_directories(*dir_, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create store directory " + dir_->string() + ": " + ec.message());

  const fs::path lock_path = *dir_ / kLockName;
  lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
  if (lock_fd_ < 0) io_fail("open " + lock_path.string());
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    release();
    throw Error(ErrorCode::Io, "store directory " + dir_->string() + " is locked by another user");
  }

  try {
    for (const auto& entry : fs::directory_iterator(*dir_)) {
      const std::string name = entry.path().filename().string();
      if (name.size() > 4 && name.front() == '.' && name.ends_with(".tmp")) {
        // Leftover from an interrupted replace; the target file is still intact.
        fs::remove(entry.path());
        continue;
      }
      if (!name.ends_with(kExtension)) continue;
      const Bytes raw_key = from_hex(name.substr(0, name.size() - kExtension.size()));
      const Scalar fname = Scalar::decode(raw_key);
      Bytes stream = read_file(entry.path());
      tlv::Reader r = tlv::Reader::from_stream(stream);
      tlv::Reader in = r.nested(type_);
      if (!(in.scalar() == fname)) {
        throw Error(ErrorCode::InvalidEncoding, entry.path().string() + " holds a record for another fname");
      }
      entries_.emplace(fname.encode(), std::move(stream));
    }
  } catch (...) {
    release();
    throw;
  }
}

RecordFiles::~RecordFiles() { release(); }

RecordFiles::RecordFiles(RecordFiles&& other) noexcept
    : type_(other.type_), dir_(std::move(other.dir_)), lock_fd_(other.lock_fd_), entries_(std::move(other.entries_)) {
  other.lock_fd_ = -1;
  other.dir_.reset();
}

RecordFiles& RecordFiles::operator=(RecordFiles&& other) noexcept {
  if (this != &other) {
    release();
    type_ = other.type_;
    dir_ = std::move(other.dir_);
    lock_fd_ = other.lock_fd_;
    entries_ = std::move(other.entries_);
    other.lock_fd_ = -1;
    other.dir_.reset();
  }
  return *this;
}

void RecordFiles::release() noexcept {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
    lock_fd_ = -1;
  }
}

fs::path RecordFiles::file_for(const Scalar::Encoding& key) const {
  return *dir_ / (to_hex(key) + std::string(kExtension));
}

void RecordFiles::put(const Scalar::Encoding& key, Bytes stream) {
  if (dir_) atomic_replace(file_for(key), stream);
  entries_.insert_or_assign(key, std::move(stream));
}

const Bytes* RecordFiles::find(const Scalar::Encoding& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

bool RecordFiles::erase(const Scalar::Encoding& key) {
  if (!entries_.erase(key)) return false;
  if (dir_) {
    std::error_code ec;
    fs::remove(file_for(key), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot remove record: " + ec.message());
  }
  return true;
}

void RecordFiles::check(std::initializer_list<tlv::Type> layout) const {
  const std::vector<tlv::Type> want(layout);
  for (const auto& [key, stream] : entries_) {
    if (layout_of(stream, type_) != want) {
      throw Error(ErrorCode::InvalidEncoding,
                  std::string(tlv::type_name(type_)) + " for " + to_hex(key) + " has an unexpected layout");
    }
  }
  if (!dir_) return;
  std::set<Scalar::Encoding> on_disk;
  for (const auto& entry : fs::directory_iterator(*dir_)) {
    const std::string name = entry.path().filename().string();
    if (!name.ends_with(kExtension)) continue;
    const Bytes raw = from_hex(name.substr(0, name.size() - kExtension.size()));
    const Scalar::Encoding key = Scalar::decode(raw).encode();
    const Bytes* mem = find(key);
    if (!mem || *mem != read_file(entry.path())) {
      throw Error(ErrorCode::InvalidEncoding, entry.path().string() + " disagrees with the in-memory store");
    }
    on_disk.insert(key);
  }
  if (on_disk.size() != entries_.size()) {
    throw Error(ErrorCode::InvalidEncoding, "store directory is missing records");
  }
}

}  // namespace detail

FogStore::FogStore(const fs::path& dir) : files_(tlv::Type::FogRecord, dir) {}

void FogStore::put(const FogRecord& rec) { files_.put(rec.fname.encode(), encode_record(rec)); }

std::optional<FogRecord> FogStore::get(const Scalar& fname) const {
  const Bytes* raw = files_.find(fname.encode());
  if (!raw) return std::nullopt;
  return decode_fog_record(*raw);
}

bool FogStore::contains(const Scalar& fname) const { return files_.find(fname.encode()) != nullptr; }

bool FogStore::erase(const Scalar& fname) { return files_.erase(fname.encode()); }

void FogStore::check_hygiene() const {
  files_.check({tlv::Type::Scalar, tlv::Type::VerifyKey, tlv::Type::KeyCiphertext});
}

CloudStore::CloudStore(const fs::path& dir) : files_(tlv::Type::CloudRecord, dir) {}

void CloudStore::put(const CloudRecord& rec) { files_.put(rec.fname.encode(), encode_record(rec)); }

std::optional<CloudRecord> CloudStore::get(const Scalar& fname) const {
  const Bytes* raw = files_.find(fname.encode());
  if (!raw) return std::nullopt;
  return decode_cloud_record(*raw);
}

bool CloudStore::contains(const Scalar& fname) const { return files_.find(fname.encode()) != nullptr; }

bool CloudStore::erase(const Scalar& fname) { return files_.erase(fname.encode()); }

void CloudStore::check_hygiene() const {
  files_.check({tlv::Type::Scalar, tlv::Type::VerifyKey, tlv::Type::SealedPayload});
}

ReencryptResult fog_reencrypt(const FogRecord& rec, const DeletionRequest& req, const SigningKeypair& fsk,
                              RandomSource& rng, FogBehavior behavior) {
  if (!(req.fname == rec.fname)) throw Error(ErrorCode::UnknownFname, "request names a different file");
  if (behavior == FogBehavior::Honest) return reencrypt(rec.ct, req, fsk, rec.spk, rng);

  check_del_request(req, rec.spk);
  const Scalar v = Scalar::random_nonzero(rng);
  const Scalar eta = req.q.pow(v);
  ReencryptResult out;
  if (behavior == FogBehavior::SkipUpdate) {
    out.ct = rec.ct;
  } else {
    Scalar gamma = req.theta.pow(v) + Scalar::one();
    if (gamma.is_zero()) gamma = Scalar::one();
    out.ct = apply_dummy_update(rec.ct, gamma);
  }
  out.response = make_response(eta, fsk);
  return out;
}

void cloud_delete(CloudStore& store, const Scalar& fname, const DeletionRequest& req) {
  const auto rec = store.get(fname);
  if (!rec) throw Error(ErrorCode::UnknownFname, "cloud holds no payload for this fname");
  if (!(req.fname == fname)) throw Error(ErrorCode::BadSignature, "request was signed for a different fname");
  check_del_request(req, rec->spk);
  store.erase(fname);
}

}  // namespace cpad
