#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "cpad/error.hpp"
#include "cpad/store.hpp"

namespace cpad {
namespace {

namespace fs = std::filesystem;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("cpad-store-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

class StoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::vector<std::string> u{"dummy", "A", "B"};
    SetupResult res = setup(u, rng_);
    pp_ = std::move(res.pp);
    msk_ = std::move(res.msk);
    ssk_ = SigningKeypair::generate(rng_);
    fsk_ = SigningKeypair::generate(rng_);
  }

  struct Object {
    FogRecord fog;
    CloudRecord cloud;
    TargetElem key;
  };

  Object make_object(std::string_view data = "payload") {
    Encapsulation enc = encapsulate(pp_, parse_policy("dummy AND (A OR B)"), rng_);
    const Scalar fname = Scalar::random(rng_);
    Object o;
    o.fog = FogRecord{fname, ssk_.v, enc.ct};
    o.cloud = CloudRecord{fname, ssk_.v, seal(as_bytes(data), enc.key, fname, rng_)};
    o.key = enc.key;
    return o;
  }

  DeletionRequest request_for(const Object& o, const SigningKeypair& signer) {
    return make_del_request(o.fog.fname, make_tag(o.fog.fname, o.key), signer, rng_).first;
  }

  SeededRandom rng_{81};
  PublicParams pp_;
  MasterSecretKey msk_;
  SigningKeypair ssk_;
  SigningKeypair fsk_;
};

TEST_F(StoreTest, RecordCodecRoundtrip) {
  const Object o = make_object();
  EXPECT_EQ(decode_fog_record(encode_record(o.fog)), o.fog);
  EXPECT_EQ(decode_cloud_record(encode_record(o.cloud)), o.cloud);
  EXPECT_THROW(decode_fog_record(encode_record(o.cloud)), Error);
  EXPECT_THROW(decode_cloud_record(encode_record(o.fog)), Error);
}

TEST_F(StoreTest, MemoryStoreBasics) {
  FogStore fog;
  CloudStore cloud;
  const Object o = make_object();
  EXPECT_FALSE(fog.contains(o.fog.fname));
  EXPECT_FALSE(fog.get(o.fog.fname).has_value());
  fog.put(o.fog);
  cloud.put(o.cloud);
  EXPECT_EQ(fog.size(), 1u);
  EXPECT_EQ(*fog.get(o.fog.fname), o.fog);
  EXPECT_EQ(*cloud.get(o.cloud.fname), o.cloud);
  fog.check_hygiene();
  cloud.check_hygiene();
  EXPECT_TRUE(fog.erase(o.fog.fname));
  EXPECT_FALSE(fog.erase(o.fog.fname));
  EXPECT_EQ(fog.size(), 0u);
}

TEST_F(StoreTest, PersistentReloadIsBitExact) {
  TempDir tmp;
  std::vector<Object> objs;
  std::map<Scalar::Encoding, Bytes> fog_raw;
  std::map<Scalar::Encoding, Bytes> cloud_raw;
  {
    FogStore fog(tmp.path() / "fog");
    CloudStore cloud(tmp.path() / "cloud");
    for (int i = 0; i < 5; ++i) {
      objs.push_back(make_object("object " + std::to_string(i)));
      fog.put(objs.back().fog);
      cloud.put(objs.back().cloud);
    }
    fog.erase(objs[2].fog.fname);
    fog_raw = fog.raw();
    cloud_raw = cloud.raw();
  }
  FogStore fog(tmp.path() / "fog");
  CloudStore cloud(tmp.path() / "cloud");
  EXPECT_EQ(fog.raw(), fog_raw);
  EXPECT_EQ(cloud.raw(), cloud_raw);
  EXPECT_EQ(fog.size(), 4u);
  EXPECT_EQ(cloud.size(), 5u);
  EXPECT_EQ(*fog.get(objs[0].fog.fname), objs[0].fog);
  fog.check_hygiene();
  cloud.check_hygiene();
}

TEST_F(StoreTest, DirectoryLockIsExclusive) {
  TempDir tmp;
  FogStore first(tmp.path());
  EXPECT_EQ(code_of([&] { FogStore second(tmp.path()); }), ErrorCode::Io);
}

TEST_F(StoreTest, LockReleasedOnDestructionAndMove) {
  TempDir tmp;
  {
    FogStore first(tmp.path());
    FogStore moved(std::move(first));
    EXPECT_EQ(code_of([&] { FogStore again(tmp.path()); }), ErrorCode::Io);
  }
  EXPECT_NO_THROW(FogStore again(tmp.path()));
}

TEST_F(StoreTest, ReplaceLeavesNoTemporaries) {
  TempDir tmp;
  FogStore fog(tmp.path());
  Object o = make_object();
  fog.put(o.fog);
  o.fog.ct = apply_dummy_update(o.fog.ct, Scalar::from_u64(5));
  fog.put(o.fog);
  int files = 0;
  for (const auto& entry : fs::directory_iterator(tmp.path())) {
    const std::string name = entry.path().filename().string();
    EXPECT_EQ(name.find(".tmp"), std::string::npos) << name;
    if (name.ends_with(".tlv")) ++files;
  }
  EXPECT_EQ(files, 1);
  EXPECT_EQ(*fog.get(o.fog.fname), o.fog);
}

TEST_F(StoreTest, StaleTemporariesRemovedOnOpen) {
  TempDir tmp;
  std::ofstream(tmp.path() / ".deadbeef.tlv.tmp") << "partial";
  FogStore fog(tmp.path());
  EXPECT_FALSE(fs::exists(tmp.path() / ".deadbeef.tlv.tmp"));
  EXPECT_EQ(fog.size(), 0u);
}

TEST_F(StoreTest, CorruptFileRejectedOnOpen) {
  TempDir tmp;
  const Object o = make_object();
  {
    FogStore fog(tmp.path());
    fog.put(o.fog);
  }
  for (const auto& entry : fs::directory_iterator(tmp.path())) {
    if (entry.path().extension() == ".tlv") std::ofstream(entry.path(), std::ios::binary) << "CPAD junk";
  }
  EXPECT_EQ(code_of([&] { FogStore fog(tmp.path()); }), ErrorCode::InvalidEncoding);
}

TEST_F(StoreTest, MisnamedFileRejectedOnOpen) {
  TempDir tmp;
  const Object a = make_object();
  const Object b = make_object();
  {
    FogStore fog(tmp.path());
    fog.put(a.fog);
  }
  const fs::path src = tmp.path() / (to_hex(a.fog.fname.encode()) + ".tlv");
  fs::rename(src, tmp.path() / (to_hex(b.fog.fname.encode()) + ".tlv"));
  EXPECT_EQ(code_of([&] { FogStore fog(tmp.path()); }), ErrorCode::InvalidEncoding);
}

TEST_F(StoreTest, HygieneDetectsDiskDrift) {
  TempDir tmp;
  FogStore fog(tmp.path());
  const Object o = make_object();
  fog.put(o.fog);
  fog.check_hygiene();
  fs::remove(tmp.path() / (to_hex(o.fog.fname.encode()) + ".tlv"));
  EXPECT_EQ(code_of([&] { fog.check_hygiene(); }), ErrorCode::InvalidEncoding);
}

TEST_F(StoreTest, CloudDeleteHonest) {
  CloudStore cloud;
  const Object o = make_object();
  cloud.put(o.cloud);
  cloud_delete(cloud, o.cloud.fname, request_for(o, ssk_));
  EXPECT_FALSE(cloud.contains(o.cloud.fname));
}

TEST_F(StoreTest, CloudDeleteBadSignatureRetainsPayload) {
  CloudStore cloud;
  const Object o = make_object();
  cloud.put(o.cloud);
  const SigningKeypair stranger = SigningKeypair::generate(rng_);
  EXPECT_EQ(code_of([&] { cloud_delete(cloud, o.cloud.fname, request_for(o, stranger)); }),
            ErrorCode::BadSignature);
  DeletionRequest tampered = request_for(o, ssk_);
  tampered.theta = tampered.theta + Scalar::one();
  EXPECT_EQ(code_of([&] { cloud_delete(cloud, o.cloud.fname, tampered); }), ErrorCode::BadSignature);
  EXPECT_EQ(*cloud.get(o.cloud.fname), o.cloud);
}

TEST_F(StoreTest, CloudDeleteUnknownFname) {
  CloudStore cloud;
  const Object o = make_object();
  const Object other = make_object();
  cloud.put(o.cloud);
  EXPECT_EQ(code_of([&] { cloud_delete(cloud, other.cloud.fname, request_for(other, ssk_)); }),
            ErrorCode::UnknownFname);
  // A valid request for another file does not delete this one.
  EXPECT_EQ(code_of([&] { cloud_delete(cloud, o.cloud.fname, request_for(other, ssk_)); }),
            ErrorCode::BadSignature);
  EXPECT_TRUE(cloud.contains(o.cloud.fname));
}

TEST_F(StoreTest, FogBehaviors) {
  const Object o = make_object();
  const UserSecretKey obj_key = keygen(msk_, pp_, {"dummy", "A"}, rng_);
  for (FogBehavior b : {FogBehavior::Honest, FogBehavior::SkipUpdate, FogBehavior::InconsistentGamma}) {
    auto [req, state] = make_del_request(o.fog.fname, make_tag(o.fog.fname, o.key), ssk_, rng_);
    const ReencryptResult res = fog_reencrypt(o.fog, req, fsk_, rng_, b);
    const bool ok = verify_deletion(res.response, res.ct, obj_key, state, pp_, fsk_.v, o.fog.fname);
    EXPECT_EQ(ok, b == FogBehavior::Honest);
    if (b == FogBehavior::SkipUpdate) EXPECT_EQ(res.ct, o.fog.ct);
    if (b != FogBehavior::SkipUpdate) EXPECT_NE(res.ct, o.fog.ct);
  }
}

TEST_F(StoreTest, FogRejectsMismatchedOrForgedRequests) {
  const Object o = make_object();
  const Object other = make_object();
  EXPECT_EQ(code_of([&] { fog_reencrypt(o.fog, request_for(other, ssk_), fsk_, rng_); }),
            ErrorCode::UnknownFname);
  const SigningKeypair stranger = SigningKeypair::generate(rng_);
  for (FogBehavior b : {FogBehavior::Honest, FogBehavior::SkipUpdate, FogBehavior::InconsistentGamma}) {
    EXPECT_EQ(code_of([&] { fog_reencrypt(o.fog, request_for(o, stranger), fsk_, rng_, b); }),
              ErrorCode::BadSignature);
  }
}

}  // namespace
}  // namespace cpad
