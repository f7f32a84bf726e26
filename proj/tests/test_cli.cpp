#include <gtest/gtest.h>
#include <sys/stat.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "cpad/bytes.hpp"
#include "cpad/codec.hpp"

namespace cpad {
namespace {

namespace fs = std::filesystem;

struct Result {
  int status = -1;
  std::string output;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("cpad-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  Result run(const std::string& args) const {
    const std::string cmd = "cd '" + dir_.string() + "' && '" CPAD_CLI_PATH "' " + args + " 2>&1";
    Result r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
  }

  Bytes read(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

  void write(const std::string& name, ByteView data) const {
    std::ofstream(dir_ / name, std::ios::binary).write(reinterpret_cast<const char*>(data.data()),
                                                        static_cast<std::streamsize>(data.size()));
  }

  std::string hash(const std::string& name) const { return to_hex(sha256(read(name))); }

  unsigned mode(const std::string& name) const {
    struct stat st {};
    ::stat((dir_ / name).c_str(), &st);
    return st.st_mode & 0777;
  }

  static std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

  // setup, two keys and one uploaded 1 KiB file; returns the fname.
  std::string provision(const Bytes& data) {
    EXPECT_EQ(run("setup --universe dummy,A,B,C --out sys --seed 5").status, 0);
    EXPECT_EQ(run("keygen --attrs dummy,A --msk sys/msk.tlv --pp sys/pp.tlv --out a.key --seed 6").status, 0);
    EXPECT_EQ(run("keygen --attrs dummy,C --msk sys/msk.tlv --pp sys/pp.tlv --out c.key --seed 7").status, 0);
    write("data.bin", data);
    const Result enc = run(std::string("encrypt --policy \"dummy AND (A OR B)\" --in data.bin --pp sys/pp.tlv ") +
                           "--fog fog --cloud cloud --object obj --seed 8");
    EXPECT_EQ(enc.status, 0) << enc.output;
    return first_line(enc.output);
  }

  static Bytes kib() {
    Bytes data(1024);
    std::mt19937 gen(3);
    for (auto& b : data) b = static_cast<std::uint8_t>(gen());
    return data;
  }

  std::string decrypt(const std::string& fname, const std::string& key, const std::string& out) const {
    return "decrypt --fname " + fname + " --key " + key + " --pp sys/pp.tlv --fog fog --cloud cloud --out " + out;
  }

  fs::path dir_;
};

TEST_F(CliTest, GoldenSetupAndKeygen) {
  ASSERT_EQ(run("setup --universe dummy,A,B,C --out sys --seed 5").status, 0);
  ASSERT_EQ(run("keygen --attrs dummy,A --msk sys/msk.tlv --pp sys/pp.tlv --out a.key --seed 6").status, 0);
  EXPECT_EQ(hash("sys/pp.tlv"), "69b68156726478e58ac7831807aef5baf56201d0b9155f58c76d29693ff87979");
  EXPECT_EQ(hash("sys/msk.tlv"), "df25a4cb7d89d3bfa4e7433378cbc471b9ed5e64d3aecdcb6e488954896ff1cb");
  EXPECT_EQ(hash("a.key"), "7fdc34d9a9d7a416919b9c1823cedd50a8622fa624c8828da9e93303f01141e4");
  // The pinned files are well-formed and mutually consistent.
  const auto pp = codec::from_stream<PublicParams>(read("sys/pp.tlv"));
  const auto msk = codec::from_stream<MasterSecretKey>(read("sys/msk.tlv"));
  EXPECT_EQ(pair(msk.g_alpha, pp.g), pp.e_gg_alpha);
  EXPECT_EQ(codec::from_stream<UserSecretKey>(read("a.key")).attributes(), (AttributeSet{"dummy", "A"}));
}

TEST_F(CliTest, SecretFilesArePrivate) {
  provision(kib());
  EXPECT_EQ(mode("sys/msk.tlv"), 0600u);
  EXPECT_EQ(mode("a.key"), 0600u);
  EXPECT_EQ(mode("obj/ssk.key"), 0600u);
  EXPECT_EQ(mode("fog/fog.key"), 0600u);
  EXPECT_EQ(mode("sys/pp.tlv"), 0644u);
}

TEST_F(CliTest, RoundtripOneKiB) {
  const Bytes data = kib();
  const std::string fname = provision(data);
  ASSERT_EQ(fname.size(), 64u);
  const Result r = run(decrypt(fname, "a.key", "out.bin"));
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(read("out.bin"), data);
}

TEST_F(CliTest, NonSatisfyingKeyIsRefused) {
  const std::string fname = provision(kib());
  const Result r = run(decrypt(fname, "c.key", "out.bin"));
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("not-authorized"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir_ / "out.bin"));
}

TEST_F(CliTest, DeleteThenDecryptThenVerify) {
  const std::string fname = provision(kib());
  const Result del = run("delete --fname " + fname + " --fog fog --cloud cloud --object obj --seed 9");
  ASSERT_EQ(del.status, 0) << del.output;
  const Result dec = run(decrypt(fname, "a.key", "out.bin"));
  EXPECT_EQ(dec.status, 1);
  EXPECT_NE(dec.output.find("not-found"), std::string::npos) << dec.output;
  const Result ver = run("verify --fname " + fname + " --key a.key --pp sys/pp.tlv --fog fog --object obj");
  EXPECT_EQ(ver.status, 0) << ver.output;
  EXPECT_EQ(first_line(ver.output), "verify=true");
  // A second request while the first is outstanding is refused.
  EXPECT_EQ(run("delete --fname " + fname + " --fog fog --cloud cloud --object obj").status, 1);
}

TEST_F(CliTest, CheatingFogFailsVerification) {
  for (const std::string behavior : {"skip-update", "inconsistent-gamma"}) {
    const std::string fname = provision(kib());
    ASSERT_EQ(run("delete --fname " + fname + " --fog fog --cloud cloud --object obj --fog-behavior " + behavior)
                  .status,
              0);
    const Result ver = run("verify --fname " + fname + " --key a.key --pp sys/pp.tlv --fog fog --object obj");
    EXPECT_EQ(ver.status, 1) << behavior;
    EXPECT_EQ(first_line(ver.output), "verify=false");
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("setup").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("setup --universe A,B --out sys").status, 2);
  EXPECT_EQ(run("bench --mode sideways").status, 2);
  provision(kib());
  EXPECT_EQ(run("encrypt --policy \"A OR\" --in data.bin --pp sys/pp.tlv --fog fog --cloud cloud --object obj")
                .status,
            2);
  EXPECT_EQ(run("--help").status, 0);
}

TEST_F(CliTest, MalformedFilesExitThree) {
  const std::string fname = provision(kib());
  EXPECT_EQ(run("keygen --attrs dummy --msk missing.tlv --pp sys/pp.tlv --out z.key").status, 3);
  write("junk.key", as_bytes("CPAD\x01garbage"));
  EXPECT_EQ(run(decrypt(fname, "junk.key", "out.bin")).status, 3);
  Bytes truncated = read("a.key");
  truncated.resize(truncated.size() / 2);
  write("half.key", truncated);
  EXPECT_EQ(run(decrypt(fname, "half.key", "out.bin")).status, 3);
  EXPECT_EQ(run(decrypt("zz", "a.key", "out.bin")).status, 3);
  EXPECT_EQ(run(decrypt(fname, "sys/pp.tlv", "out.bin")).status, 3);
}

TEST_F(CliTest, UnknownFnameExitsOne) {
  provision(kib());
  const std::string other(64, '0');
  EXPECT_EQ(run(decrypt(other, "a.key", "out.bin")).status, 1);
}

TEST_F(CliTest, BenchReportFormat) {
  const Result r = run("bench --mode keygen --sizes 2,4 --trials 1 --out report.tsv");
  ASSERT_EQ(r.status, 0) << r.output;
  const Bytes report = read("report.tsv");
  const std::string text(report.begin(), report.end());
  EXPECT_EQ(first_line(text), "size\tmedian_ns\texp_G\tmul_G\texp_GT\tmul_GT\tpairings\tmin_ns");
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  for (std::size_t s : {2u, 4u}) {
    ASSERT_TRUE(std::getline(lines, line));
    std::istringstream cols(line);
    std::size_t size = 0, ns = 0, exp_g = 0, mul_g = 0;
    cols >> size >> ns >> exp_g >> mul_g;
    EXPECT_EQ(size, s);
    EXPECT_EQ(exp_g, s + 2);
    EXPECT_EQ(mul_g, 1u);
  }
}

TEST_F(CliTest, SimulateIsDeterministic) {
  const std::string script =
      "PARTY aa authority\nPARTY obj object\nPARTY fog1 fog\nPARTY cloud1 cloud\n"
      "STEP aa setup dummy,A\nSTEP aa keygen obj dummy,A\n"
      "STEP obj upload f text:hello dummy AND A\nSTEP obj delete f\nSTEP obj verify f\n";
  write("s.txt", as_bytes(script));
  const Result a = run("simulate --script s.txt --seed 4 --trace t1.tsv");
  const Result b = run("simulate --script s.txt --seed 4 --trace t2.tsv");
  ASSERT_EQ(a.status, 0) << a.output;
  EXPECT_EQ(a.output, b.output);
  EXPECT_EQ(read("t1.tsv"), read("t2.tsv"));
  EXPECT_NE(a.output.find("verify=true"), std::string::npos);
  write("bad.txt", as_bytes("PARTY aa authority\nSTEP aa keygen x dummy\n"));
  EXPECT_EQ(run("simulate --script bad.txt").status, 1);
}

}  // namespace
}  // namespace cpad
