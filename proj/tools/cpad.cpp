// cpad: command-line front end for setup, key issue, upload, access,
// deletion and verification, plus the benchmark sweeps and the simulator.
//
// Exit status: 0 success or verified, 1 protocol outcome false (verification
// failed, not authorized, not found), 2 usage error, 3 I/O or encoding error.

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "cpad/abe.hpp"
#include "cpad/bench.hpp"
#include "cpad/codec.hpp"
#include "cpad/deletion.hpp"
#include "cpad/error.hpp"
#include "cpad/fogsim.hpp"
#include "cpad/payload.hpp"
#include "cpad/random.hpp"
#include "cpad/store.hpp"

namespace fs = std::filesystem;
using namespace cpad;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFalse = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

constexpr const char* kFogKeyFile = "fog.key";
constexpr const char* kObjectKeyFile = "ssk.key";

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidEncoding:
    case ErrorCode::Io:
      return kExitIo;
    case ErrorCode::SyntaxError:
    case ErrorCode::EmptyPolicy:
    case ErrorCode::NonMonotonePolicy:
    case ErrorCode::MissingDummyAttribute:
    case ErrorCode::DuplicateAttribute:
    case ErrorCode::UnknownAttribute:
    case ErrorCode::PolicyMissingDummy:
    case ErrorCode::DummyNotUnique:
      return kExitUsage;
    default:
      return kExitFalse;
  }
}

// ---- files -------------------------------------------------------------------

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string() + ": " + std::strerror(errno));
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

/// Secret files are created 0600 and tightened if they already exist.
void write_file(const fs::path& path, ByteView data, bool secret) {
  const mode_t mode = secret ? 0600 : 0644;
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, mode);
  if (fd < 0) throw Error(ErrorCode::Io, "cannot write " + path.string() + ": " + std::strerror(errno));
  bool ok = ::fchmod(fd, mode) == 0;
  std::size_t done = 0;
  while (ok && done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0 && errno == EINTR) continue;
    ok = n > 0;
    if (ok) done += static_cast<std::size_t>(n);
  }
  const int saved = errno;
  ::close(fd);
  if (!ok) throw Error(ErrorCode::Io, "cannot write " + path.string() + ": " + std::strerror(saved));
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

template <class T>
T load(const fs::path& path) {
  return codec::from_stream<T>(read_file(path));
}

AttributeSet parse_attrs(const std::vector<std::string>& items) {
  AttributeSet out;
  for (const auto& a : items) {
    if (!out.insert(a).second) throw Error(ErrorCode::DuplicateAttribute, "attribute '" + a + "' listed twice");
  }
  return out;
}

Scalar parse_fname(const std::string& hex) { return Scalar::decode(from_hex(hex)); }

SigningKeypair load_or_create_keypair(const fs::path& path, RandomSource& rng) {
  if (fs::exists(path)) return load<SigningKeypair>(path);
  const SigningKeypair key = SigningKeypair::generate(rng);
  write_file(path, codec::to_stream(key), true);
  return key;
}

// ---- shared options ------------------------------------------------------------

struct Common {
  std::optional<std::uint64_t> seed;
  std::string exec = "parallel";

  std::unique_ptr<RandomSource> rng() const {
    if (seed) return std::make_unique<SeededRandom>(*seed);
    return std::make_unique<SystemRandom>();
  }
  Exec mode() const { return exec == "serial" ? Exec::Serial : Exec::Parallel; }
};

void add_seed(CLI::App* cmd, Common& common) {
#ifdef CPAD_SEED_FLAG
  cmd->add_option("--seed", common.seed, "Deterministic randomness (testing only)");
#else
  (void)cmd;
  (void)common;
#endif
}

void add_exec(CLI::App* cmd, Common& common) {
  cmd->add_option("--exec", common.exec, "Kernel implementation")
      ->check(CLI::IsMember({"serial", "parallel"}))
      ->capture_default_str();
}

// Object-side state: signing key, deletion tags, outstanding requests and
// the fog's responses, one file per fname.
struct ObjectDir {
  fs::path dir;
  std::optional<fs::path> ssk_override;

  fs::path ssk_path() const { return ssk_override ? *ssk_override : dir / kObjectKeyFile; }
  fs::path tag(const Scalar& f) const { return dir / (to_hex(f.encode()) + ".tag"); }
  fs::path pending(const Scalar& f) const { return dir / (to_hex(f.encode()) + ".pending"); }
  fs::path response(const Scalar& f) const { return dir / (to_hex(f.encode()) + ".response"); }
};

// ---- commands ------------------------------------------------------------------

struct SetupArgs {
  Common common;
  std::vector<std::string> universe;
  fs::path out;
};

int cmd_setup(const SetupArgs& a) {
  auto rng = a.common.rng();
  const SetupResult res = setup(a.universe, *rng);
  ensure_dir(a.out);
  write_file(a.out / "pp.tlv", codec::to_stream(res.pp), false);
  write_file(a.out / "msk.tlv", codec::to_stream(res.msk), true);
  std::cout << "universe " << res.pp.universe.size() << " attributes\n";
  return kExitOk;
}

struct KeygenArgs {
  Common common;
  std::vector<std::string> attrs;
  fs::path msk;
  fs::path pp;
  fs::path out;
};

int cmd_keygen(const KeygenArgs& a) {
  auto rng = a.common.rng();
  const PublicParams pp = load<PublicParams>(a.pp);
  const MasterSecretKey msk = load<MasterSecretKey>(a.msk);
  const UserSecretKey sk = keygen(msk, pp, parse_attrs(a.attrs), *rng);
  write_file(a.out, codec::to_stream(sk), true);
  return kExitOk;
}

struct EncryptArgs {
  Common common;
  std::string policy;
  fs::path in;
  fs::path pp;
  fs::path fog;
  fs::path cloud;
  ObjectDir object;
};

int cmd_encrypt(const EncryptArgs& a) {
  auto rng = a.common.rng();
  const PublicParams pp = load<PublicParams>(a.pp);
  const AccessPolicy policy = parse_policy(a.policy);
  const Bytes data = read_file(a.in);
  ensure_dir(a.object.dir);
  const SigningKeypair ssk = load_or_create_keypair(a.object.ssk_path(), *rng);

  FogStore fog(a.fog);
  CloudStore cloud(a.cloud);
  load_or_create_keypair(a.fog / kFogKeyFile, *rng);

  const Scalar fname = Scalar::random(*rng);
  const Encapsulation enc = encapsulate(pp, policy, *rng, a.common.mode());
  const SealedPayload sealed = seal(data, enc.key, fname, *rng);
  write_file(a.object.tag(fname), codec::to_stream(make_tag(fname, enc.key)), true);

  // The fog keeps the key ciphertext and hands the sealed payload on.
  fog.put(FogRecord{fname, ssk.v, enc.ct});
  cloud.put(CloudRecord{fname, ssk.v, sealed});
  std::cout << to_hex(fname.encode()) << '\n';
  return kExitOk;
}

struct DecryptArgs {
  Common common;
  std::string fname;
  fs::path key;
  fs::path pp;
  fs::path fog;
  fs::path cloud;
  fs::path out;
};

int cmd_decrypt(const DecryptArgs& a) {
  const Scalar fname = parse_fname(a.fname);
  const PublicParams pp = load<PublicParams>(a.pp);
  const UserSecretKey sk = load<UserSecretKey>(a.key);
  const auto rec = FogStore(a.fog).get(fname);
  if (!rec) throw Error(ErrorCode::NotFound, "fog holds no key ciphertext for " + a.fname);
  const TargetElem k = decapsulate(rec->ct, sk, pp, a.common.mode());
  const auto payload = CloudStore(a.cloud).get(fname);
  if (!payload) throw Error(ErrorCode::NotFound, "cloud holds no payload for " + a.fname);
  write_file(a.out, unseal(payload->payload, k, fname), false);
  return kExitOk;
}

struct DeleteArgs {
  Common common;
  std::string fname;
  fs::path fog;
  fs::path cloud;
  ObjectDir object;
  std::string behavior = "honest";
};

int cmd_delete(const DeleteArgs& a) {
  auto rng = a.common.rng();
  const Scalar fname = parse_fname(a.fname);
  if (fs::exists(a.object.pending(fname))) {
    throw Error(ErrorCode::PendingRequestExists, "a deletion of " + a.fname + " is already outstanding");
  }
  const SigningKeypair ssk = load<SigningKeypair>(a.object.ssk_path());
  const DeletionTag tau = load<DeletionTag>(a.object.tag(fname));

  FogStore fog(a.fog);
  CloudStore cloud(a.cloud);
  const SigningKeypair fsk = load<SigningKeypair>(a.fog / kFogKeyFile);
  const auto rec = fog.get(fname);
  if (!rec) throw Error(ErrorCode::UnknownFname, "fog holds no key ciphertext for " + a.fname);

  auto [req, state] = make_del_request(fname, tau, ssk, *rng);

  // Fog side: forward to the cloud, then re-encrypt.
  cloud_delete(cloud, fname, req);
  FogBehavior behavior = FogBehavior::Honest;
  if (a.behavior == "skip-update") behavior = FogBehavior::SkipUpdate;
  if (a.behavior == "inconsistent-gamma") behavior = FogBehavior::InconsistentGamma;
  const ReencryptResult res = fog_reencrypt(*rec, req, fsk, *rng, behavior);
  fog.put(FogRecord{fname, rec->spk, res.ct});

  write_file(a.object.pending(fname), codec::to_stream(state), true);
  write_file(a.object.response(fname), codec::to_stream(res.response), false);
  std::cout << "deleted " << a.fname << '\n';
  return kExitOk;
}

struct VerifyArgs {
  Common common;
  std::string fname;
  fs::path key;
  fs::path pp;
  fs::path fog;
  ObjectDir object;
};

int cmd_verify(const VerifyArgs& a) {
  const Scalar fname = parse_fname(a.fname);
  if (!fs::exists(a.object.pending(fname))) {
    throw Error(ErrorCode::NoPendingRequest, "no deletion of " + a.fname + " was requested");
  }
  const ObjectDeletionState state = load<ObjectDeletionState>(a.object.pending(fname));
  const DeletionResponse resp = load<DeletionResponse>(a.object.response(fname));
  const PublicParams pp = load<PublicParams>(a.pp);
  const UserSecretKey sk = load<UserSecretKey>(a.key);
  const SigningKeypair fsk = load<SigningKeypair>(a.fog / kFogKeyFile);
  const auto rec = FogStore(a.fog).get(fname);
  if (!rec) throw Error(ErrorCode::UnknownFname, "fog holds no key ciphertext for " + a.fname);
  const bool ok = verify_deletion(resp, rec->ct, sk, state, pp, fsk.v, fname, a.common.mode());
  std::cout << (ok ? "verify=true" : "verify=false") << '\n';
  return ok ? kExitOk : kExitFalse;
}

struct BenchArgs {
  Common common;
  std::string mode;
  std::vector<std::size_t> sizes;
  std::size_t trials = 5;
  std::optional<fs::path> out;
};

int cmd_bench(const BenchArgs& a) {
  bench::Config config;
  config.mode = bench::parse_mode(a.mode);
  config.sizes = a.sizes.empty() ? bench::default_sizes(config.mode) : a.sizes;
  config.trials = a.trials;
  config.exec = a.common.mode();
  if (a.common.seed) config.seed = *a.common.seed;
  const std::vector<bench::Row> rows = bench::run(config);
  const std::string report = bench::format_report(rows);
  std::cout << report;
  if (rows.size() >= 2) {
    const bench::LinearFit fit = bench::fit_rows(rows);
    std::cout << "# linear fit: slope_ns=" << fit.slope << " intercept_ns=" << fit.intercept
              << " r2=" << fit.r_squared << '\n';
  }
  if (a.out) write_file(*a.out, as_bytes(report), false);
  return kExitOk;
}

struct SimulateArgs {
  Common common;
  fs::path script;
  std::uint64_t seed = 1;
  std::optional<fs::path> store;
  std::optional<fs::path> trace;
};

int cmd_simulate(const SimulateArgs& a) {
  const Bytes text = read_file(a.script);
  fogsim::ScenarioOptions options;
  options.store_root = a.store;
  options.exec = a.common.mode();
  const fogsim::TraceLog log =
      fogsim::run_scenario(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()), a.seed, options);
  if (a.trace) write_file(*a.trace, as_bytes(log.export_text()), false);
  for (const auto& e : log.entries) {
    if (!e.message || e.note.empty()) continue;
    std::cout << "step " << e.step << ": " << e.note << (e.flagged ? "  [flagged]" : "") << '\n';
  }
  std::cout << "digest " << to_hex(log.digest()) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute-based encryption with assured deletion"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  SetupArgs setup_args;
  auto* setup_cmd = app.add_subcommand("setup", "Create public parameters and the master secret key");
  setup_cmd->add_option("--universe", setup_args.universe, "Attribute universe (must include dummy)")
      ->required()
      ->delimiter(',');
  setup_cmd->add_option("--out", setup_args.out, "Output directory for pp.tlv and msk.tlv")->required();
  add_seed(setup_cmd, setup_args.common);

  KeygenArgs keygen_args;
  auto* keygen_cmd = app.add_subcommand("keygen", "Issue a user secret key");
  keygen_cmd->add_option("--attrs", keygen_args.attrs, "Attributes (must include dummy)")->required()->delimiter(',');
  keygen_cmd->add_option("--msk", keygen_args.msk, "Master secret key file")->required();
  keygen_cmd->add_option("--pp", keygen_args.pp, "Public parameters file")->required();
  keygen_cmd->add_option("--out", keygen_args.out, "Output key file")->required();
  add_seed(keygen_cmd, keygen_args.common);

  EncryptArgs encrypt_args;
  auto* encrypt_cmd = app.add_subcommand("encrypt", "Encrypt a file and upload it to the fog and cloud stores");
  encrypt_cmd->add_option("--policy", encrypt_args.policy, "Access policy, e.g. \"dummy AND (A OR B)\"")->required();
  encrypt_cmd->add_option("--in", encrypt_args.in, "Plaintext file")->required();
  encrypt_cmd->add_option("--pp", encrypt_args.pp, "Public parameters file")->required();
  encrypt_cmd->add_option("--fog", encrypt_args.fog, "Fog store directory")->required();
  encrypt_cmd->add_option("--cloud", encrypt_args.cloud, "Cloud store directory")->required();
  encrypt_cmd->add_option("--object", encrypt_args.object.dir, "Object state directory (signing key, tags)")
      ->required();
  encrypt_cmd->add_option("--ssk", encrypt_args.object.ssk_override, "Object signing key file (created if absent)");
  add_seed(encrypt_cmd, encrypt_args.common);
  add_exec(encrypt_cmd, encrypt_args.common);

  DecryptArgs decrypt_args;
  auto* decrypt_cmd = app.add_subcommand("decrypt", "Fetch and decrypt a stored file");
  decrypt_cmd->add_option("--fname", decrypt_args.fname, "File name (hex)")->required();
  decrypt_cmd->add_option("--key", decrypt_args.key, "User secret key file")->required();
  decrypt_cmd->add_option("--pp", decrypt_args.pp, "Public parameters file")->required();
  decrypt_cmd->add_option("--fog", decrypt_args.fog, "Fog store directory")->required();
  decrypt_cmd->add_option("--cloud", decrypt_args.cloud, "Cloud store directory")->required();
  decrypt_cmd->add_option("--out", decrypt_args.out, "Plaintext output file")->required();
  add_exec(decrypt_cmd, decrypt_args.common);

  DeleteArgs delete_args;
  auto* delete_cmd = app.add_subcommand("delete", "Request deletion of a stored file");
  delete_cmd->add_option("--fname", delete_args.fname, "File name (hex)")->required();
  delete_cmd->add_option("--fog", delete_args.fog, "Fog store directory")->required();
  delete_cmd->add_option("--cloud", delete_args.cloud, "Cloud store directory")->required();
  delete_cmd->add_option("--object", delete_args.object.dir, "Object state directory")->required();
  delete_cmd->add_option("--ssk", delete_args.object.ssk_override, "Object signing key file");
  delete_cmd->add_option("--fog-behavior", delete_args.behavior, "Simulated fog behavior")
      ->check(CLI::IsMember({"honest", "skip-update", "inconsistent-gamma"}))
      ->capture_default_str();
  add_seed(delete_cmd, delete_args.common);

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "Verify the fog's deletion proof");
  verify_cmd->add_option("--fname", verify_args.fname, "File name (hex)")->required();
  verify_cmd->add_option("--key", verify_args.key, "The object's own user secret key")->required();
  verify_cmd->add_option("--pp", verify_args.pp, "Public parameters file")->required();
  verify_cmd->add_option("--fog", verify_args.fog, "Fog store directory")->required();
  verify_cmd->add_option("--object", verify_args.object.dir, "Object state directory")->required();
  add_exec(verify_cmd, verify_args.common);

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Time a sweep and report operation counts");
  bench_cmd->add_option("--mode", bench_args.mode, "encrypt, keygen, decrypt or verify")
      ->required()
      ->check(CLI::IsMember({"encrypt", "keygen", "decrypt", "verify"}));
  bench_cmd->add_option("--sizes", bench_args.sizes, "Sizes to sweep (default depends on mode)")->delimiter(',');
  bench_cmd->add_option("--trials", bench_args.trials, "Timed trials per size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out, "Write the tab-separated report here");
  add_seed(bench_cmd, bench_args.common);
  add_exec(bench_cmd, bench_args.common);

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a fog scenario script");
  sim_cmd->add_option("--script", sim_args.script, "Scenario script")->required();
  sim_cmd->add_option("--seed", sim_args.seed, "Scenario seed")->capture_default_str();
  sim_cmd->add_option("--store", sim_args.store, "Persist fog and cloud stores under this directory");
  sim_cmd->add_option("--trace", sim_args.trace, "Write the trace export here");
  add_exec(sim_cmd, sim_args.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*setup_cmd) return cmd_setup(setup_args);
    if (*keygen_cmd) return cmd_keygen(keygen_args);
    if (*encrypt_cmd) return cmd_encrypt(encrypt_args);
    if (*decrypt_cmd) return cmd_decrypt(decrypt_args);
    if (*delete_cmd) return cmd_delete(delete_args);
    if (*verify_cmd) return cmd_verify(verify_args);
    if (*bench_cmd) return cmd_bench(bench_args);
    if (*sim_cmd) return cmd_simulate(sim_args);
  } catch (const Error& e) {
    std::cerr << "cpad: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "cpad: io: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
