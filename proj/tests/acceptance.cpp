// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   ./acceptance            all criteria
//   ./acceptance 3 7        selected criteria

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cpad/abe.hpp"
#include "cpad/bench.hpp"
#include "cpad/codec.hpp"
#include "cpad/deletion.hpp"
#include "cpad/fogsim.hpp"
#include "cpad/payload.hpp"
#include "cpad/store.hpp"
#include "support.hpp"

namespace {

using namespace cpad;
using cpad::testing::brute_force_eval;
using cpad::testing::group_order;
using cpad::testing::to_mpz;
namespace fs = std::filesystem;

// ---- pinned thresholds -----------------------------------------------------------

constexpr int kCorrectnessTrials = 100;
constexpr std::size_t kCorrectnessMaxLeaves = 20;
constexpr double kCorrectnessBudgetSeconds = 60.0;

constexpr std::size_t kExhaustiveAttributes = 4;
constexpr std::size_t kExhaustiveMaxLeaves = 4;
constexpr std::size_t kExhaustiveFormulaCount = 10788;  // 4 + 32 + 512 + 10240
constexpr int kRandomFormulas = 500;
constexpr std::size_t kRandomMaxLeaves = 6;

constexpr int kDeletionTrials = 100;
constexpr int kVerifyTrials = 100;
constexpr int kCollusionTrials = 100;

constexpr double kMinRSquared = 0.9;
constexpr double kMaxVerifyOverDecrypt = 1.5;
constexpr std::size_t kBenchTrials = 15;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << v;
  return out.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> cpad_universe(std::size_t n) {
  std::vector<std::string> u{std::string(kDummyAttribute)};
  for (const auto& a : cpad::testing::attribute_names(n)) u.push_back(a);
  return u;
}

AttributeSet with_all(const AttributeSet& base, const std::vector<std::string>& extra) {
  AttributeSet out = base;
  out.insert(extra.begin(), extra.end());
  return out;
}

// ---- 1. scheme correctness ------------------------------------------------------------

Outcome scheme_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  SeededRandom rng(1001);
  std::mt19937_64 gen(1001);
  const std::vector<std::string> names = cpad::testing::attribute_names(12);
  const std::vector<std::string> universe = cpad_universe(12);
  const SetupResult sys = setup(universe, rng);
  int ok = 0;
  std::size_t max_leaves = 0;
  for (int t = 0; t < kCorrectnessTrials; ++t) {
    // dummy plus 1..19 further leaves keeps the policy within 20 leaves.
    const std::size_t leaves = 1 + gen() % (kCorrectnessMaxLeaves - 1);
    const AccessPolicy policy = cpad::testing::random_cpad_policy(gen, leaves, names);
    max_leaves = std::max(max_leaves, policy.leaves().size());
    AttributeSet attrs = cpad::testing::minimal_satisfying_set(policy, gen);
    for (const auto& n : names) {
      if (gen() % 4 == 0) attrs.insert(n);
    }
    const UserSecretKey sk = keygen(sys.msk, sys.pp, attrs, rng);
    const Encapsulation enc = encapsulate(sys.pp, policy, rng);
    Bytes data(1 + gen() % 4096);
    rng.fill(data);
    const Scalar fname = Scalar::random(rng);
    const SealedPayload sealed = seal(data, enc.key, fname, rng);
    const TargetElem k = decapsulate(enc.ct, sk, sys.pp);
    if (k == enc.key && unseal(sealed, k, fname) == data) ++ok;
  }
  const double secs = seconds_since(t0);
  const bool pass = ok == kCorrectnessTrials && max_leaves <= kCorrectnessMaxLeaves && secs < kCorrectnessBudgetSeconds;
  return {pass, std::to_string(ok) + "/" + std::to_string(kCorrectnessTrials) + " recovered k and data, max " +
                    std::to_string(max_leaves) + " leaves, " + fmt(secs, 1) + " s (limit " +
                    fmt(kCorrectnessBudgetSeconds, 0) + " s)"};
}

// ---- 2. LSSS oracle equivalence --------------------------------------------------------

// Every binary AND/OR tree with exactly `leaves` leaves over `names`.
std::vector<PolicyNode> all_trees(std::size_t leaves, const std::vector<std::string>& names) {
  std::vector<PolicyNode> out;
  if (leaves == 1) {
    for (const auto& n : names) out.push_back(PolicyNode::leaf(n));
    return out;
  }
  for (std::size_t left = 1; left < leaves; ++left) {
    const auto ls = all_trees(left, names);
    const auto rs = all_trees(leaves - left, names);
    for (const auto& l : ls) {
      for (const auto& r : rs) {
        out.push_back(PolicyNode::all_of({l, r}));
        out.push_back(PolicyNode::any_of({l, r}));
      }
    }
  }
  return out;
}

// Independent check of a reconstruction plan with GMP arithmetic.
bool plan_is_valid(const LsssProgram& prog, const ReconstructionPlan& plan, const AttributeSet& attrs) {
  std::vector<mpz_class> sum(prog.cols(), 0);
  for (std::size_t j = 0; j < plan.rows.size(); ++j) {
    const std::size_t i = plan.rows[j];
    if (i >= prog.rows() || !attrs.count(prog.rho[i])) return false;
    const mpz_class w = to_mpz(plan.omega[j]);
    for (std::size_t c = 0; c < prog.cols(); ++c) sum[c] += w * to_mpz(prog.matrix[i][c]);
  }
  for (std::size_t c = 0; c < prog.cols(); ++c) {
    mpz_class v = sum[c] % group_order();
    if (v != (c == 0 ? 1 : 0)) return false;
  }
  return true;
}

// Returns the number of mismatches over every subset of `names`.
std::size_t check_formula(const PolicyNode& root, const std::vector<std::string>& names, std::size_t& checks) {
  const AccessPolicy policy{root};
  const LsssProgram prog = compile_lsss(policy);
  std::size_t bad = 0;
  for (unsigned mask = 0; mask < (1u << names.size()); ++mask) {
    AttributeSet attrs;
    for (std::size_t b = 0; b < names.size(); ++b) {
      if (mask >> b & 1) attrs.insert(names[b]);
    }
    const bool expect = brute_force_eval(root, attrs);
    const auto plan = try_find_reconstruction(prog, attrs);
    if (plan.has_value() != expect || (plan && !plan_is_valid(prog, *plan, attrs))) ++bad;
    ++checks;
  }
  return bad;
}

Outcome lsss_equivalence() {
  const std::vector<std::string> names{"A", "B", "C", "D"};
  std::size_t formulas = 0;
  std::size_t checks = 0;
  std::size_t mismatches = 0;
  for (std::size_t leaves = 1; leaves <= kExhaustiveMaxLeaves; ++leaves) {
    for (const auto& tree : all_trees(leaves, names)) {
      mismatches += check_formula(tree, names, checks);
      ++formulas;
    }
  }
  std::mt19937_64 gen(2002);
  const std::vector<std::string> six{"A", "B", "C", "D", "E", "F"};
  for (int i = 0; i < kRandomFormulas; ++i) {
    const std::size_t leaves = 1 + gen() % kRandomMaxLeaves;
    mismatches += check_formula(cpad::testing::random_tree(gen, leaves, six), six, checks);
  }
  const bool pass = formulas == kExhaustiveFormulaCount && mismatches == 0;
  return {pass, std::to_string(formulas) + " exhaustive formulas over " + std::to_string(kExhaustiveAttributes) +
                    " attributes + " + std::to_string(kRandomFormulas) + " random, " + std::to_string(checks) +
                    " subset checks, " + std::to_string(mismatches) + " mismatches"};
}

// ---- 3. operation counts --------------------------------------------------------------

Outcome operation_counts() {
  SeededRandom rng(3003);
  const std::vector<std::string> universe = cpad_universe(49);
  const SetupResult sys = setup(universe, rng);
  std::vector<std::string> failures;
  auto expect = [&](const std::string& what, std::uint64_t got, std::uint64_t want) {
    if (got != want) failures.push_back(what + "=" + std::to_string(got) + " want " + std::to_string(want));
  };

  for (std::size_t s = 2; s <= 10; s += 2) {
    const AttributeSet attrs(universe.begin(), universe.begin() + static_cast<std::ptrdiff_t>(s));
    const OpCounter c = counter_scope([&] { keygen(sys.msk, sys.pp, attrs, rng); });
    expect("keygen s=" + std::to_string(s) + " exp_G", c.exp_G, s + 2);
    expect("keygen s=" + std::to_string(s) + " mul_G", c.mul_G, 1);
  }

  for (std::size_t l = 10; l <= 50; l += 10) {
    std::string text;
    for (std::size_t i = 0; i < l; ++i) text += (i ? " AND " : "") + universe[i];
    const AccessPolicy policy = parse_policy(text);
    for (Exec exec : {Exec::Serial, Exec::Parallel}) {
      const OpCounter c = counter_scope([&] { encapsulate(sys.pp, policy, rng, exec); });
      expect("encrypt l=" + std::to_string(l) + " exp_G", c.exp_G, 3 * l + 1);
      expect("encrypt l=" + std::to_string(l) + " mul_G", c.mul_G, l);
    }
  }

  for (std::size_t s = 2; s <= 10; s += 2) {
    std::string text;
    for (std::size_t i = 0; i < s; ++i) text += (i ? " AND " : "") + universe[i];
    const AttributeSet attrs(universe.begin(), universe.begin() + static_cast<std::ptrdiff_t>(s));
    const Encapsulation enc = encapsulate(sys.pp, parse_policy(text), rng);
    const UserSecretKey sk = keygen(sys.msk, sys.pp, attrs, rng);
    const OpCounter c = counter_scope([&] { decapsulate(enc.ct, sk, sys.pp); });
    expect("decrypt |I|=" + std::to_string(s) + " pairings", c.pairings, 2 * s + 1);
  }

  const Encapsulation enc = encapsulate(sys.pp, parse_policy("dummy AND (A1 OR A2)"), rng);
  const SigningKeypair ssk = SigningKeypair::generate(rng);
  const SigningKeypair fsk = SigningKeypair::generate(rng);
  const Scalar fname = Scalar::random(rng);
  const DeletionRequest req = make_del_request(fname, make_tag(fname, enc.key), ssk, rng).first;
  const OpCounter re = counter_scope([&] { reencrypt(enc.ct, req, fsk, ssk.v, rng); });
  expect("reencrypt exp_Zp", re.exp_Zp, 2);
  const OpCounter upd = counter_scope([&] { apply_dummy_update(enc.ct, Scalar::from_u64(7)); });
  expect("dummy-row update exp_G", upd.exp_G, 1);

  std::string detail = failures.empty() ? "keygen s+2, encrypt 3l+1 (serial and parallel), decrypt 2|I|+1, "
                                          "reencrypt exp_Zp 2, exp_G 1 per dummy row: all exact"
                                        : failures.front() + " (" + std::to_string(failures.size()) + " mismatches)";
  return {failures.empty(), detail};
}

// ---- 4. deletion effectiveness --------------------------------------------------------

Outcome deletion_effectiveness() {
  SeededRandom rng(4004);
  std::mt19937_64 gen(4004);
  const std::vector<std::string> names = cpad::testing::attribute_names(6);
  const SetupResult sys = setup(cpad_universe(6), rng);
  int ok = 0;
  std::size_t keys_checked = 0;
  for (int t = 0; t < kDeletionTrials; ++t) {
    const AccessPolicy policy = cpad::testing::random_cpad_policy(gen, 1 + gen() % 6, names);
    const AttributeSet minimal = cpad::testing::minimal_satisfying_set(policy, gen);
    const std::vector<AttributeSet> issued{minimal, with_all(minimal, policy.leaves()), with_all(minimal, names)};
    std::vector<UserSecretKey> keys;
    for (const auto& a : issued) keys.push_back(keygen(sys.msk, sys.pp, a, rng));

    const SigningKeypair ssk = SigningKeypair::generate(rng);
    const SigningKeypair fsk = SigningKeypair::generate(rng);
    const Encapsulation enc = encapsulate(sys.pp, policy, rng);
    const Scalar fname = Scalar::random(rng);
    FogStore fog;
    CloudStore cloud;
    fog.put(FogRecord{fname, ssk.v, enc.ct});
    cloud.put(CloudRecord{fname, ssk.v, seal(as_bytes("secret record"), enc.key, fname, rng)});
    const DeletionTag tau = make_tag(fname, enc.key);

    bool good = true;
    for (const auto& sk : keys) good &= check_tag(tau, fname, decapsulate(enc.ct, sk, sys.pp));

    const DeletionRequest req = make_del_request(fname, tau, ssk, rng).first;
    cloud_delete(cloud, fname, req);
    const ReencryptResult res = fog_reencrypt(*fog.get(fname), req, fsk, rng);
    fog.put(FogRecord{fname, ssk.v, res.ct});

    const KeyCiphertext after = fog.get(fname)->ct;
    for (const auto& sk : keys) {
      good &= !check_tag(tau, fname, decapsulate(after, sk, sys.pp));
      ++keys_checked;
    }
    good &= !cloud.get(fname).has_value();
    if (good) ++ok;
  }
  return {ok == kDeletionTrials, std::to_string(ok) + "/" + std::to_string(kDeletionTrials) +
                                     " lifecycles: all " + std::to_string(keys_checked) +
                                     " post-deletion keys fail the tag, cloud payload gone"};
}

// ---- 5. deletion verifiability --------------------------------------------------------

Outcome deletion_verifiability() {
  SeededRandom rng(5005);
  std::mt19937_64 gen(5005);
  const std::vector<std::string> names = cpad::testing::attribute_names(5);
  const SetupResult sys = setup(cpad_universe(5), rng);
  const SigningKeypair fsk = SigningKeypair::generate(rng);
  int honest = 0, skip = 0, gamma = 0;
  for (int t = 0; t < kVerifyTrials; ++t) {
    const AccessPolicy policy = cpad::testing::random_cpad_policy(gen, 1 + gen() % 5, names);
    const UserSecretKey obj_key = keygen(sys.msk, sys.pp, cpad::testing::minimal_satisfying_set(policy, gen), rng);
    const SigningKeypair ssk = SigningKeypair::generate(rng);
    const Encapsulation enc = encapsulate(sys.pp, policy, rng);
    const Scalar fname = Scalar::random(rng);
    const FogRecord rec{fname, ssk.v, enc.ct};
    const DeletionTag tau = make_tag(fname, enc.key);
    for (FogBehavior b : {FogBehavior::Honest, FogBehavior::SkipUpdate, FogBehavior::InconsistentGamma}) {
      auto [req, state] = make_del_request(fname, tau, ssk, rng);
      const ReencryptResult res = fog_reencrypt(rec, req, fsk, rng, b);
      const bool v = verify_deletion(res.response, res.ct, obj_key, state, sys.pp, fsk.v, fname);
      if (b == FogBehavior::Honest && v) ++honest;
      if (b == FogBehavior::SkipUpdate && !v) ++skip;
      if (b == FogBehavior::InconsistentGamma && !v) ++gamma;
    }
  }
  const std::string n = std::to_string(kVerifyTrials);
  return {honest == kVerifyTrials && skip == kVerifyTrials && gamma == kVerifyTrials,
          "honest true " + std::to_string(honest) + "/" + n + ", skipped update false " + std::to_string(skip) +
              "/" + n + ", inconsistent gamma false " + std::to_string(gamma) + "/" + n};
}

// ---- 6. collusion resistance ----------------------------------------------------------

Outcome collusion_resistance() {
  SeededRandom rng(6006);
  const std::vector<std::string> universe{"dummy", "X", "Y"};
  const SetupResult sys = setup(universe, rng);
  const AccessPolicy policy = parse_policy("dummy AND X AND Y");
  int ok = 0;
  std::size_t hybrids = 0;
  for (int t = 0; t < kCollusionTrials; ++t) {
    const Encapsulation enc = encapsulate(sys.pp, policy, rng);
    const UserSecretKey a = keygen(sys.msk, sys.pp, {"dummy", "X"}, rng);
    const UserSecretKey b = keygen(sys.msk, sys.pp, {"dummy", "Y"}, rng);
    bool good = true;
    // K, L and K_dummy from either key; K_X exists only in a, K_Y only in b.
    for (unsigned mask = 0; mask < 8; ++mask) {
      auto pick = [&](unsigned bit) -> const UserSecretKey& { return mask >> bit & 1 ? b : a; };
      UserSecretKey hybrid;
      hybrid.K = pick(0).K;
      hybrid.L = pick(1).L;
      hybrid.per_attr.emplace("dummy", pick(2).per_attr.at("dummy"));
      hybrid.per_attr.emplace("X", a.per_attr.at("X"));
      hybrid.per_attr.emplace("Y", b.per_attr.at("Y"));
      good &= !(decapsulate(enc.ct, hybrid, sys.pp) == enc.key);
      ++hybrids;
    }
    if (good) ++ok;
  }
  return {ok == kCollusionTrials, std::to_string(ok) + "/" + std::to_string(kCollusionTrials) + " trials, " +
                                      std::to_string(hybrids) + " cross-assigned keys, none recovered k"};
}

// ---- 7. scaling shape -----------------------------------------------------------------

Outcome scaling_shape() {
  auto sweep = [](bench::Mode mode) {
    bench::Config c;
    c.mode = mode;
    c.sizes = bench::default_sizes(mode);
    c.trials = kBenchTrials;
    c.warmup = 1;
    c.exec = Exec::Serial;
    c.seed = 7007;
    return bench::run(c);
  };
  const auto enc = sweep(bench::Mode::Encrypt);
  const auto dec = sweep(bench::Mode::Decrypt);
  const auto ver = sweep(bench::Mode::Verify);
  // Fit the per-size minimum: scheduler noise only ever adds time.
  const double r_enc = bench::fit_rows(enc, bench::Statistic::Min).r_squared;
  const double r_dec = bench::fit_rows(dec, bench::Statistic::Min).r_squared;
  const double r_ver = bench::fit_rows(ver, bench::Statistic::Min).r_squared;
  const double ratio = static_cast<double>(ver.back().min_ns) / static_cast<double>(dec.back().min_ns);
  const bool pass = r_enc >= kMinRSquared && r_dec >= kMinRSquared && r_ver >= kMinRSquared &&
                    ratio <= kMaxVerifyOverDecrypt;
  return {pass, "R2 encrypt " + fmt(r_enc, 4) + ", decrypt " + fmt(r_dec, 4) + ", verify " + fmt(r_ver, 4) +
                    " (min " + fmt(kMinRSquared, 2) + "); verify/decrypt at 10 attributes " + fmt(ratio, 3) +
                    " (max " + fmt(kMaxVerifyOverDecrypt, 2) + ")"};
}

// ---- 8. determinism and persistence ---------------------------------------------------

constexpr std::string_view kScenario = R"(PARTY aa authority
PARTY obj object
PARTY fog1 fog
PARTY cloud1 cloud
PARTY alice user
PARTY bob user
STEP aa setup dummy,Doctor,Nurse,Cardio
STEP aa keygen obj dummy,Doctor,Cardio
STEP aa keygen alice dummy,Doctor,Cardio
STEP aa keygen bob dummy,Nurse
STEP obj upload rec1 text:heart-rate dummy AND Doctor AND Cardio
STEP obj upload rec2 random:2048 dummy AND (Doctor OR Nurse)
STEP alice fetch rec1
STEP bob fetch rec2
STEP fog1 restart
STEP cloud1 restart
STEP obj delete rec1
STEP cloud1 restart
STEP obj verify rec1
STEP alice fetch rec1
STEP bob fetch rec2
)";

struct Dir {
  Dir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("cpad-accept-" + std::to_string(rd()) + std::to_string(rd()));
  }
  ~Dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path path;
};

std::map<std::string, Bytes> snapshot(const fs::path& root) {
  std::map<std::string, Bytes> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == ".lock") continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] =
        Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

int run_cli(const std::string& args, std::string& out) {
  FILE* pipe = ::popen(("'" CPAD_CLI_PATH "' " + args + " 2>&1").c_str(), "r");
  if (!pipe) return -1;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = ::pclose(pipe);
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome determinism_and_persistence() {
  std::vector<std::string> failures;
  Dir work;
  fs::create_directories(work.path);

  // Two in-process runs, each persisting to its own root.
  auto in_process = [&](const std::string& root) {
    fogsim::ScenarioOptions opts;
    opts.store_root = work.path / root;
    return fogsim::run_scenario(kScenario, 8008, opts);
  };
  const fogsim::TraceLog a = in_process("m1");
  const fogsim::TraceLog b = in_process("m2");
  if (a.digest() != b.digest() || a.export_text() != b.export_text()) failures.push_back("in-process traces differ");
  if (snapshot(work.path / "m1") != snapshot(work.path / "m2")) failures.push_back("in-process stores differ");

  // Two separate processes.
  const fs::path script = work.path / "scenario.txt";
  std::ofstream(script) << kScenario;
  std::string out1, out2;
  const int rc1 = run_cli("simulate --seed 8008 --script '" + script.string() + "' --store '" +
                              (work.path / "s1").string() + "' --trace '" + (work.path / "t1").string() + "'",
                          out1);
  const int rc2 = run_cli("simulate --seed 8008 --script '" + script.string() + "' --store '" +
                              (work.path / "s2").string() + "' --trace '" + (work.path / "t2").string() + "'",
                          out2);
  if (rc1 != 0 || rc2 != 0) failures.push_back("simulate exited " + std::to_string(rc1) + "/" + std::to_string(rc2));
  if (out1 != out2 || snapshot(work.path / "s1") != snapshot(work.path / "s2")) {
    failures.push_back("cross-process runs differ");
  }
  std::ifstream t1(work.path / "t1");
  const std::string t1_text((std::istreambuf_iterator<char>(t1)), std::istreambuf_iterator<char>());
  if (t1_text != a.export_text()) failures.push_back("exported trace differs across processes");
  if (snapshot(work.path / "s1") != snapshot(work.path / "m1")) failures.push_back("stores differ across processes");

  // Stores written by another process reload bit-exactly.
  std::size_t records = 0;
  try {
    const auto before = snapshot(work.path / "s1");
    FogStore fog(work.path / "s1" / "fog1");
    CloudStore cloud(work.path / "s1" / "cloud1");
    fog.check_hygiene();
    cloud.check_hygiene();
    for (const auto& [key, raw] : fog.raw()) {
      if (encode_record(*fog.get(Scalar::decode(key))) != raw) failures.push_back("fog record re-encodes differently");
      ++records;
    }
    for (const auto& [key, raw] : cloud.raw()) {
      if (encode_record(*cloud.get(Scalar::decode(key))) != raw) {
        failures.push_back("cloud record re-encodes differently");
      }
      ++records;
    }
    if (snapshot(work.path / "s1") != before) failures.push_back("reopening changed the store files");
  } catch (const std::exception& e) {
    failures.push_back(std::string("reload failed: ") + e.what());
  }
  if (records == 0) failures.push_back("no records persisted");

  return {failures.empty(), failures.empty() ? "identical digests in-process and across 2 processes; " +
                                                   std::to_string(records) + " persisted records reload bit-exactly"
                                             : failures.front()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"scheme correctness", scheme_correctness},
      {"LSSS oracle equivalence", lsss_equivalence},
      {"operation counts", operation_counts},
      {"deletion effectiveness", deletion_effectiveness},
      {"deletion verifiability", deletion_verifiability},
      {"collusion resistance", collusion_resistance},
      {"scaling shape", scaling_shape},
      {"determinism and persistence", determinism_and_persistence},
  };
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [criterion 1-" << criteria.size() << "]...\n";
      return 2;
    }
    selected[static_cast<std::size_t>(n - 1)] = true;
  }

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all &= o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  return all ? 0 : 1;
}
