#include "cpad/bench.hpp"

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <chrono>
#include <functional>
#include <memory>
#include <sstream>

#include "cpad/abe.hpp"
#include "cpad/deletion.hpp"
#include "cpad/error.hpp"
#include "cpad/payload.hpp"
#include "cpad/random.hpp"

namespace cpad::bench {
namespace {

std::vector<std::string> universe_for(std::size_t n) {
  std::vector<std::string> names{std::string(kDummyAttribute)};
  for (std::size_t i = 1; i < n; ++i) names.push_back("A" + std::to_string(i));
  return names;
}

std::string and_policy(std::span<const std::string> names) {
  std::string text;
  for (const auto& n : names) {
    if (!text.empty()) text += " AND ";
    text += n;
  }
  return text;
}

std::uint64_t time_once(const std::function<void()>& op) {
  const auto start = std::chrono::steady_clock::now();
  op();
  const auto stop = std::chrono::steady_clock::now();
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
}

// Trials run round-robin over the sizes so a burst of background load is
// spread across all of them instead of landing on one size.
std::vector<Row> measure_all(std::span<const std::size_t> sizes, std::span<const std::function<void()>> ops,
                             const Config& config) {
  std::vector<Row> rows(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    rows[i].size = sizes[i];
    rows[i].counts = counter_scope(ops[i]);
  }
  // Timed runs are not counted, so they carry no instrumentation cost.
  detail::SinkBinding silence(nullptr);
  for (std::size_t w = 0; w < config.warmup; ++w) {
    for (const auto& op : ops) op();
  }
  std::vector<std::vector<std::uint64_t>> samples(sizes.size());
  for (std::size_t t = 0; t < config.trials; ++t) {
    for (std::size_t i = 0; i < ops.size(); ++i) samples[i].push_back(time_once(ops[i]));
  }
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    std::sort(samples[i].begin(), samples[i].end());
    rows[i].median_ns = samples[i][samples[i].size() / 2];
    rows[i].min_ns = samples[i].front();
  }
  return rows;
}

}  // namespace

std::string_view mode_name(Mode mode) noexcept {
  switch (mode) {
    case Mode::Encrypt:
      return "encrypt";
    case Mode::Keygen:
      return "keygen";
    case Mode::Decrypt:
      return "decrypt";
    case Mode::Verify:
      return "verify";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  for (Mode m : {Mode::Encrypt, Mode::Keygen, Mode::Decrypt, Mode::Verify}) {
    if (text == mode_name(m)) return m;
  }
  throw Error(ErrorCode::SyntaxError, "unknown bench mode '" + std::string(text) + "'");
}

std::vector<std::size_t> default_sizes(Mode mode) {
  if (mode == Mode::Encrypt) return {10, 20, 30, 40, 50};
  return {2, 4, 6, 8, 10};
}

std::vector<Row> run(const Config& config) {
  if (config.sizes.empty()) throw Error(ErrorCode::SyntaxError, "no sizes to sweep");
  if (config.trials == 0) throw Error(ErrorCode::SyntaxError, "trials must be positive");
  if (std::find(config.sizes.begin(), config.sizes.end(), 0u) != config.sizes.end()) {
    throw Error(ErrorCode::SyntaxError, "sizes must be positive");
  }

  SeededRandom rng(config.seed);
  const std::size_t largest = *std::max_element(config.sizes.begin(), config.sizes.end());
  const std::vector<std::string> universe = universe_for(largest);
  SetupResult sys = setup(universe, rng);
  const PublicParams& pp = sys.pp;

  std::vector<std::function<void()>> ops;
  for (std::size_t size : config.sizes) {
    const std::span<const std::string> names(universe.data(), size);
    const AttributeSet attrs(names.begin(), names.end());
    switch (config.mode) {
      case Mode::Encrypt: {
        auto policy = std::make_shared<const AccessPolicy>(parse_policy(and_policy(names)));
        ops.emplace_back([&pp, &rng, &config, policy] { encapsulate(pp, *policy, rng, config.exec); });
        break;
      }
      case Mode::Keygen:
        ops.emplace_back([&sys, &pp, &rng, attrs] { keygen(sys.msk, pp, attrs, rng); });
        break;
      case Mode::Decrypt: {
        auto enc = std::make_shared<const Encapsulation>(
            encapsulate(pp, parse_policy(and_policy(names)), rng, config.exec));
        auto sk = std::make_shared<const UserSecretKey>(keygen(sys.msk, pp, attrs, rng));
        ops.emplace_back([&pp, &config, enc, sk] { decapsulate(enc->ct, *sk, pp, config.exec); });
        break;
      }
      case Mode::Verify: {
        const Encapsulation enc = encapsulate(pp, parse_policy(and_policy(names)), rng, config.exec);
        auto sk = std::make_shared<const UserSecretKey>(keygen(sys.msk, pp, attrs, rng));
        const SigningKeypair ssk = SigningKeypair::generate(rng);
        const SigningKeypair fsk = SigningKeypair::generate(rng);
        const Scalar fname = Scalar::random(rng);
        auto [req, state] = make_del_request(fname, make_tag(fname, enc.key), ssk, rng);
        auto res = std::make_shared<const ReencryptResult>(reencrypt(enc.ct, req, fsk, ssk.v, rng));
        auto st = std::make_shared<const ObjectDeletionState>(state);
        ops.emplace_back([&pp, &config, sk, res, st, fv = fsk.v, fname] {
          if (!verify_deletion(res->response, res->ct, *sk, *st, pp, fv, fname, config.exec)) {
            throw Error(ErrorCode::BadFogSignature, "benchmark fixture failed to verify");
          }
        });
        break;
      }
    }
  }
  const std::vector<Row> rows = measure_all(config.sizes, ops, config);
  return rows;
}

std::string format_report(std::span<const Row> rows) {
  std::ostringstream out;
  out << "size\tmedian_ns\texp_G\tmul_G\texp_GT\tmul_GT\tpairings\tmin_ns\n";
  for (const Row& r : rows) {
    out << r.size << '\t' << r.median_ns << '\t' << r.counts.exp_G << '\t' << r.counts.mul_G << '\t'
        << r.counts.exp_GT << '\t' << r.counts.mul_GT << '\t' << r.counts.pairings << '\t'
        << r.min_ns << '\n';
  }
  return out.str();
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::SyntaxError, "a linear fit needs at least two paired points");
  }
  LinearFit fit;
  double cov00 = 0, cov01 = 0, cov11 = 0, sumsq = 0;
  gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &fit.intercept, &fit.slope, &cov00, &cov01, &cov11, &sumsq);
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double total = 0;
  for (double v : y) total += (v - mean) * (v - mean);
  fit.r_squared = total == 0 ? 1.0 : 1.0 - sumsq / total;
  return fit;
}

LinearFit fit_rows(std::span<const Row> rows, Statistic stat) {
  std::vector<double> x;
  std::vector<double> y;
  for (const Row& r : rows) {
    x.push_back(static_cast<double>(r.size));
    y.push_back(static_cast<double>(stat == Statistic::Min ? r.min_ns : r.median_ns));
  }
  return fit_linear(x, y);
}

}  // namespace cpad::bench
