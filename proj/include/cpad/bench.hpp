#pragma once

// Timing and operation-count sweeps over the main algorithms.
//
//   encrypt: policy dummy AND A1 AND ... with l leaves, timing encapsulate
//   keygen:  s attributes (dummy plus s-1 others)
//   decrypt: s-leaf AND policy, key holding exactly those s attributes
//   verify:  same shape as decrypt, timing the full verify_deletion

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cpad/group.hpp"
#include "cpad/kernels.hpp"

namespace cpad::bench {

enum class Mode { Encrypt, Keygen, Decrypt, Verify };

std::string_view mode_name(Mode mode) noexcept;
/// Throws Error(SyntaxError) for anything but encrypt, keygen, decrypt, verify.
Mode parse_mode(std::string_view text);
/// {10,20,30,40,50} for encrypt, {2,4,6,8,10} otherwise.
std::vector<std::size_t> default_sizes(Mode mode);

struct Config {
  Mode mode = Mode::Encrypt;
  std::vector<std::size_t> sizes;
  std::size_t trials = 5;
  std::size_t warmup = 1;
  Exec exec = Exec::Parallel;
  std::uint64_t seed = 1;
};

struct Row {
  std::size_t size = 0;
  std::uint64_t median_ns = 0;
  std::uint64_t min_ns = 0;
  OpCounter counts;  // from one instrumented run
};

/// Throws Error(SyntaxError) on an empty size list, a zero size or zero trials.
std::vector<Row> run(const Config& config);

/// Header line plus one tab-separated line per row:
/// size, median_ns, exp_G, mul_G, exp_GT, mul_GT, pairings, min_ns.
std::string format_report(std::span<const Row> rows);

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs at least two
/// points; a constant y fits with r_squared = 1.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

enum class Statistic { Median, Min };

/// fit_linear over (size, median_ns) or (size, min_ns).
LinearFit fit_rows(std::span<const Row> rows, Statistic stat = Statistic::Median);

}  // namespace cpad::bench
