#pragma once

// Monotone attribute formulas and their linear secret sharing programs.
//
// Grammar (keywords case-insensitive, AND binds tighter than OR):
//   expr   := term ("OR" term)*
//   term   := factor ("AND" factor)*
//   factor := ATTR | "(" expr ")"
//   ATTR   := [A-Za-z_][A-Za-z0-9_:-]*

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cpad/group.hpp"

namespace cpad {

using AttributeSet = std::set<std::string>;

inline constexpr std::string_view kDummyAttribute = "dummy";

struct PolicyNode {
  enum class Kind { Leaf, And, Or };

  Kind kind = Kind::Leaf;
  std::string attr;                 // leaves only
  std::vector<PolicyNode> children; // gates only

  static PolicyNode leaf(std::string name);
  static PolicyNode all_of(std::vector<PolicyNode> children);
  static PolicyNode any_of(std::vector<PolicyNode> children);

  friend bool operator==(const PolicyNode&, const PolicyNode&) = default;
};

struct AccessPolicy {
  PolicyNode root;

  /// Leaf attributes in left-to-right order; repeats are kept.
  std::vector<std::string> leaves() const;
  bool satisfied_by(const AttributeSet& attrs) const;

  friend bool operator==(const AccessPolicy&, const AccessPolicy&) = default;
};

/// Throws SyntaxError (with byte offset), Error(EmptyPolicy), or
/// Error(NonMonotonePolicy) when the text uses NOT.
AccessPolicy parse_policy(std::string_view text);

/// Canonical text: uppercase keywords, single spaces, parentheses only where
/// the tree shape needs them. parse_policy(to_string(p)) == p.
std::string to_string(const AccessPolicy& policy);

/// Share-generating matrix M (l x n) with row labelling rho.
struct LsssProgram {
  std::vector<std::vector<Scalar>> matrix;
  std::vector<std::string> rho;

  std::size_t rows() const { return matrix.size(); }
  std::size_t cols() const { return matrix.empty() ? 0 : matrix.front().size(); }

  /// Throws Error(InvalidEncoding) when dimensions are inconsistent.
  void validate() const;

  friend bool operator==(const LsssProgram&, const LsssProgram&) = default;
};

/// Lewko-Waters vector labelling. Throws Error(NonMonotonePolicy) on malformed trees.
LsssProgram compile_lsss(const AccessPolicy& policy);

struct ShareVector {
  std::vector<Scalar> lambda;      // lambda_i = M_i . v
  std::vector<Scalar> secret_vec;  // v = (s, y_2, ..., y_n)
};

ShareVector make_shares(const LsssProgram& prog, const Scalar& secret, RandomSource& rng);

/// Rows I and coefficients omega with sum_i omega_i M_i = (1, 0, ..., 0).
/// Only rows with non-zero omega are listed, in ascending order.
struct ReconstructionPlan {
  std::vector<std::size_t> rows;
  std::vector<Scalar> omega;
};

/// Gaussian elimination over Z_p on the rows whose attribute is in `attrs`,
/// pivoting on the lowest row index first. Returns nullopt when the target
/// vector is outside their span.
std::optional<ReconstructionPlan> try_find_reconstruction(const LsssProgram& prog,
                                                          const AttributeSet& attrs);

/// As above but throws Error(NotAuthorized).
ReconstructionPlan find_reconstruction(const LsssProgram& prog, const AttributeSet& attrs);

}  // namespace cpad
