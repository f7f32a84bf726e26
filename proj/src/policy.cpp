#include "cpad/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

#include "cpad/error.hpp"

namespace cpad {

PolicyNode PolicyNode::leaf(std::string name) {
  PolicyNode n;
  n.kind = Kind::Leaf;
  n.attr = std::move(name);
  return n;
}

PolicyNode PolicyNode::all_of(std::vector<PolicyNode> children) {
  PolicyNode n;
  n.kind = Kind::And;
  n.children = std::move(children);
  return n;
}

PolicyNode PolicyNode::any_of(std::vector<PolicyNode> children) {
  PolicyNode n;
  n.kind = Kind::Or;
  n.children = std::move(children);
  return n;
}

namespace {

void collect_leaves(const PolicyNode& n, std::vector<std::string>& out) {
  if (n.kind == PolicyNode::Kind::Leaf) {
    out.push_back(n.attr);
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

bool evaluate(const PolicyNode& n, const AttributeSet& attrs) {
  switch (n.kind) {
    case PolicyNode::Kind::Leaf:
      return attrs.count(n.attr) != 0;
    case PolicyNode::Kind::And:
      return std::all_of(n.children.begin(), n.children.end(),
                         [&](const PolicyNode& c) { return evaluate(c, attrs); });
    case PolicyNode::Kind::Or:
      return std::any_of(n.children.begin(), n.children.end(),
                         [&](const PolicyNode& c) { return evaluate(c, attrs); });
  }
  return false;
}

// ---------------------------------------------------------------------------
// Parser

struct Token {
  enum class Kind { Attr, And, Or, Not, LParen, RParen, End };
  Kind kind;
  std::string_view text;
  std::size_t offset;
};

bool attr_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool attr_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-';
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::toupper(static_cast<unsigned char>(x)) == y;
         });
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { advance(); }

  PolicyNode parse() {
    if (current_.kind == Token::Kind::End) {
      throw Error(ErrorCode::EmptyPolicy, "policy text is empty");
    }
    PolicyNode root = expr();
    if (current_.kind != Token::Kind::End) fail("unexpected token after end of expression");
    return root;
  }

 private:
  PolicyNode expr() {
    std::vector<PolicyNode> terms;
    terms.push_back(term());
    while (current_.kind == Token::Kind::Or) {
      advance();
      terms.push_back(term());
    }
    return terms.size() == 1 ? std::move(terms.front()) : PolicyNode::any_of(std::move(terms));
  }

  PolicyNode term() {
    std::vector<PolicyNode> factors;
    factors.push_back(factor());
    while (current_.kind == Token::Kind::And) {
      advance();
      factors.push_back(factor());
    }
    return factors.size() == 1 ? std::move(factors.front())
                               : PolicyNode::all_of(std::move(factors));
  }

  PolicyNode factor() {
    switch (current_.kind) {
      case Token::Kind::Attr: {
        PolicyNode n = PolicyNode::leaf(std::string(current_.text));
        advance();
        return n;
      }
      case Token::Kind::LParen: {
        advance();
        PolicyNode n = expr();
        if (current_.kind != Token::Kind::RParen) fail("expected ')'");
        advance();
        return n;
      }
      case Token::Kind::Not:
        throw Error(ErrorCode::NonMonotonePolicy,
                    "negation at byte " + std::to_string(current_.offset) +
                        " is not allowed in a monotone policy");
      case Token::Kind::End:
        fail("unexpected end of policy");
      default:
        fail("expected attribute or '('");
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(current_.offset, what); }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == text_.size()) {
      current_ = {Token::Kind::End, {}, pos_};
      return;
    }
    const std::size_t start = pos_;
    const char c = text_[pos_];
    if (c == '(' || c == ')') {
      ++pos_;
      current_ = {c == '(' ? Token::Kind::LParen : Token::Kind::RParen, text_.substr(start, 1), start};
      return;
    }
    if (!attr_start(c)) throw SyntaxError(start, std::string("unexpected character '") + c + "'");
    while (pos_ < text_.size() && attr_char(text_[pos_])) ++pos_;
    const std::string_view word = text_.substr(start, pos_ - start);
    Token::Kind kind = Token::Kind::Attr;
    if (iequals(word, "AND")) kind = Token::Kind::And;
    else if (iequals(word, "OR")) kind = Token::Kind::Or;
    else if (iequals(word, "NOT")) kind = Token::Kind::Not;
    current_ = {kind, word, start};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_{Token::Kind::End, {}, 0};
};

void print(const PolicyNode& n, PolicyNode::Kind parent, bool top, std::string& out) {
  if (n.kind == PolicyNode::Kind::Leaf) {
    out += n.attr;
    return;
  }
  // A nested gate needs parentheses unless it is an AND directly under an OR.
  const bool parens = !top && !(parent == PolicyNode::Kind::Or && n.kind == PolicyNode::Kind::And);
  if (parens) out += '(';
  const char* sep = n.kind == PolicyNode::Kind::And ? " AND " : " OR ";
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) out += sep;
    print(n.children[i], n.kind, false, out);
  }
  if (parens) out += ')';
}

// ---------------------------------------------------------------------------
// Lewko-Waters labelling

using IntVec = std::vector<std::int64_t>;

struct Labeller {
  std::vector<IntVec> rows;
  std::vector<std::string> rho;
  std::size_t counter = 1;

  void label(const PolicyNode& n, IntVec v) {
    switch (n.kind) {
      case PolicyNode::Kind::Leaf:
        if (n.attr.empty()) throw Error(ErrorCode::NonMonotonePolicy, "leaf without attribute");
        rows.push_back(std::move(v));
        rho.push_back(n.attr);
        return;
      case PolicyNode::Kind::Or:
        if (n.children.empty()) throw Error(ErrorCode::NonMonotonePolicy, "OR gate without inputs");
        for (const auto& c : n.children) label(c, v);
        return;
      case PolicyNode::Kind::And: {
        if (n.children.empty()) throw Error(ErrorCode::NonMonotonePolicy, "AND gate without inputs");
        // k-ary AND is the right fold of binary ANDs: the left input gets
        // v||1, the right input gets (0,...,0,-1), and the counter grows.
        IntVec current = std::move(v);
        for (std::size_t j = 0; j + 1 < n.children.size(); ++j) {
          IntVec left = current;
          left.resize(counter, 0);
          left.push_back(1);
          IntVec right(counter, 0);
          right.push_back(-1);
          ++counter;
          label(n.children[j], std::move(left));
          current = std::move(right);
        }
        label(n.children.back(), std::move(current));
        return;
      }
    }
  }
};

}  // namespace

std::vector<std::string> AccessPolicy::leaves() const {
  std::vector<std::string> out;
  collect_leaves(root, out);
  return out;
}

bool AccessPolicy::satisfied_by(const AttributeSet& attrs) const { return evaluate(root, attrs); }

AccessPolicy parse_policy(std::string_view text) { return AccessPolicy{Parser(text).parse()}; }

std::string to_string(const AccessPolicy& policy) {
  std::string out;
  print(policy.root, policy.root.kind, true, out);
  return out;
}

void LsssProgram::validate() const {
  if (matrix.empty()) throw Error(ErrorCode::InvalidEncoding, "LSSS program has no rows");
  if (rho.size() != matrix.size()) {
    throw Error(ErrorCode::InvalidEncoding, "rho does not label every row");
  }
  const std::size_t n = cols();
  if (n == 0) throw Error(ErrorCode::InvalidEncoding, "LSSS program has no columns");
  for (const auto& row : matrix) {
    if (row.size() != n) throw Error(ErrorCode::InvalidEncoding, "ragged LSSS matrix");
  }
  for (const auto& a : rho) {
    if (a.empty()) throw Error(ErrorCode::InvalidEncoding, "empty attribute label");
  }
}

LsssProgram compile_lsss(const AccessPolicy& policy) {
  Labeller lab;
  lab.label(policy.root, IntVec{1});
  const std::size_t n = lab.counter;
  LsssProgram prog;
  prog.rho = std::move(lab.rho);
  prog.matrix.reserve(lab.rows.size());
  for (auto& r : lab.rows) {
    r.resize(n, 0);
    std::vector<Scalar> row;
    row.reserve(n);
    for (auto x : r) row.push_back(Scalar::from_int(x));
    prog.matrix.push_back(std::move(row));
  }
  return prog;
}

ShareVector make_shares(const LsssProgram& prog, const Scalar& secret, RandomSource& rng) {
  ShareVector out;
  out.secret_vec.reserve(prog.cols());
  out.secret_vec.push_back(secret);
  for (std::size_t j = 1; j < prog.cols(); ++j) out.secret_vec.push_back(Scalar::random(rng));
  out.lambda.reserve(prog.rows());
  for (const auto& row : prog.matrix) {
    Scalar acc;
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * out.secret_vec[j];
    out.lambda.push_back(acc);
  }
  return out;
}

std::optional<ReconstructionPlan> try_find_reconstruction(const LsssProgram& prog,
                                                          const AttributeSet& attrs) {
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < prog.rows(); ++i) {
    if (attrs.count(prog.rho[i])) selected.push_back(i);
  }
  if (selected.empty()) return std::nullopt;

  // Solve M_I^T omega = e_1: one equation per column of M, one unknown per
  // selected row, last column is the right-hand side.
  const std::size_t n = prog.cols();
  const std::size_t k = selected.size();
  std::vector<std::vector<Scalar>> sys(n, std::vector<Scalar>(k + 1));
  for (std::size_t eq = 0; eq < n; ++eq) {
    for (std::size_t u = 0; u < k; ++u) sys[eq][u] = prog.matrix[selected[u]][eq];
  }
  sys[0][k] = Scalar::one();

  std::vector<std::size_t> pivot_eq_of(k, SIZE_MAX);
  std::size_t next = 0;
  for (std::size_t u = 0; u < k && next < n; ++u) {
    std::size_t r = next;
    while (r < n && sys[r][u].is_zero()) ++r;
    if (r == n) continue;
    std::swap(sys[r], sys[next]);
    const Scalar inv = sys[next][u].inverse();
    for (auto& x : sys[next]) x *= inv;
    for (std::size_t e = 0; e < n; ++e) {
      if (e == next || sys[e][u].is_zero()) continue;
      const Scalar f = sys[e][u];
      for (std::size_t c = u; c <= k; ++c) sys[e][c] = sys[e][c] - f * sys[next][c];
    }
    pivot_eq_of[u] = next++;
  }
  for (std::size_t e = next; e < n; ++e) {
    if (!sys[e][k].is_zero()) return std::nullopt;
  }

  ReconstructionPlan plan;
  for (std::size_t u = 0; u < k; ++u) {
    if (pivot_eq_of[u] == SIZE_MAX) continue;  // free unknown, fixed to zero
    const Scalar w = sys[pivot_eq_of[u]][k];
    if (w.is_zero()) continue;
    plan.rows.push_back(selected[u]);
    plan.omega.push_back(w);
  }
  return plan;
}

ReconstructionPlan find_reconstruction(const LsssProgram& prog, const AttributeSet& attrs) {
  auto plan = try_find_reconstruction(prog, attrs);
  if (!plan) throw Error(ErrorCode::NotAuthorized, "attributes do not satisfy the access policy");
  return std::move(*plan);
}

}  // namespace cpad
