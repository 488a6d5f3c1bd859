#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace qe {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Coordinate/parameter bindings for numeric evaluation.
using NumericPoint = std::map<std::string, double>;

enum class Kind { Number, Symbol, Sum, Product, Power, Func };
enum class Fn { Exp, Log, Sin, Cos };

const char* fn_name(Fn f);

/// Structural problem while building or manipulating an expression
/// (division by zero, unsupported exponent, non-rational power, ...).
struct ExprError : std::runtime_error {
  explicit ExprError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric evaluation failure: unbound symbol or domain error.
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Immutable symbolic expression over named symbols with exact rational
/// constants. Construction is canonicalizing: sums and products are
/// flattened, constants folded, like terms combined and ordered, and
/// positive integer powers of sums expanded. A polynomial over the
/// rationals is therefore the literal constant 0 exactly when it is
/// identically zero.
class Expr {
 public:
  Expr();  // the zero constant

  static Expr number(Rational value);
  static Expr integer(long value);
  static Expr symbol(std::string name);
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr pow(const Expr& base, const Rational& exponent);
  static Expr call(Fn f, const Expr& argument);
  static Expr sqrt(const Expr& argument);  // pow(argument, 1/2)

  Kind kind() const;
  const Rational& number_value() const;  // Number
  const std::string& symbol_name() const;
  const std::vector<Expr>& operands() const;  // Sum / Product
  const Expr& base() const;                   // Power
  const Rational& exponent() const;           // Power
  Fn fn() const;                              // Func
  const Expr& arg() const;                    // Func

  bool is_number() const { return kind() == Kind::Number; }
  bool is_zero_literal() const;
  bool is_one() const;

  /// Partial derivative with respect to a symbol; exact and closed in
  /// the expression grammar.
  Expr diff(const std::string& symbol) const;

  Expr substitute(const std::map<std::string, Expr>& bindings) const;

  /// IEEE double evaluation. `max_magnitude`, when given, accumulates
  /// the largest absolute value seen at any subexpression.
  double eval(const NumericPoint& point, double* max_magnitude = nullptr) const;

  void free_symbols(std::set<std::string>& out) const;
  std::set<std::string> free_symbols() const;
  bool depends_on(const std::string& symbol) const;

  /// True when the expression contains no transcendental nodes and all
  /// exponents are integers, so exact zero-testing applies.
  bool rational_class() const;

  std::string str() const;

  static int cmp(const Expr& a, const Expr& b);
  friend bool operator==(const Expr& a, const Expr& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Expr& a, const Expr& b) { return cmp(a, b) != 0; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  static Expr make_term(const Rational& coeff, std::vector<Expr> factors);
  static void split_term(const Expr& term, Rational& coeff, std::vector<Expr>& factors);
};

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return Expr::cmp(a, b) < 0; }
};

/// Writes a rational-class expression as numerator/denominator of
/// expanded polynomial expressions. Zero-testing reduces to testing the
/// numerator.
std::pair<Expr, Expr> as_fraction(const Expr& e);

Rational rational_pow(const Rational& base, const Integer& exponent);

}  // namespace qe
