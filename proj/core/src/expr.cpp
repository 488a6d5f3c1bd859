#include "qe/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qe {

namespace {

constexpr int kMaxRootDenominator = 4;
constexpr long kMaxSumExpansionExponent = 32;

}  // namespace

struct Expr::Node {
  Kind kind = Kind::Number;
  Rational num;            // Number value or Power exponent
  std::string sym;         // Symbol name
  std::vector<Expr> ops;   // Sum/Product operands; Power: {base}; Func: {argument}
  Fn fn = Fn::Exp;
};

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
  }
  return "?";
}

Expr::Expr() {
  static const std::shared_ptr<const Node> zero = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->num = 0;
    return n;
  }();
  node_ = zero;
}

Kind Expr::kind() const { return node_->kind; }
const Rational& Expr::number_value() const { return node_->num; }
const std::string& Expr::symbol_name() const { return node_->sym; }
const std::vector<Expr>& Expr::operands() const { return node_->ops; }
const Expr& Expr::base() const { return node_->ops[0]; }
const Rational& Expr::exponent() const { return node_->num; }
Fn Expr::fn() const { return node_->fn; }
const Expr& Expr::arg() const { return node_->ops[0]; }

bool Expr::is_zero_literal() const {
  return kind() == Kind::Number && number_value() == 0;
}

bool Expr::is_one() const {
  return kind() == Kind::Number && number_value() == 1;
}

Expr Expr::number(Rational value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->num = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::integer(long value) { return number(Rational(value)); }

Expr Expr::symbol(std::string name) {
  if (name.empty()) throw ExprError("empty symbol name");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Symbol;
  n->sym = std::move(name);
  return Expr(std::move(n));
}

// ---------------------------------------------------------------------------
// total structural order

static int kind_rank(Kind k) {
  switch (k) {
    case Kind::Number: return 0;
    case Kind::Symbol: return 1;
    case Kind::Func: return 2;
    case Kind::Power: return 3;
    case Kind::Product: return 4;
    case Kind::Sum: return 5;
  }
  return 6;
}

static int cmp_rational(const Rational& a, const Rational& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int Expr::cmp(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  int ra = kind_rank(a.kind()), rb = kind_rank(b.kind());
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case Kind::Number:
      return cmp_rational(a.number_value(), b.number_value());
    case Kind::Symbol:
      return a.symbol_name().compare(b.symbol_name());
    case Kind::Func: {
      if (a.fn() != b.fn()) return static_cast<int>(a.fn()) < static_cast<int>(b.fn()) ? -1 : 1;
      return cmp(a.arg(), b.arg());
    }
    case Kind::Power: {
      int c = cmp(a.base(), b.base());
      if (c != 0) return c;
      return cmp_rational(a.exponent(), b.exponent());
    }
    case Kind::Product:
    case Kind::Sum: {
      const auto& oa = a.operands();
      const auto& ob = b.operands();
      if (oa.size() != ob.size()) return oa.size() < ob.size() ? -1 : 1;
      for (size_t i = 0; i < oa.size(); ++i) {
        int c = cmp(oa[i], ob[i]);
        if (c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

static int cmp_factor_vec(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = 0; i < a.size(); ++i) {
    int c = Expr::cmp(a[i], b[i]);
    if (c != 0) return c;
  }
  return 0;
}

struct FactorVecLess {
  bool operator()(const std::vector<Expr>& a, const std::vector<Expr>& b) const {
    return cmp_factor_vec(a, b) < 0;
  }
};

// ---------------------------------------------------------------------------
// canonicalizing constructors

void Expr::split_term(const Expr& term, Rational& coeff, std::vector<Expr>& factors) {
  coeff = 1;
  factors.clear();
  if (term.kind() == Kind::Number) {
    coeff = term.number_value();
    return;
  }
  if (term.kind() == Kind::Product) {
    const auto& ops = term.operands();
    size_t start = 0;
    if (!ops.empty() && ops[0].kind() == Kind::Number) {
      coeff = ops[0].number_value();
      start = 1;
    }
    factors.assign(ops.begin() + start, ops.end());
    return;
  }
  factors.push_back(term);
}

Expr Expr::make_term(const Rational& coeff, std::vector<Expr> factors) {
  if (coeff == 0) return Expr();
  if (factors.empty()) return number(coeff);
  if (coeff == 1 && factors.size() == 1) return factors[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  if (coeff != 1) n->ops.push_back(number(coeff));
  for (auto& f : factors) n->ops.push_back(std::move(f));
  if (n->ops.size() == 1) return n->ops[0];
  return Expr(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
  std::vector<Expr> flat;
  flat.reserve(terms.size());
  for (auto& t : terms) {
    if (t.kind() == Kind::Sum) {
      for (const auto& op : t.operands()) flat.push_back(op);
    } else {
      flat.push_back(std::move(t));
    }
  }
  Rational constant = 0;
  std::map<std::vector<Expr>, Rational, FactorVecLess> combined;
  Rational coeff;
  std::vector<Expr> factors;
  for (const auto& t : flat) {
    split_term(t, coeff, factors);
    if (coeff == 0) continue;
    if (factors.empty()) {
      constant += coeff;
    } else {
      combined[factors] += coeff;
    }
  }
  std::vector<Expr> out;
  for (auto& [key, c] : combined) {
    if (c == 0) continue;
    out.push_back(make_term(c, key));
  }
  if (constant != 0) out.push_back(number(constant));
  if (out.empty()) return Expr();
  if (out.size() == 1) return out[0];
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sum;
  n->ops = std::move(out);
  return Expr(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
  // Flatten nested products first.
  std::vector<Expr> flat;
  flat.reserve(factors.size());
  for (auto& f : factors) {
    if (f.kind() == Kind::Product) {
      for (const auto& op : f.operands()) flat.push_back(op);
    } else {
      flat.push_back(std::move(f));
    }
  }
  // Distribute over sums: a product with a Sum factor expands fully.
  bool has_sum = std::any_of(flat.begin(), flat.end(), [](const Expr& f) {
    return f.kind() == Kind::Sum;
  });
  if (has_sum) {
    std::vector<std::vector<Expr>> partials{{}};
    for (const auto& f : flat) {
      if (f.kind() == Kind::Sum) {
        std::vector<std::vector<Expr>> next;
        next.reserve(partials.size() * f.operands().size());
        for (const auto& p : partials) {
          for (const auto& term : f.operands()) {
            auto q = p;
            q.push_back(term);
            next.push_back(std::move(q));
          }
        }
        partials = std::move(next);
      } else {
        for (auto& p : partials) p.push_back(f);
      }
    }
    std::vector<Expr> terms;
    terms.reserve(partials.size());
    for (auto& p : partials) terms.push_back(mul(std::move(p)));
    return add(std::move(terms));
  }

  Rational coeff = 1;
  std::map<Expr, Rational, ExprLess> exponents;
  // Worklist so that powers folded back into products get re-flattened.
  std::vector<Expr> work(flat.rbegin(), flat.rend());
  while (!work.empty()) {
    Expr f = work.back();
    work.pop_back();
    switch (f.kind()) {
      case Kind::Number:
        coeff *= f.number_value();
        if (coeff == 0) return Expr();
        break;
      case Kind::Product:
        for (const auto& op : f.operands()) work.push_back(op);
        break;
      case Kind::Power:
        exponents[f.base()] += f.exponent();
        break;
      default:
        exponents[f] += 1;
        break;
    }
  }
  std::vector<Expr> out;
  for (const auto& [b, e] : exponents) {
    if (e == 0) continue;
    Expr p = pow(b, e);
    switch (p.kind()) {
      case Kind::Number:
        coeff *= p.number_value();
        break;
      case Kind::Product: {
        // e.g. (x*y)^2 distributed; merge with what we already have.
        std::vector<Expr> rest{p};
        for (const auto& o : out) rest.push_back(o);
        rest.push_back(number(coeff));
        return mul(std::move(rest));
      }
      case Kind::Sum: {
        std::vector<Expr> rest{p};
        for (const auto& o : out) rest.push_back(o);
        rest.push_back(number(coeff));
        return mul(std::move(rest));
      }
      default:
        out.push_back(p);
        break;
    }
  }
  if (coeff == 0) return Expr();
  std::sort(out.begin(), out.end(), ExprLess{});
  return make_term(coeff, std::move(out));
}

Rational rational_pow(const Rational& base, const Integer& exponent) {
  if (exponent == 0) return Rational(1);
  Integer n = boost::multiprecision::numerator(base);
  Integer d = boost::multiprecision::denominator(base);
  Integer e = exponent < 0 ? Integer(-exponent) : exponent;
  Integer np = 1, dp = 1;
  for (Integer i = 0; i < e; ++i) {
    np *= n;
    dp *= d;
  }
  if (exponent < 0) {
    if (np == 0) throw ExprError("zero raised to a negative power");
    if (np < 0) {  // keep the denominator positive; cpp_rational insists
      np = -np;
      dp = -dp;
    }
    return Rational(dp, np);
  }
  return Rational(np, dp);
}

// Exact integer q-th root, or false.
static bool integer_root(const Integer& v, unsigned q, Integer& out) {
  if (v < 0) return false;
  if (v == 0 || v == 1) {
    out = v;
    return true;
  }
  Integer lo = 1, hi = v;
  while (lo <= hi) {
    Integer mid = (lo + hi) / 2;
    Integer p = 1;
    for (unsigned i = 0; i < q; ++i) p *= mid;
    if (p == v) {
      out = mid;
      return true;
    }
    if (p < v) lo = mid + 1;
    else hi = mid - 1;
  }
  return false;
}

Expr Expr::pow(const Expr& b, const Rational& e) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (e == 0) return integer(1);
  if (e == 1) return b;
  const Integer ed = denominator(e);
  if (ed > kMaxRootDenominator) {
    throw ExprError("rational exponent denominator exceeds " +
                    std::to_string(kMaxRootDenominator));
  }
  const bool int_exp = ed == 1;
  if (b.kind() == Kind::Number) {
    const Rational& v = b.number_value();
    if (v == 0) {
      if (e < 0) throw ExprError("zero raised to a negative power");
      return Expr();
    }
    if (v == 1) return integer(1);
    if (int_exp) return number(rational_pow(v, numerator(e)));
    // Try an exact q-th root of a nonnegative rational.
    if (v > 0) {
      Integer rn, rd;
      unsigned q = ed.convert_to<unsigned>();
      if (integer_root(numerator(v), q, rn) && integer_root(denominator(v), q, rd)) {
        return number(rational_pow(Rational(rn, rd), numerator(e)));
      }
    }
  } else if (b.kind() == Kind::Power) {
    if (int_exp) return pow(b.base(), b.exponent() * e);
    // keep nested: (x^2)^(1/2) is not x in general
  } else if (b.kind() == Kind::Product && int_exp) {
    std::vector<Expr> fs;
    for (const auto& op : b.operands()) fs.push_back(pow(op, e));
    return mul(std::move(fs));
  } else if (b.kind() == Kind::Sum && int_exp && e > 1 &&
             numerator(e) <= kMaxSumExpansionExponent) {
    long n = numerator(e).convert_to<long>();
    Expr acc = b;
    for (long i = 1; i < n; ++i) acc = mul({acc, b});
    return acc;
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->ops.push_back(b);
  n->num = e;
  return Expr(std::move(n));
}

Expr Expr::call(Fn f, const Expr& a) {
  if (a.kind() == Kind::Number) {
    const Rational& v = a.number_value();
    if (v == 0) {
      switch (f) {
        case Fn::Exp: return integer(1);
        case Fn::Sin: return Expr();
        case Fn::Cos: return integer(1);
        case Fn::Log: throw ExprError("log of zero");
      }
    }
    if (v == 1 && f == Fn::Log) return Expr();
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Func;
  n->fn = f;
  n->ops.push_back(a);
  return Expr(std::move(n));
}

Expr Expr::sqrt(const Expr& a) { return pow(a, Rational(1, 2)); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) {
  return Expr::add({a, Expr::mul({Expr::integer(-1), b})});
}
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  return Expr::mul({a, Expr::pow(b, Rational(-1))});
}
Expr operator-(const Expr& a) { return Expr::mul({Expr::integer(-1), a}); }

// ---------------------------------------------------------------------------
// differentiation

Expr Expr::diff(const std::string& s) const {
  switch (kind()) {
    case Kind::Number:
      return Expr();
    case Kind::Symbol:
      return symbol_name() == s ? integer(1) : Expr();
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& op : operands()) terms.push_back(op.diff(s));
      return add(std::move(terms));
    }
    case Kind::Product: {
      const auto& ops = operands();
      std::vector<Expr> terms;
      for (size_t i = 0; i < ops.size(); ++i) {
        if (ops[i].kind() == Kind::Number) continue;
        std::vector<Expr> fs;
        for (size_t j = 0; j < ops.size(); ++j) {
          fs.push_back(j == i ? ops[i].diff(s) : ops[j]);
        }
        terms.push_back(mul(std::move(fs)));
      }
      return add(std::move(terms));
    }
    case Kind::Power: {
      // d(b^e) = e * b^(e-1) * b'
      return mul({number(exponent()), pow(base(), exponent() - 1), base().diff(s)});
    }
    case Kind::Func: {
      Expr da = arg().diff(s);
      switch (fn()) {
        case Fn::Exp: return mul({*this, da});
        case Fn::Log: return mul({da, pow(arg(), Rational(-1))});
        case Fn::Sin: return mul({call(Fn::Cos, arg()), da});
        case Fn::Cos: return mul({integer(-1), call(Fn::Sin, arg()), da});
      }
      throw ExprError("unknown function node");
    }
  }
  throw ExprError("unknown node kind");
}

// ---------------------------------------------------------------------------
// substitution / evaluation

Expr Expr::substitute(const std::map<std::string, Expr>& bindings) const {
  switch (kind()) {
    case Kind::Number:
      return *this;
    case Kind::Symbol: {
      auto it = bindings.find(symbol_name());
      return it == bindings.end() ? *this : it->second;
    }
    case Kind::Sum: {
      std::vector<Expr> ops;
      for (const auto& op : operands()) ops.push_back(op.substitute(bindings));
      return add(std::move(ops));
    }
    case Kind::Product: {
      std::vector<Expr> ops;
      for (const auto& op : operands()) ops.push_back(op.substitute(bindings));
      return mul(std::move(ops));
    }
    case Kind::Power:
      return pow(base().substitute(bindings), exponent());
    case Kind::Func:
      return call(fn(), arg().substitute(bindings));
  }
  throw ExprError("unknown node kind");
}

static double rational_to_double(const Rational& r) {
  return r.convert_to<double>();
}

static double eval_impl(const Expr& e, const NumericPoint& p, double& maxmag) {
  double v = 0;
  switch (e.kind()) {
    case Kind::Number:
      v = rational_to_double(e.number_value());
      break;
    case Kind::Symbol: {
      auto it = p.find(e.symbol_name());
      if (it == p.end()) throw EvalError("unbound symbol: " + e.symbol_name());
      v = it->second;
      break;
    }
    case Kind::Sum: {
      for (const auto& op : e.operands()) v += eval_impl(op, p, maxmag);
      break;
    }
    case Kind::Product: {
      v = 1;
      for (const auto& op : e.operands()) v *= eval_impl(op, p, maxmag);
      break;
    }
    case Kind::Power: {
      double b = eval_impl(e.base(), p, maxmag);
      const Rational& ex = e.exponent();
      double xd = rational_to_double(ex);
      if (boost::multiprecision::denominator(ex) == 1) {
        if (b == 0 && ex < 0) throw EvalError("zero raised to a negative power");
        v = std::pow(b, xd);
      } else {
        if (b < 0) throw EvalError("fractional power of a negative base");
        if (b == 0 && ex < 0) throw EvalError("zero raised to a negative power");
        v = std::pow(b, xd);
      }
      break;
    }
    case Kind::Func: {
      double a = eval_impl(e.arg(), p, maxmag);
      switch (e.fn()) {
        case Fn::Exp: v = std::exp(a); break;
        case Fn::Log:
          if (a <= 0) throw EvalError("log of a non-positive value");
          v = std::log(a);
          break;
        case Fn::Sin: v = std::sin(a); break;
        case Fn::Cos: v = std::cos(a); break;
      }
      break;
    }
  }
  if (!std::isfinite(v)) throw EvalError("non-finite intermediate value");
  maxmag = std::max(maxmag, std::abs(v));
  return v;
}

double Expr::eval(const NumericPoint& point, double* max_magnitude) const {
  double mag = 0;
  double v = eval_impl(*this, point, mag);
  if (max_magnitude) *max_magnitude = std::max(*max_magnitude, mag);
  return v;
}

void Expr::free_symbols(std::set<std::string>& out) const {
  switch (kind()) {
    case Kind::Number:
      return;
    case Kind::Symbol:
      out.insert(symbol_name());
      return;
    default:
      for (const auto& op : operands()) op.free_symbols(out);
  }
}

std::set<std::string> Expr::free_symbols() const {
  std::set<std::string> s;
  free_symbols(s);
  return s;
}

bool Expr::depends_on(const std::string& s) const {
  switch (kind()) {
    case Kind::Number:
      return false;
    case Kind::Symbol:
      return symbol_name() == s;
    default:
      for (const auto& op : operands()) {
        if (op.depends_on(s)) return true;
      }
      return false;
  }
}

bool Expr::rational_class() const {
  switch (kind()) {
    case Kind::Number:
    case Kind::Symbol:
      return true;
    case Kind::Func:
      return false;
    case Kind::Power:
      if (boost::multiprecision::denominator(exponent()) != 1) return false;
      return base().rational_class();
    default:
      for (const auto& op : operands()) {
        if (!op.rational_class()) return false;
      }
      return true;
  }
}

// ---------------------------------------------------------------------------
// fraction normal form

std::pair<Expr, Expr> as_fraction(const Expr& e) {
  switch (e.kind()) {
    case Kind::Number:
    case Kind::Symbol:
    case Kind::Func:
      return {e, Expr::integer(1)};
    case Kind::Power: {
      if (e.exponent() < 0) {
        return {Expr::integer(1), Expr::pow(e.base(), -e.exponent())};
      }
      return {e, Expr::integer(1)};
    }
    case Kind::Product: {
      Expr num = Expr::integer(1), den = Expr::integer(1);
      for (const auto& op : e.operands()) {
        auto [n, d] = as_fraction(op);
        num = num * n;
        den = den * d;
      }
      return {num, den};
    }
    case Kind::Sum: {
      // num = sum_i n_i * prod_{j!=i} d_j over den = prod_j d_j
      std::vector<Expr> nums, dens;
      for (const auto& op : e.operands()) {
        auto [n, d] = as_fraction(op);
        nums.push_back(n);
        dens.push_back(d);
      }
      std::vector<Expr> terms;
      for (size_t i = 0; i < nums.size(); ++i) {
        std::vector<Expr> fs{nums[i]};
        for (size_t j = 0; j < dens.size(); ++j) {
          if (j != i) fs.push_back(dens[j]);
        }
        terms.push_back(Expr::mul(std::move(fs)));
      }
      return {Expr::add(std::move(terms)), Expr::mul(std::move(dens))};
    }
  }
  throw ExprError("unknown node kind");
}

// ---------------------------------------------------------------------------
// printing

static void print(const Expr& e, std::ostream& os, int parent_prec);

static void print_rational(const Rational& r, std::ostream& os) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) {
    os << numerator(r);
  } else {
    os << numerator(r) << "/" << denominator(r);
  }
}

// precedence levels: 0 sum, 1 product, 2 unary minus, 3 power, 4 atom
static int precedence(const Expr& e) {
  switch (e.kind()) {
    case Kind::Sum: return 0;
    case Kind::Product: return 1;
    case Kind::Power: return 3;
    case Kind::Number:
      return e.number_value() < 0 ? 2
             : boost::multiprecision::denominator(e.number_value()) != 1 ? 1
                                                                         : 4;
    default: return 4;
  }
}

static void print(const Expr& e, std::ostream& os, int parent_prec) {
  int prec = precedence(e);
  bool parens = prec < parent_prec;
  if (parens) os << "(";
  switch (e.kind()) {
    case Kind::Number:
      print_rational(e.number_value(), os);
      break;
    case Kind::Symbol:
      os << e.symbol_name();
      break;
    case Kind::Sum: {
      bool first = true;
      for (const auto& op : e.operands()) {
        // pull a negative coefficient out for "a - b" printing
        bool negated = false;
        Expr positive = op;
        if (op.kind() == Kind::Number && op.number_value() < 0) {
          negated = true;
          positive = Expr::number(-op.number_value());
        } else if (op.kind() == Kind::Product &&
                   op.operands()[0].kind() == Kind::Number &&
                   op.operands()[0].number_value() < 0) {
          negated = true;
          std::vector<Expr> rest(op.operands().begin(), op.operands().end());
          rest[0] = Expr::number(-rest[0].number_value());
          positive = Expr::mul(std::move(rest));
        }
        if (!first) {
          os << (negated ? " - " : " + ");
        } else if (negated) {
          os << "-";
        }
        print(positive, os, 1);
        first = false;
      }
      break;
    }
    case Kind::Product: {
      bool first = true;
      for (const auto& op : e.operands()) {
        if (!first) os << "*";
        print(op, os, 2);
        first = false;
      }
      break;
    }
    case Kind::Power: {
      print(e.base(), os, 4);
      os << "^";
      const Rational& ex = e.exponent();
      if (ex < 0 || boost::multiprecision::denominator(ex) != 1) {
        os << "(";
        print_rational(ex, os);
        os << ")";
      } else {
        print_rational(ex, os);
      }
      break;
    }
    case Kind::Func:
      os << fn_name(e.fn()) << "(";
      print(e.arg(), os, 0);
      os << ")";
      break;
  }
  if (parens) os << ")";
}

std::string Expr::str() const {
  std::ostringstream os;
  print(*this, os, 0);
  return os.str();
}

}  // namespace qe
