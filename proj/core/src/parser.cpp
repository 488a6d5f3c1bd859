#include "qe/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace qe {

int Chart::index_of(const std::string& name) const {
  auto it = std::find(coords.begin(), coords.end(), name);
  return it == coords.end() ? -1 : static_cast<int>(it - coords.begin());
}

Expr MetricDocument::resolve(const Expr& e) const {
  if (params.empty()) return e;
  std::map<std::string, Expr> bindings;
  for (const auto& [name, value] : params) bindings[name] = Expr::number(value);
  return e.substitute(bindings);
}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  Rational value;  // Number
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(tok_.line, tok_.col, msg);
  }

 private:
  void advance() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) bump();
      if (pos_ < src_.size() && src_[pos_] == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
        continue;
      }
      break;
    }
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Tok::End, "", 0, line_, col_};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        id += src_[pos_];
        bump();
      }
      tok_ = {Tok::Ident, id, 0, tok_.line, tok_.col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits += src_[pos_];
        bump();
      }
      Rational v{Integer(digits)};
      if (pos_ < src_.size() && src_[pos_] == '.') {
        bump();
        std::string frac;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          frac += src_[pos_];
          bump();
        }
        if (frac.empty()) throw ParseError(line_, col_, "digits expected after decimal point");
        Integer scale = 1;
        for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
        v += Rational(Integer(frac), scale);
      }
      tok_ = {Tok::Number, digits, v, tok_.line, tok_.col};
      return;
    }
    static const std::string punct = ";[]()=^*/+-,";
    if (punct.find(c) != std::string::npos) {
      bump();
      tok_ = {Tok::Punct, std::string(1, c), 0, tok_.line, tok_.col};
      return;
    }
    throw ParseError(line_, col_, std::string("unexpected character '") + c + "'");
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

bool is_punct(const Token& t, const char* p) {
  return t.kind == Tok::Punct && t.text == p;
}

// Pratt expression parser. Precedence: ^ (right-assoc) > unary minus
// > * / > + -.
class ExprParser {
 public:
  ExprParser(Lexer& lex, const std::set<std::string>& symbols)
      : lex_(lex), symbols_(symbols) {}

  Expr parse() { return parse_bp(0); }

 private:
  Expr parse_bp(int min_bp) {
    Expr lhs = parse_prefix();
    for (;;) {
      const Token& t = lex_.peek();
      int lbp = 0, rbp = 0;
      if (is_punct(t, "+") || is_punct(t, "-")) {
        lbp = 1;
        rbp = 2;
      } else if (is_punct(t, "*") || is_punct(t, "/")) {
        lbp = 3;
        rbp = 4;
      } else if (is_punct(t, "^")) {
        lbp = 8;
        rbp = 7;  // right-associative
      } else {
        break;
      }
      if (lbp < min_bp) break;
      std::string op = lex_.next().text;
      if (op == "^") {
        Expr rhs = parse_bp(rbp);
        if (!rhs.is_number()) {
          lex_.fail("exponent must be a rational constant");
        }
        lhs = Expr::pow(lhs, rhs.number_value());
      } else {
        Expr rhs = parse_bp(rbp);
        if (op == "+") lhs = lhs + rhs;
        else if (op == "-") lhs = lhs - rhs;
        else if (op == "*") lhs = lhs * rhs;
        else lhs = lhs / rhs;
      }
    }
    return lhs;
  }

  Expr parse_prefix() {
    Token t = lex_.peek();
    if (is_punct(t, "-")) {
      lex_.next();
      return -parse_bp(5);
    }
    if (is_punct(t, "(")) {
      lex_.next();
      Expr e = parse_bp(0);
      if (!is_punct(lex_.peek(), ")")) lex_.fail("expected ')'");
      lex_.next();
      return e;
    }
    if (t.kind == Tok::Number) {
      lex_.next();
      return Expr::number(t.value);
    }
    if (t.kind == Tok::Ident) {
      lex_.next();
      static const std::map<std::string, Fn> functions{
          {"exp", Fn::Exp}, {"log", Fn::Log}, {"sin", Fn::Sin}, {"cos", Fn::Cos}};
      if (is_punct(lex_.peek(), "(")) {
        lex_.next();
        Expr arg = parse_bp(0);
        if (!is_punct(lex_.peek(), ")")) lex_.fail("expected ')'");
        lex_.next();
        if (t.text == "sqrt") return Expr::sqrt(arg);
        auto it = functions.find(t.text);
        if (it == functions.end()) {
          throw ParseError(t.line, t.col, "unknown function '" + t.text + "'");
        }
        return Expr::call(it->second, arg);
      }
      if (!symbols_.count(t.text)) {
        throw ParseError(t.line, t.col, "unknown identifier '" + t.text + "'");
      }
      return Expr::symbol(t.text);
    }
    throw ParseError(t.line, t.col, "expected an expression");
  }

  Lexer& lex_;
  const std::set<std::string>& symbols_;
};

Rational parse_rational(Lexer& lex) {
  bool neg = false;
  if (is_punct(lex.peek(), "-")) {
    lex.next();
    neg = true;
  }
  Token t = lex.peek();
  if (t.kind != Tok::Number) lex.fail("expected a rational constant");
  Rational v = lex.next().value;
  if (is_punct(lex.peek(), "/")) {
    lex.next();
    Token d = lex.peek();
    if (d.kind != Tok::Number) lex.fail("expected a denominator");
    Rational den = lex.next().value;
    if (den == 0) throw ParseError(d.line, d.col, "zero denominator");
    v /= den;
  }
  return neg ? Rational(-v) : v;
}

void expect_punct(Lexer& lex, const char* p) {
  if (!is_punct(lex.peek(), p)) {
    lex.fail(std::string("expected '") + p + "'");
  }
  lex.next();
}

}  // namespace

Expr parse_expression(const std::string& source,
                      const std::vector<std::string>& symbols) {
  Lexer lex(source);
  std::set<std::string> syms(symbols.begin(), symbols.end());
  ExprParser p(lex, syms);
  Expr e = p.parse();
  if (lex.peek().kind != Tok::End) lex.fail("trailing input after expression");
  return e;
}

MetricDocument parse_document(const std::string& source) {
  // Pass 1: declarations (chart, params) so expressions may reference
  // parameters declared later in the file.
  std::set<std::string> symbols;
  MetricDocument doc;
  {
    Lexer lex(source);
    while (lex.peek().kind != Tok::End) {
      Token head = lex.peek();
      if (head.kind == Tok::Ident && head.text == "chart") {
        lex.next();
        if (!doc.chart.coords.empty()) {
          throw ParseError(head.line, head.col, "duplicate chart declaration");
        }
        while (lex.peek().kind == Tok::Ident) {
          doc.chart.coords.push_back(lex.next().text);
        }
        if (doc.chart.coords.size() < 2) {
          throw ParseError(head.line, head.col, "chart needs at least 2 coordinates");
        }
        expect_punct(lex, ";");
      } else if (head.kind == Tok::Ident && head.text == "param") {
        lex.next();
        if (lex.peek().kind != Tok::Ident) lex.fail("expected parameter name");
        Token name = lex.next();
        expect_punct(lex, "=");
        Rational v = parse_rational(lex);
        doc.params.emplace_back(name.text, v);
        expect_punct(lex, ";");
      } else {
        // skip to next ';'
        while (lex.peek().kind != Tok::End && !is_punct(lex.peek(), ";")) lex.next();
        if (lex.peek().kind != Tok::End) lex.next();
      }
    }
    std::set<std::string> names(doc.chart.coords.begin(), doc.chart.coords.end());
    if (names.size() != doc.chart.coords.size()) {
      throw ParseError(1, 1, "duplicate coordinate name in chart");
    }
    symbols = names;
    for (const auto& [p, v] : doc.params) {
      if (!symbols.insert(p).second) {
        throw ParseError(1, 1, "parameter '" + p + "' shadows another name");
      }
    }
  }
  if (doc.chart.coords.empty()) {
    throw ParseError(1, 1, "missing chart declaration");
  }
  const int n = doc.chart.dim();

  // Pass 2: full statement parse.
  std::vector<std::tuple<int, int, Expr, Token>> entries;
  Lexer lex(source);
  while (lex.peek().kind != Tok::End) {
    Token head = lex.peek();
    if (head.kind != Tok::Ident) lex.fail("expected a statement keyword");
    if (head.text == "chart" || head.text == "param") {
      while (lex.peek().kind != Tok::End && !is_punct(lex.peek(), ";")) lex.next();
      expect_punct(lex, ";");
      continue;
    }
    if (head.text == "metric") {
      lex.next();
      Token gname = lex.peek();
      if (gname.kind != Tok::Ident || gname.text != "g") lex.fail("expected 'g[i][j]'");
      lex.next();
      auto read_index = [&]() -> int {
        expect_punct(lex, "[");
        Token idx = lex.peek();
        if (idx.kind != Tok::Number ||
            boost::multiprecision::denominator(idx.value) != 1) {
          lex.fail("expected an integer index");
        }
        lex.next();
        expect_punct(lex, "]");
        long v = boost::multiprecision::numerator(idx.value).convert_to<long>();
        if (v < 1 || v > n) {
          throw ParseError(idx.line, idx.col,
                           "metric index out of range 1.." + std::to_string(n));
        }
        return static_cast<int>(v) - 1;
      };
      int i = read_index();
      int j = read_index();
      expect_punct(lex, "=");
      ExprParser p(lex, symbols);
      Expr e = p.parse();
      expect_punct(lex, ";");
      entries.emplace_back(i, j, e, head);
      continue;
    }
    if (head.text == "ppwave_H") {
      lex.next();
      expect_punct(lex, "=");
      ExprParser p(lex, symbols);
      Expr e = p.parse();
      expect_punct(lex, ";");
      if (doc.ppwave_H) throw ParseError(head.line, head.col, "duplicate ppwave_H");
      doc.ppwave_H = e;
      continue;
    }
    if (head.text == "potential") {
      lex.next();
      Token fname = lex.peek();
      if (fname.kind != Tok::Ident || fname.text != "f") lex.fail("expected 'f'");
      lex.next();
      expect_punct(lex, "=");
      ExprParser p(lex, symbols);
      Expr e = p.parse();
      expect_punct(lex, ";");
      if (doc.potential) throw ParseError(head.line, head.col, "duplicate potential");
      doc.potential = e;
      continue;
    }
    if (head.text == "mu") {
      lex.next();
      expect_punct(lex, "=");
      Rational v = parse_rational(lex);
      expect_punct(lex, ";");
      if (doc.mu) throw ParseError(head.line, head.col, "duplicate mu");
      doc.mu = v;
      continue;
    }
    throw ParseError(head.line, head.col, "unknown statement '" + head.text + "'");
  }

  if (!entries.empty() && doc.ppwave_H) {
    throw ParseError(1, 1, "both 'metric' and 'ppwave_H' present");
  }
  if (!entries.empty()) {
    std::vector<Expr> g(static_cast<size_t>(n) * n, Expr());
    std::vector<bool> given(static_cast<size_t>(n) * n, false);
    for (const auto& [i, j, e, tok] : entries) {
      if (given[i * n + j] || (i != j && given[j * n + i])) {
        throw ParseError(tok.line, tok.col, "duplicate metric component");
      }
      g[i * n + j] = e;
      g[j * n + i] = e;
      given[i * n + j] = given[j * n + i] = true;
    }
    doc.metric = std::move(g);
  }
  if (doc.ppwave_H) {
    const std::vector<std::string> expected{"u", "v", "x1", "x2"};
    if (doc.chart.coords != expected) {
      throw ParseError(1, 1, "ppwave_H requires chart 'u v x1 x2'");
    }
  }
  if (!doc.metric && !doc.ppwave_H) {
    throw ParseError(1, 1, "document defines neither a metric nor ppwave_H");
  }
  return doc;
}

std::string pretty_print(const MetricDocument& doc) {
  std::ostringstream os;
  os << "chart";
  for (const auto& c : doc.chart.coords) os << " " << c;
  os << ";\n";
  auto print_rational = [&](const Rational& r) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
  };
  for (const auto& [p, v] : doc.params) {
    os << "param " << p << " = ";
    print_rational(v);
    os << ";\n";
  }
  if (doc.metric) {
    const int n = doc.chart.dim();
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const Expr& e = (*doc.metric)[i * n + j];
        if (e.is_zero_literal()) continue;
        os << "metric g[" << (i + 1) << "][" << (j + 1) << "] = " << e.str() << ";\n";
      }
    }
  }
  if (doc.ppwave_H) os << "ppwave_H = " << doc.ppwave_H->str() << ";\n";
  if (doc.potential) os << "potential f = " << doc.potential->str() << ";\n";
  if (doc.mu) {
    os << "mu = ";
    print_rational(*doc.mu);
    os << ";\n";
  }
  return os.str();
}

}  // namespace qe
