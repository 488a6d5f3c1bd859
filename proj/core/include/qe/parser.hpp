#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qe/expr.hpp"

namespace qe {

/// Ordered coordinate names of a chart; the order fixes component
/// indexing everywhere downstream.
struct Chart {
  std::vector<std::string> coords;
  int dim() const { return static_cast<int>(coords.size()); }
  int index_of(const std::string& name) const;  // -1 if absent
  bool operator==(const Chart&) const = default;
};

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& msg)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                           ": " + msg),
        line(line), column(col) {}
  int line;
  int column;
};

/// Parsed metric-definition file. Either an explicit metric block or a
/// pp-wave profile H is present, never both.
struct MetricDocument {
  Chart chart;
  std::optional<std::vector<Expr>> metric;  // row-major n*n, symmetrized
  std::optional<Expr> ppwave_H;
  std::optional<Expr> potential;
  std::optional<Rational> mu;
  std::vector<std::pair<std::string, Rational>> params;  // declaration order

  bool is_ppwave() const { return ppwave_H.has_value(); }

  /// Substitutes declared parameter values into an expression.
  Expr resolve(const Expr& e) const;

  bool operator==(const MetricDocument&) const = default;
};

/// Parses a metric-definition document. Statements are `;`-terminated;
/// `#` starts a comment running to end of line. Recognized statements:
///   chart <name>+;
///   metric g[i][j] = <expr>;
///   ppwave_H = <expr>;
///   potential f = <expr>;
///   mu = <rational>;
///   param <name> = <rational>;
MetricDocument parse_document(const std::string& source);

/// Parses a single infix expression over the given symbols.
Expr parse_expression(const std::string& source,
                      const std::vector<std::string>& symbols);

std::string pretty_print(const MetricDocument& doc);

}  // namespace qe
