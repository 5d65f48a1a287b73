#pragma once

// Arithmetic expressions over xi_1..xi_d, eta_1..eta_d used to define
// densities in config files.
//
//   expr    := term { ('+' | '-') term }
//   term    := unary { ('*' | '/') unary }
//   unary   := '-' unary | power
//   power   := primary [ '^' exponent ]        (right associative)
//   exponent:= '-' exponent | power
//   primary := number | variable | call | '(' expr ')'
//   call    := 'abs' '(' expr ')' | ('min' | 'max') '(' expr ',' expr { ',' expr } ')'

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace suprelax::expr {

enum class Op { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Abs, Min, Max };

struct Node {
  Op op = Op::Number;
  double value = 0.0;  // Op::Number
  bool eta = false;    // Op::Var: false for xi_k, true for eta_k
  int index = 0;       // Op::Var: 1-based component k
  std::vector<Node> args;

  bool operator==(const Node&) const = default;
};

class DensityExpr {
 public:
  explicit DensityExpr(Node root);

  const Node& root() const { return root_; }
  /// Largest variable component referenced (0 for constant expressions).
  int max_index() const { return max_index_; }

  bool operator==(const DensityExpr&) const = default;

 private:
  Node root_;
  int max_index_ = 0;
};

/// Throws Error(Parse) with the byte offset of the problem.
DensityExpr parse(std::string_view text);

/// Fully parenthesized text that parses back to an identical tree.
std::string print(const DensityExpr& e);

/// Throws Error(Domain) on division by zero, a non-finite result, or a
/// variable index beyond the supplied dimension.
double evaluate(const DensityExpr& e, std::span<const double> xi, std::span<const double> eta);

}  // namespace suprelax::expr
