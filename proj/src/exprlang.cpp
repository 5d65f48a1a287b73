#include "suprelax/exprlang.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "suprelax/error.hpp"
#include "suprelax/io.hpp"

namespace suprelax::expr {

namespace {

int scan_max_index(const Node& n) {
  int m = n.op == Op::Var ? n.index : 0;
  for (const auto& a : n.args) m = std::max(m, scan_max_index(a));
  return m;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Node run() {
    Node n = expr();
    skip_ws();
    if (pos_ != text_.size()) error("unexpected '" + std::string(1, text_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, "expression syntax error at position " + std::to_string(pos_) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) error(std::string("expected '") + c + "' before end of input");
      error(std::string("expected '") + c + "'");
    }
  }

  static Node binary(Op op, Node lhs, Node rhs) {
    Node n;
    n.op = op;
    n.args.push_back(std::move(lhs));
    n.args.push_back(std::move(rhs));
    return n;
  }

  static Node negate(Node inner) {
    Node n;
    n.op = Op::Neg;
    n.args.push_back(std::move(inner));
    return n;
  }

  Node expr() {
    Node lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::Add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = binary(Op::Sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  Node term() {
    Node lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::Mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = binary(Op::Div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  Node unary() {
    if (accept('-')) return negate(unary());
    return power();
  }

  Node exponent() {
    if (accept('-')) return negate(exponent());
    return power();
  }

  Node power() {
    Node base = primary();
    if (accept('^')) return binary(Op::Pow, std::move(base), exponent());
    return base;
  }

  Node primary() {
    skip_ws();
    if (pos_ >= text_.size()) error("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Node n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    error("unexpected '" + std::string(1, c) + "'");
  }

  Node number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    Node n;
    n.op = Op::Number;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, n.value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      error("malformed number");
    }
    return n;
  }

  Node identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name == "abs" || name == "min" || name == "max") return call(name, start);

    for (const auto& [prefix, eta] : {std::pair{std::string_view("xi_"), false},
                                      std::pair{std::string_view("eta_"), true}}) {
      if (name.size() > prefix.size() && name.substr(0, prefix.size()) == prefix) {
        const std::string_view digits = name.substr(prefix.size());
        int index = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && index >= 1 &&
            digits.front() != '0') {
          Node n;
          n.op = Op::Var;
          n.eta = eta;
          n.index = index;
          return n;
        }
      }
    }
    pos_ = start;
    error("unknown identifier '" + std::string(name) + "'");
  }

  Node call(std::string_view name, std::size_t start) {
    expect('(');
    std::vector<Node> args;
    args.push_back(expr());
    while (accept(',')) args.push_back(expr());
    expect(')');

    Node n;
    if (name == "abs") {
      n.op = Op::Abs;
      if (args.size() != 1) {
        pos_ = start;
        error("abs takes exactly 1 argument, got " + std::to_string(args.size()));
      }
    } else {
      n.op = name == "min" ? Op::Min : Op::Max;
      if (args.size() < 2) {
        pos_ = start;
        error(std::string(name) + " takes at least 2 arguments, got 1");
      }
    }
    n.args = std::move(args);
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_node(const Node& n, std::string& out) {
  auto infix = [&](const char* op) {
    out += '(';
    print_node(n.args[0], out);
    out += op;
    print_node(n.args[1], out);
    out += ')';
  };
  auto fn = [&](const char* name) {
    out += name;
    out += '(';
    for (std::size_t k = 0; k < n.args.size(); ++k) {
      if (k) out += ',';
      print_node(n.args[k], out);
    }
    out += ')';
  };
  switch (n.op) {
    case Op::Number:
      out += format_real(n.value);
      break;
    case Op::Var:
      out += n.eta ? "eta_" : "xi_";
      out += std::to_string(n.index);
      break;
    case Op::Neg:
      out += "(-";
      print_node(n.args[0], out);
      out += ')';
      break;
    case Op::Add: infix("+"); break;
    case Op::Sub: infix("-"); break;
    case Op::Mul: infix("*"); break;
    case Op::Div: infix("/"); break;
    case Op::Pow: infix("^"); break;
    case Op::Abs: fn("abs"); break;
    case Op::Min: fn("min"); break;
    case Op::Max: fn("max"); break;
  }
}

double finite(double v) {
  if (!std::isfinite(v)) fail(ErrorKind::Domain, "expression evaluates to a non-finite value");
  return v;
}

// Every intermediate result must be finite, so NaN cannot be swallowed by
// min/max further up the tree.
double eval_node(const Node& n, std::span<const double> xi, std::span<const double> eta) {
  switch (n.op) {
    case Op::Number:
      return finite(n.value);
    case Op::Var: {
      const auto& src = n.eta ? eta : xi;
      if (static_cast<std::size_t>(n.index) > src.size())
        fail(ErrorKind::Domain, std::string(n.eta ? "eta_" : "xi_") + std::to_string(n.index) +
                                    " exceeds dimension " + std::to_string(src.size()));
      return finite(src[n.index - 1]);
    }
    case Op::Neg:
      return -eval_node(n.args[0], xi, eta);
    case Op::Add:
      return finite(eval_node(n.args[0], xi, eta) + eval_node(n.args[1], xi, eta));
    case Op::Sub:
      return finite(eval_node(n.args[0], xi, eta) - eval_node(n.args[1], xi, eta));
    case Op::Mul:
      return finite(eval_node(n.args[0], xi, eta) * eval_node(n.args[1], xi, eta));
    case Op::Div: {
      const double num = eval_node(n.args[0], xi, eta);
      const double den = eval_node(n.args[1], xi, eta);
      if (den == 0.0) fail(ErrorKind::Domain, "division by zero");
      return finite(num / den);
    }
    case Op::Pow:
      return finite(std::pow(eval_node(n.args[0], xi, eta), eval_node(n.args[1], xi, eta)));
    case Op::Abs:
      return std::abs(eval_node(n.args[0], xi, eta));
    case Op::Min:
    case Op::Max: {
      double acc = eval_node(n.args[0], xi, eta);
      for (std::size_t k = 1; k < n.args.size(); ++k) {
        const double v = eval_node(n.args[k], xi, eta);
        acc = n.op == Op::Min ? std::min(acc, v) : std::max(acc, v);
      }
      return acc;
    }
  }
  fail(ErrorKind::Internal, "unknown expression node");
}

}  // namespace

DensityExpr::DensityExpr(Node root) : root_(std::move(root)), max_index_(scan_max_index(root_)) {}

DensityExpr parse(std::string_view text) { return DensityExpr(Parser(text).run()); }

std::string print(const DensityExpr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

double evaluate(const DensityExpr& e, std::span<const double> xi, std::span<const double> eta) {
  return eval_node(e.root(), xi, eta);
}

}  // namespace suprelax::expr
