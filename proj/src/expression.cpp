#include "wqg/expression.hpp"

#include "wqg/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace wqg {

struct Expression::Node {
  enum class Kind { number, var, unary, binary, call } kind = Kind::number;
  double value = 0.0;
  int var = 0;
  char op = 0;
  std::string fn;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(const double* vars) const {
    switch (kind) {
      case Kind::number: return value;
      case Kind::var: return vars[var];
      case Kind::unary: return -args[0]->eval(vars);
      case Kind::binary: {
        const double l = args[0]->eval(vars);
        const double r = args[1]->eval(vars);
        switch (op) {
          case '+': return l + r;
          case '-': return l - r;
          case '*': return l * r;
          case '/': return l / r;
          default: return std::pow(l, r);
        }
      }
      case Kind::call: {
        const double x = args[0]->eval(vars);
        if (fn == "sin") return std::sin(x);
        if (fn == "cos") return std::cos(x);
        if (fn == "tan") return std::tan(x);
        if (fn == "exp") return std::exp(x);
        if (fn == "log") return std::log(x);
        if (fn == "sqrt") return std::sqrt(x);
        if (fn == "abs") return std::abs(x);
        if (fn == "tanh") return std::tanh(x);
        if (fn == "sinh") return std::sinh(x);
        if (fn == "cosh") return std::cosh(x);
        const double y = args[1]->eval(vars);
        if (fn == "pow") return std::pow(x, y);
        if (fn == "min") return std::min(x, y);
        if (fn == "max") return std::max(x, y);
        return std::atan2(x, y);
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

int arity(const std::string& fn) {
  static const char* one[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "sinh", "cosh"};
  static const char* two[] = {"pow", "min", "max", "atan2"};
  for (const char* f : one) {
    if (fn == f) return 1;
  }
  for (const char* f : two) {
    if (fn == f) return 2;
  }
  return 0;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::binary;
    n->op = op;
    n->args = {std::move(l), std::move(r)};
    return n;
  }

  NodePtr expr() {
    NodePtr l = term();
    for (;;) {
      if (accept('+')) {
        l = binary('+', l, term());
      } else if (accept('-')) {
        l = binary('-', l, term());
      } else {
        return l;
      }
    }
  }

  NodePtr term() {
    NodePtr l = unary();
    for (;;) {
      if (accept('*')) {
        l = binary('*', l, unary());
      } else if (accept('/')) {
        l = binary('/', l, unary());
      } else {
        return l;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::unary;
      n->args = {unary()};
      return n;
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      auto n = std::make_shared<Node>();
      if (id == "x1" || id == "x") {
        n->kind = Node::Kind::var;
        n->var = 0;
        return n;
      }
      if (id == "x2" || id == "y") {
        n->kind = Node::Kind::var;
        n->var = 1;
        return n;
      }
      if (id == "z") {
        n->kind = Node::Kind::var;
        n->var = 2;
        return n;
      }
      if (id == "pi") {
        n->value = std::numbers::pi;
        return n;
      }
      if (id == "e") {
        n->value = std::numbers::e;
        return n;
      }
      const int ar = arity(id);
      if (ar == 0) fail("unknown identifier '" + id + "'");
      if (!accept('(')) fail("expected '(' after function name");
      n->kind = Node::Kind::call;
      n->fn = id;
      n->args.push_back(expr());
      if (ar == 2) {
        if (!accept(',')) fail("expected ','");
        n->args.push_back(expr());
      }
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text) : text_(text) { root_ = Parser(text_).parse(); }
Expression::~Expression() = default;
Expression::Expression(const Expression&) = default;
Expression& Expression::operator=(const Expression&) = default;
Expression::Expression(Expression&&) noexcept = default;
Expression& Expression::operator=(Expression&&) noexcept = default;

double Expression::operator()(double x1, double x2, double z) const {
  const double vars[3] = {x1, x2, z};
  return root_->eval(vars);
}

}  // namespace wqg
