#pragma once

#include <memory>
#include <string>

namespace wqg {

// Arithmetic expression in x1, x2, z (aliases x, y) with + - * / ^, unary minus,
// the constants pi and e, and the functions sin cos tan exp log sqrt abs tanh
// sinh cosh pow min max atan2.
class Expression {
 public:
  struct Node;

  explicit Expression(const std::string& text);
  ~Expression();
  Expression(const Expression&);
  Expression& operator=(const Expression&);
  Expression(Expression&&) noexcept;
  Expression& operator=(Expression&&) noexcept;

  double operator()(double x1, double x2, double z) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace wqg
