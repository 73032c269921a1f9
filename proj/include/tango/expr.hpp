#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace tango {

/// Thrown by parse(); carries the byte offset of the offending input.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, Arity };

  ParseError(Kind kind, std::size_t offset, const std::string& what);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Evaluation outside the domain of a subexpression (log of a nonpositive
/// number, sqrt of a negative number, division by zero, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Immutable AST of a scalar function of x1..xn. Copies share the tree, so
/// passing by value is cheap and evaluation is reentrant.
class Expression {
 public:
  enum class Op {
    Number, Variable,
    Add, Sub, Mul, Div,
    IntPow,  // base ^ integer constant
    Pow,     // exp(b log a), a > 0
    Neg,
    Sin, Cos, Exp, Log, Sqrt, Abs
  };

  struct Node {
    Op op;
    double number = 0.0;  // Number literal
    int index = 0;        // Variable (0-based) or IntPow exponent
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Expression(std::shared_ptr<const Node> root);

  Op root_op() const noexcept { return root_->op; }
  const Node& root() const noexcept { return *root_; }

  /// Largest 1-based variable index referenced, 0 for constants.
  int max_variable() const noexcept { return max_variable_; }

 private:
  std::shared_ptr<const Node> root_;
  int max_variable_ = 0;
};

/// Parse `text` against the grammar
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := atom ('^' atom)?
///   atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')' | '-' atom
/// with VAR = x1, x2, ... and FUNC one of sin cos exp log sqrt abs.
Expression parse(std::string_view text);

/// Fully parenthesized text that parses back to an equivalent expression.
std::string print(const Expression& e);

double evaluate(const Expression& e, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Exact gradient, one forward-mode pass per variable.
Eigen::VectorXd gradient(const Expression& e, const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace tango
