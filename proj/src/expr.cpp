#include "tango/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <utility>

#include "tango/dual.hpp"

namespace tango {

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at offset " + std::to_string(offset)),
      kind_(kind),
      offset_(offset) {}

namespace {

using Node = Expression::Node;
using Op = Expression::Op;
using NodePtr = std::shared_ptr<const Node>;

int max_var(const Node& n) {
  int m = n.op == Op::Variable ? n.index + 1 : 0;
  if (n.lhs) m = std::max(m, max_var(*n.lhs));
  if (n.rhs) m = std::max(m, max_var(*n.rhs));
  return m;
}

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

constexpr std::array<std::pair<std::string_view, Op>, 6> kFunctions{{
    {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp},
    {"log", Op::Log}, {"sqrt", Op::Sqrt}, {"abs", Op::Abs}}};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ',') throw ParseError(ParseError::Kind::Arity, pos_, "unexpected ','");
      syntax("unexpected character '" + std::string(1, text_[pos_]) + "'");
    }
    return e;
  }

 private:
  [[noreturn]] void syntax(const std::string& msg) const {
    throw ParseError(ParseError::Kind::Syntax, pos_, msg);
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
    if (!accept(c)) syntax(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Op::Add, lhs, term());
      else if (accept('-')) lhs = make(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (accept('*')) lhs = make(Op::Mul, lhs, factor());
      else if (accept('/')) lhs = make(Op::Div, lhs, factor());
      else return lhs;
    }
  }

  NodePtr factor() {
    NodePtr base = atom();
    if (!accept('^')) return base;
    NodePtr exponent = atom();
    if (auto n = integer_constant(*exponent)) {
      auto node = std::make_shared<Node>();
      node->op = Op::IntPow;
      node->index = *n;
      node->lhs = base;
      return node;
    }
    return make(Op::Pow, base, exponent);
  }

  static std::optional<int> integer_constant(const Node& n) {
    double v;
    if (n.op == Op::Number) v = n.number;
    else if (n.op == Op::Neg && n.lhs->op == Op::Number) v = -n.lhs->number;
    else return std::nullopt;
    if (v != std::floor(v) || std::abs(v) > 1 << 20) return std::nullopt;
    return static_cast<int>(v);
  }

  NodePtr atom() {
    skip_ws();
    if (pos_ >= text_.size()) syntax("unexpected end of input");
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return make(Op::Neg, atom());
    }
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    syntax(std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) {
      pos_ = start;
      syntax("malformed number");
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) {
        pos_ = mark;
        syntax("malformed exponent");
      }
    }
    auto node = std::make_shared<Node>();
    node->op = Op::Number;
    node->number = std::strtod(std::string(text_.substr(start, pos_ - start)).c_str(), nullptr);
    return node;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    if (name.size() >= 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9' &&
        std::all_of(name.begin() + 1, name.end(),
                    [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      if (name.size() > 7)
        throw ParseError(ParseError::Kind::UnknownIdentifier, start, "variable index too large");
      auto node = std::make_shared<Node>();
      node->op = Op::Variable;
      node->index = std::atoi(std::string(name.substr(1)).c_str()) - 1;
      return node;
    }

    const auto fn = std::find_if(kFunctions.begin(), kFunctions.end(),
                                 [&](const auto& f) { return f.first == name; });
    if (fn == kFunctions.end())
      throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                       "unknown identifier '" + std::string(name) + "'");
    expect('(');
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ')')
      throw ParseError(ParseError::Kind::Arity, pos_,
                       std::string(name) + " expects exactly one argument");
    NodePtr arg = expr();
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ',')
      throw ParseError(ParseError::Kind::Arity, pos_,
                       std::string(name) + " expects exactly one argument");
    expect(')');
    return make(fn->second, arg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

template <typename T>
struct Evaluator {
  std::function<T(int)> var;

  T operator()(const Node& n) const {
    using std::abs, std::cos, std::exp, std::log, std::sin, std::sqrt;
    switch (n.op) {
      case Op::Number: return T(n.number);
      case Op::Variable: return var(n.index);
      case Op::Add: return (*this)(*n.lhs) + (*this)(*n.rhs);
      case Op::Sub: return (*this)(*n.lhs) - (*this)(*n.rhs);
      case Op::Mul: return (*this)(*n.lhs) * (*this)(*n.rhs);
      case Op::Div: {
        const T den = (*this)(*n.rhs);
        if (value_of(den) == 0.0) throw DomainError("division by zero");
        return (*this)(*n.lhs) / den;
      }
      case Op::IntPow: {
        const T base = (*this)(*n.lhs);
        if (n.index < 0 && value_of(base) == 0.0)
          throw DomainError("zero raised to a negative power");
        return ipow(base, n.index);
      }
      case Op::Pow: {
        const T base = (*this)(*n.lhs);
        if (value_of(base) <= 0.0)
          throw DomainError("non-integer power of a nonpositive base");
        return exp((*this)(*n.rhs) * log(base));
      }
      case Op::Neg: return -(*this)(*n.lhs);
      case Op::Sin: return sin((*this)(*n.lhs));
      case Op::Cos: return cos((*this)(*n.lhs));
      case Op::Exp: return exp((*this)(*n.lhs));
      case Op::Log: {
        const T a = (*this)(*n.lhs);
        if (value_of(a) <= 0.0) throw DomainError("log of a nonpositive number");
        return log(a);
      }
      case Op::Sqrt: {
        const T a = (*this)(*n.lhs);
        if (value_of(a) < 0.0) throw DomainError("sqrt of a negative number");
        if constexpr (!std::is_same_v<T, double>) {
          if (a.value == 0.0 && a.deriv != 0.0) throw DomainError("sqrt is not differentiable at 0");
        }
        return sqrt(a);
      }
      case Op::Abs: return abs((*this)(*n.lhs));
    }
    throw std::logic_error("corrupt expression node");
  }
};

void check_dimension(const Expression& e, Eigen::Index n) {
  if (e.max_variable() > n)
    throw std::invalid_argument("expression references x" + std::to_string(e.max_variable()) +
                                " but the point has dimension " + std::to_string(n));
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string print_node(const Node& n) {
  auto unary = [&](const char* name) { return std::string(name) + "(" + print_node(*n.lhs) + ")"; };
  auto binary = [&](const char* op) {
    return "(" + print_node(*n.lhs) + " " + op + " " + print_node(*n.rhs) + ")";
  };
  switch (n.op) {
    case Op::Number: return format_number(n.number);
    case Op::Variable: return "x" + std::to_string(n.index + 1);
    case Op::Add: return binary("+");
    case Op::Sub: return binary("-");
    case Op::Mul: return binary("*");
    case Op::Div: return binary("/");
    case Op::IntPow:
      return "(" + print_node(*n.lhs) + ")^" +
             (n.index < 0 ? "-" + std::to_string(-n.index) : std::to_string(n.index));
    case Op::Pow: return "(" + print_node(*n.lhs) + ")^(" + print_node(*n.rhs) + ")";
    case Op::Neg: return "-(" + print_node(*n.lhs) + ")";
    case Op::Sin: return unary("sin");
    case Op::Cos: return unary("cos");
    case Op::Exp: return unary("exp");
    case Op::Log: return unary("log");
    case Op::Sqrt: return unary("sqrt");
    case Op::Abs: return unary("abs");
  }
  return {};
}

}  // namespace

Expression::Expression(std::shared_ptr<const Node> root)
    : root_(std::move(root)), max_variable_(max_var(*root_)) {}

Expression parse(std::string_view text) { return Expression(Parser(text).run()); }

std::string print(const Expression& e) { return print_node(e.root()); }

double evaluate(const Expression& e, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dimension(e, x.size());
  Evaluator<double> eval{[&](int i) { return x[i]; }};
  return eval(e.root());
}

Eigen::VectorXd gradient(const Expression& e, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_dimension(e, x.size());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Evaluator<Dual<double>> eval{[&](int i) {
      return Dual<double>(x[i], i == j ? 1.0 : 0.0);
    }};
    grad[j] = eval(e.root()).deriv;
  }
  return grad;
}

}  // namespace tango
