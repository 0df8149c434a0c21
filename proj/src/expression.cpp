#include "hypcm/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "hypcm/errors.hpp"

namespace hypcm {

struct Expression::Node {
  enum class Kind { Number, Theta, Phi, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
  double value = 0.0;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(double theta, double phi) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Theta: return theta;
      case Kind::Phi: return phi;
      case Kind::Neg: return -a->eval(theta, phi);
      case Kind::Add: return a->eval(theta, phi) + b->eval(theta, phi);
      case Kind::Sub: return a->eval(theta, phi) - b->eval(theta, phi);
      case Kind::Mul: return a->eval(theta, phi) * b->eval(theta, phi);
      case Kind::Div: return a->eval(theta, phi) / b->eval(theta, phi);
      case Kind::Pow: return std::pow(a->eval(theta, phi), b->eval(theta, phi));
      case Kind::Call: return fn(a->eval(theta, phi));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr number(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Number;
  n->value = v;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression \"" + s_ + "\": " + msg + " at column " + std::to_string(pos_ + 1));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = make(Kind::Add, lhs, term());
      else if (eat('-')) lhs = make(Kind::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make(Kind::Mul, lhs, unary());
      else if (eat('/')) lhs = make(Kind::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (eat('(')) {
      NodePtr e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "theta") return make(Kind::Theta);
      if (id == "phi") return make(Kind::Phi);
      if (id == "pi") return number(std::numbers::pi);
      double (*fn)(double) = nullptr;
      if (id == "sinh") fn = [](double x) { return std::sinh(x); };
      else if (id == "cosh") fn = [](double x) { return std::cosh(x); };
      else if (id == "exp") fn = [](double x) { return std::exp(x); };
      else if (id == "sin") fn = [](double x) { return std::sin(x); };
      else if (id == "cos") fn = [](double x) { return std::cos(x); };
      else {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      if (!eat('(')) fail("expected '(' after " + id);
      auto call = std::make_shared<Expression::Node>();
      call->kind = Kind::Call;
      call->fn = fn;
      call->a = expr();
      if (!eat(')')) fail("expected ')'");
      return call;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(e.text_).parse();
  return e;
}

double Expression::operator()(double theta, double phi) const { return root_->eval(theta, phi); }

}  // namespace hypcm
