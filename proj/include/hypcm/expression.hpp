#pragma once

// Arithmetic expressions over (theta, phi) for right-hand sides and test
// fields. Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'theta' | 'phi' | 'pi'
//            | func '(' expr ')' | '(' expr ')'
//   func    := sinh | cosh | exp | sin | cos

#include <memory>
#include <string>

namespace hypcm {

class Expression {
 public:
  /// Throws ConfigError with the offending column on a parse error.
  static Expression parse(const std::string& text);

  double operator()(double theta, double phi) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace hypcm
