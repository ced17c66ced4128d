#pragma once

// Arithmetic expressions for potentials p(x), r(x) and kernel entries M_ij(x, t).
//
// Grammar (standard precedence, '^' right-associative and binding tighter than
// unary minus, so -2^2 == -4 and 2^3^2 == 512):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names: x, t, pi, alpha. Functions: sin cos exp sqrt abs (one argument), pow (two).

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fdirac {

class Expression {
public:
  struct Node;

  /// Throws ParseError (with byte offset) on malformed input or unknown names.
  static Expression parse(std::string_view source);

  /// Evaluates at (x, t). Throws EvalError when the result is not finite.
  double eval(double x, double t = 0.0, double alpha = 1.0) const;

  /// Fully parenthesised text that parses back to an equivalent expression.
  std::string render() const;
  const std::string& source() const noexcept { return source_; }

  bool uses_x() const noexcept { return uses_x_; }
  bool uses_t() const noexcept { return uses_t_; }
  bool uses_alpha() const noexcept { return uses_alpha_; }
  /// True when no variable appears (pi is a constant).
  bool is_constant() const noexcept { return !uses_x_ && !uses_t_ && !uses_alpha_; }
  /// True for an expression that is identically zero without evaluation ("0", "0.0").
  bool is_zero() const;

private:
  enum class Op : std::uint8_t {
    Const, VarX, VarT, VarAlpha,
    Add, Sub, Mul, Div, Pow, Neg,
    Sin, Cos, Exp, Sqrt, Abs,
  };
  struct Instr {
    Op op;
    double value;
  };

  void compile(const Node& node, std::size_t depth);

  std::string source_;
  std::shared_ptr<const Node> root_;
  std::vector<Instr> program_;
  std::size_t stack_depth_ = 0;
  bool uses_x_ = false;
  bool uses_t_ = false;
  bool uses_alpha_ = false;
};

}  // namespace fdirac
