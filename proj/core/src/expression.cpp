#include "fdirac/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fdirac/errors.hpp"

namespace fdirac {

struct Expression::Node {
  enum class Kind { Number, Variable, Unary, Binary, Call };
  Kind kind;
  double number = 0.0;
  std::string name;  // variable / function name
  char op = 0;       // '+', '-', '*', '/', '^' for Binary, '-' for Unary
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make_number(double v) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Number;
  n->number = v;
  return n;
}

NodePtr make_variable(std::string name) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Variable;
  n->name = std::move(name);
  return n;
}

NodePtr make_unary(char op, NodePtr arg) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Unary;
  n->op = op;
  n->args = {std::move(arg)};
  return n;
}

NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->args = {std::move(lhs), std::move(rhs)};
  return n;
}

NodePtr make_call(std::string name, std::vector<NodePtr> args) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = Kind::Call;
  n->name = std::move(name);
  n->args = std::move(args);
  return n;
}

int function_arity(std::string_view name) {
  if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt" || name == "abs") {
    return 1;
  }
  if (name == "pow") return 2;
  return -1;
}

bool is_variable(std::string_view name) {
  return name == "x" || name == "t" || name == "pi" || name == "alpha";
}

struct Token {
  enum class Type { Number, Name, Symbol, End };
  Type type;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ >= src_.size()) {
      tok_ = Token{Token::Type::End, pos_, {}, 0.0};
      return;
    }
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number(start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        ++pos_;
      }
      tok_ = Token{Token::Type::Name, start, src_.substr(start, pos_ - start), 0.0};
      return;
    }
    if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
      ++pos_;
      tok_ = Token{Token::Type::Symbol, start, src_.substr(start, 1), 0.0};
      return;
    }
    throw ParseError(fmt::format("unexpected character '{}' at offset {}", c, start), start);
  }

  void lex_number(std::size_t start) {
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    const std::string_view text = src_.substr(start, pos_ - start);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ParseError(fmt::format("malformed number '{}' at offset {}", text, start), start);
    }
    tok_ = Token{Token::Type::Number, start, text, value};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_{Token::Type::End, 0, {}, 0.0};
};

class Parser {
public:
  explicit Parser(std::string_view src) : lex_(src) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::End) fail(t, "unexpected");
    return e;
  }

private:
  static constexpr int max_depth = 200;

  [[noreturn]] void fail(const Token& t, std::string_view what) {
    if (t.type == Token::Type::End) {
      throw ParseError(fmt::format("unexpected end of input at offset {}", t.offset), t.offset);
    }
    throw ParseError(fmt::format("{} '{}' at offset {}", what, t.text, t.offset), t.offset);
  }

  bool at_symbol(char c) const {
    const Token& t = lex_.peek();
    return t.type == Token::Type::Symbol && t.text[0] == c;
  }

  void expect_symbol(char c) {
    if (!at_symbol(c)) fail(lex_.peek(), fmt::format("expected '{}' but found", c));
    lex_.take();
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > max_depth) {
        throw ParseError("expression nested too deeply", p.lex_.peek().offset);
      }
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  NodePtr parse_expr() {
    DepthGuard guard(*this);
    NodePtr lhs = parse_term();
    while (at_symbol('+') || at_symbol('-')) {
      const char op = lex_.take().text[0];
      lhs = make_binary(op, lhs, parse_term());
    }
    return lhs;
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    while (at_symbol('*') || at_symbol('/')) {
      const char op = lex_.take().text[0];
      lhs = make_binary(op, lhs, parse_unary());
    }
    return lhs;
  }

  NodePtr parse_unary() {
    DepthGuard guard(*this);
    if (at_symbol('-')) {
      lex_.take();
      return make_unary('-', parse_unary());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (at_symbol('^')) {
      lex_.take();
      return make_binary('^', base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    const Token t = lex_.peek();
    switch (t.type) {
      case Token::Type::Number:
        lex_.take();
        return make_number(t.number);
      case Token::Type::Name: {
        lex_.take();
        const int arity = function_arity(t.text);
        if (arity > 0) {
          if (!at_symbol('(')) fail(lex_.peek(), fmt::format("expected '(' after {}, found", t.text));
          lex_.take();
          std::vector<NodePtr> args{parse_expr()};
          while (at_symbol(',')) {
            lex_.take();
            args.push_back(parse_expr());
          }
          if (static_cast<int>(args.size()) != arity) {
            throw ParseError(fmt::format("function '{}' takes {} argument(s), got {}", t.text,
                                         arity, args.size()),
                             t.offset);
          }
          expect_symbol(')');
          return make_call(std::string(t.text), std::move(args));
        }
        if (is_variable(t.text)) return make_variable(std::string(t.text));
        throw ParseError(fmt::format("unknown identifier '{}' at offset {}", t.text, t.offset),
                         t.offset);
      }
      case Token::Type::Symbol:
        if (t.text[0] == '(') {
          lex_.take();
          NodePtr inner = parse_expr();
          expect_symbol(')');
          return inner;
        }
        fail(t, "unexpected");
      case Token::Type::End:
        fail(t, "unexpected");
    }
    fail(t, "unexpected");
  }

  Lexer lex_;
  int depth_ = 0;
};

std::string render_node(const Expression::Node& n) {
  switch (n.kind) {
    case Kind::Number:
      return fmt::format("{:.17g}", n.number);
    case Kind::Variable:
      return n.name;
    case Kind::Unary:
      return fmt::format("(-{})", render_node(*n.args[0]));
    case Kind::Binary:
      return fmt::format("({} {} {})", render_node(*n.args[0]), n.op, render_node(*n.args[1]));
    case Kind::Call: {
      std::string out = n.name + "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        out += render_node(*n.args[i]);
      }
      return out + ")";
    }
  }
  return {};
}

}  // namespace

Expression Expression::parse(std::string_view source) {
  if (source.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("empty expression", 0);
  }
  Expression e;
  e.source_ = std::string(source);
  e.root_ = Parser(source).parse_all();
  e.compile(*e.root_, 1);
  return e;
}

void Expression::compile(const Node& node, std::size_t depth) {
  stack_depth_ = std::max(stack_depth_, depth);
  switch (node.kind) {
    case Kind::Number:
      program_.push_back({Op::Const, node.number});
      return;
    case Kind::Variable:
      if (node.name == "x") {
        uses_x_ = true;
        program_.push_back({Op::VarX, 0.0});
      } else if (node.name == "t") {
        uses_t_ = true;
        program_.push_back({Op::VarT, 0.0});
      } else if (node.name == "alpha") {
        uses_alpha_ = true;
        program_.push_back({Op::VarAlpha, 0.0});
      } else {
        program_.push_back({Op::Const, std::numbers::pi});
      }
      return;
    case Kind::Unary:
      compile(*node.args[0], depth);
      program_.push_back({Op::Neg, 0.0});
      return;
    case Kind::Binary: {
      compile(*node.args[0], depth);
      compile(*node.args[1], depth + 1);
      Op op = Op::Add;
      switch (node.op) {
        case '+': op = Op::Add; break;
        case '-': op = Op::Sub; break;
        case '*': op = Op::Mul; break;
        case '/': op = Op::Div; break;
        case '^': op = Op::Pow; break;
      }
      program_.push_back({op, 0.0});
      return;
    }
    case Kind::Call: {
      for (std::size_t i = 0; i < node.args.size(); ++i) compile(*node.args[i], depth + i);
      Op op = Op::Pow;
      if (node.name == "sin") op = Op::Sin;
      else if (node.name == "cos") op = Op::Cos;
      else if (node.name == "exp") op = Op::Exp;
      else if (node.name == "sqrt") op = Op::Sqrt;
      else if (node.name == "abs") op = Op::Abs;
      program_.push_back({op, 0.0});
      return;
    }
  }
}

double Expression::eval(double x, double t, double alpha) const {
  constexpr std::size_t small = 64;
  std::array<double, small> fixed{};
  std::vector<double> heap;
  double* stack = fixed.data();
  if (stack_depth_ > small) {
    heap.resize(stack_depth_);
    stack = heap.data();
  }
  std::size_t sp = 0;
  for (const Instr& in : program_) {
    switch (in.op) {
      case Op::Const: stack[sp++] = in.value; break;
      case Op::VarX: stack[sp++] = x; break;
      case Op::VarT: stack[sp++] = t; break;
      case Op::VarAlpha: stack[sp++] = alpha; break;
      case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
      case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
      case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
      case Op::Div: --sp; stack[sp - 1] /= stack[sp]; break;
      case Op::Pow: --sp; stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]); break;
      case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
      case Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
      case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
      case Op::Sqrt: stack[sp - 1] = std::sqrt(stack[sp - 1]); break;
      case Op::Abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
    }
  }
  const double result = stack[0];
  if (!std::isfinite(result)) {
    throw EvalError(fmt::format("'{}' is not finite at x={}, t={}", source_, x, t));
  }
  return result;
}

std::string Expression::render() const { return render_node(*root_); }

bool Expression::is_zero() const {
  return program_.size() == 1 && program_[0].op == Op::Const && program_[0].value == 0.0;
}

}  // namespace fdirac
