#include "geoconvex/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>

#include "geoconvex/error.hpp"

namespace geoconvex {

// ---------------------------------------------------------------------------
// Builtins

namespace {

struct Builtin {
  std::string_view name;
  Op op;
  int arity;
};

constexpr std::array<Builtin, 12> kBuiltins{{
    {"exp", Op::Exp, 1},
    {"log", Op::Log, 1},
    {"sin", Op::Sin, 1},
    {"cos", Op::Cos, 1},
    {"tanh", Op::Tanh, 1},
    {"artanh", Op::Artanh, 1},
    {"sqrt", Op::Sqrt, 1},
    {"abs", Op::Abs, 1},
    {"acos", Op::Acos, 1},
    {"min", Op::Min, 2},
    {"max", Op::Max, 2},
    {"if", Op::If, 3},
}};

std::optional<Builtin> find_builtin(std::string_view name) {
  for (const auto& b : kBuiltins) {
    if (b.name == name) return b;
  }
  return std::nullopt;
}

std::string_view op_name(Op op) {
  for (const auto& b : kBuiltins) {
    if (b.op == op) return b.name;
  }
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Pow: return "^";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "==";
    default: return "?";
  }
}

bool is_comparison(Op op) {
  return op == Op::Lt || op == Op::Le || op == Op::Gt || op == Op::Ge || op == Op::Eq;
}

int op_arity(Op op) {
  switch (op) {
    case Op::Const:
    case Op::Var: return 0;
    case Op::Neg:
    case Op::Exp:
    case Op::Log:
    case Op::Sin:
    case Op::Cos:
    case Op::Tanh:
    case Op::Artanh:
    case Op::Sqrt:
    case Op::Abs:
    case Op::Acos: return 1;
    case Op::If: return 3;
    default: return 2;
  }
}

[[noreturn]] void domain_error(const std::string& what) {
  throw Error(ErrorKind::EvalDomainError, what);
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

const std::vector<std::string>& builtin_function_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& b : kBuiltins) out.emplace_back(b.name);
    return out;
  }();
  return names;
}

// ---------------------------------------------------------------------------
// Construction helpers

class ExprBuilder {
 public:
  explicit ExprBuilder(std::vector<std::string> variables)
      : variables_(std::move(variables)) {}

  std::int32_t push(Expr::Node node) {
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t leaf_const(double v) {
    Expr::Node n;
    n.op = Op::Const;
    n.value = v;
    return push(n);
  }

  std::int32_t leaf_var(int slot) {
    Expr::Node n;
    n.op = Op::Var;
    n.slot = slot;
    return push(n);
  }

  std::int32_t op(Op o, std::int32_t a, std::int32_t b = -1, std::int32_t c = -1) {
    Expr::Node n;
    n.op = o;
    n.a = a;
    n.b = b;
    n.c = c;
    return push(n);
  }

  /// Copies `e` (which must share this builder's signature) and returns the
  /// index of its root.
  std::int32_t append(const Expr& e) {
    const auto offset = static_cast<std::int32_t>(nodes_.size());
    for (Expr::Node n : e.nodes()) {
      if (n.a >= 0) n.a += offset;
      if (n.b >= 0) n.b += offset;
      if (n.c >= 0) n.c += offset;
      nodes_.push_back(n);
    }
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  /// Makes `root` the last node by copying its subtree in post-order when
  /// needed; parse trees are already post-ordered with the root last.
  Expr finish() && { return Expr(std::move(variables_), std::move(nodes_)); }

  const std::vector<std::string>& variables() const { return variables_; }

 private:
  std::vector<std::string> variables_;
  std::vector<Expr::Node> nodes_;
};

Expr::Expr() : variables_(), nodes_{Node{}}, depth_(1) {}

Expr::Expr(std::vector<std::string> variables, std::vector<Node> nodes)
    : variables_(std::move(variables)), nodes_(std::move(nodes)) {
  if (nodes_.empty()) {
    throw Error(ErrorKind::InvalidArgument, "empty expression");
  }
  std::vector<int> depth(nodes_.size(), 1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == Op::Const && !std::isfinite(n.value)) {
      throw Error(ErrorKind::InvalidArgument, "expression constants must be finite");
    }
    if (n.op == Op::Var &&
        (n.slot < 0 || n.slot >= static_cast<std::int32_t>(variables_.size()))) {
      throw Error(ErrorKind::UnknownIdentifier, "variable slot outside the signature");
    }
    int d = 0;
    for (std::int32_t k : {n.a, n.b, n.c}) {
      if (k >= 0) d = std::max(d, depth[static_cast<std::size_t>(k)]);
    }
    depth[i] = d + 1;
  }
  depth_ = depth.back();
  if (depth_ > kMaxExprDepth) {
    throw Error(ErrorKind::InvalidArgument,
                "expression depth " + std::to_string(depth_) + " exceeds " +
                    std::to_string(kMaxExprDepth));
  }
}

Expr Expr::constant(double value, std::vector<std::string> variables) {
  ExprBuilder b(std::move(variables));
  b.leaf_const(value);
  return std::move(b).finish();
}

Expr Expr::variable(const std::string& name, std::vector<std::string> variables) {
  const auto it = std::find(variables.begin(), variables.end(), name);
  if (it == variables.end()) {
    throw Error(ErrorKind::UnknownIdentifier, "unknown variable '" + name + "'");
  }
  const int slot = static_cast<int>(it - variables.begin());
  ExprBuilder b(std::move(variables));
  b.leaf_var(slot);
  return std::move(b).finish();
}

Expr Expr::unary(Op op, const Expr& arg) {
  if (op_arity(op) != 1) {
    throw Error(ErrorKind::ArityMismatch, std::string(op_name(op)) + " is not unary");
  }
  ExprBuilder b(arg.variables());
  const auto a = b.append(arg);
  b.op(op, a);
  return std::move(b).finish();
}

Expr Expr::binary(Op op, const Expr& lhs, const Expr& rhs) {
  if (op_arity(op) != 2) {
    throw Error(ErrorKind::ArityMismatch, std::string(op_name(op)) + " is not binary");
  }
  if (lhs.variables() != rhs.variables()) {
    throw Error(ErrorKind::InvalidArgument, "operands have different variable signatures");
  }
  ExprBuilder b(lhs.variables());
  const auto a = b.append(lhs);
  const auto c = b.append(rhs);
  b.op(op, a, c);
  return std::move(b).finish();
}

Expr Expr::if_then_else(Op comparison, const Expr& lhs, const Expr& rhs,
                        const Expr& then_branch, const Expr& else_branch) {
  if (!is_comparison(comparison)) {
    throw Error(ErrorKind::InvalidArgument, "if-condition needs a comparison operator");
  }
  const auto& vars = lhs.variables();
  for (const Expr* e : {&rhs, &then_branch, &else_branch}) {
    if (e->variables() != vars) {
      throw Error(ErrorKind::InvalidArgument, "operands have different variable signatures");
    }
  }
  ExprBuilder b(vars);
  const auto l = b.append(lhs);
  const auto r = b.append(rhs);
  const auto cond = b.op(comparison, l, r);
  const auto t = b.append(then_branch);
  const auto e = b.append(else_branch);
  b.op(Op::If, cond, t, e);
  return std::move(b).finish();
}

Expr Expr::substitute(std::span<const Expr> replacements) const {
  if (replacements.size() != variables_.size()) {
    throw Error(ErrorKind::ArityMismatch,
                "substitution needs " + std::to_string(variables_.size()) +
                    " replacements, got " + std::to_string(replacements.size()));
  }
  std::vector<std::string> target =
      replacements.empty() ? std::vector<std::string>{} : replacements.front().variables();
  for (const Expr& r : replacements) {
    if (r.variables() != target) {
      throw Error(ErrorKind::InvalidArgument, "replacements have different variable signatures");
    }
  }
  ExprBuilder b(target);
  std::vector<std::int32_t> remap(nodes_.size(), -1);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.op == Op::Var) {
      remap[i] = b.append(replacements[static_cast<std::size_t>(n.slot)]);
      continue;
    }
    Node copy = n;
    if (n.a >= 0) copy.a = remap[static_cast<std::size_t>(n.a)];
    if (n.b >= 0) copy.b = remap[static_cast<std::size_t>(n.b)];
    if (n.c >= 0) copy.c = remap[static_cast<std::size_t>(n.c)];
    remap[i] = b.push(copy);
  }
  return std::move(b).finish();
}

Expr Expr::rebind(std::vector<std::string> variables) const {
  std::vector<Expr> repl;
  repl.reserve(variables_.size());
  for (const auto& name : variables_) repl.push_back(Expr::variable(name, variables));
  if (repl.empty()) {
    Expr out = *this;
    out.variables_ = std::move(variables);
    return out;
  }
  return substitute(repl);
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok {
  Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma,
  Lt, Le, Gt, Ge, EqEq, End,
};

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

std::string describe_token(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + std::string(t.text) + "'";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident_start = [](char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  };
  auto is_ident_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        } else {
          throw SyntaxError(j, {"digit"}, "malformed exponent at offset " + std::to_string(j));
        }
      }
      Token t{Tok::Number, start, src.substr(start, i - start)};
      const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (res.ec != std::errc() || !std::isfinite(t.number)) {
        throw SyntaxError(start, {"finite number"},
                          "number '" + std::string(t.text) + "' is not a finite double");
      }
      out.push_back(t);
      continue;
    }
    if (is_ident_start(c)) {
      while (i < src.size() && is_ident_char(src[i])) ++i;
      out.push_back({Tok::Ident, start, src.substr(start, i - start)});
      continue;
    }
    auto two = [&](char next) { return i + 1 < src.size() && src[i + 1] == next; };
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case '<':
        kind = two('=') ? Tok::Le : Tok::Lt;
        len = two('=') ? 2 : 1;
        break;
      case '>':
        kind = two('=') ? Tok::Ge : Tok::Gt;
        len = two('=') ? 2 : 1;
        break;
      case '=':
        if (two('=')) {
          kind = Tok::EqEq;
          len = 2;
          break;
        }
        [[fallthrough]];
      default:
        throw SyntaxError(start, {"operator", "number", "identifier"},
                          "unexpected character '" + std::string(1, c) + "' at offset " +
                              std::to_string(start));
    }
    out.push_back({kind, start, src.substr(start, len)});
    i += len;
  }
  out.push_back({Tok::End, src.size(), {}});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, std::vector<std::string> variables)
      : tokens_(lex(src)), builder_(std::move(variables)) {}

  Expr run() && {
    parse_expr();
    if (peek().kind != Tok::End) {
      fail({"+", "-", "*", "/", "^", "end of input"});
    }
    return std::move(builder_).finish();
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string msg = "syntax error at offset " + std::to_string(t.offset) + ": found " +
                      describe_token(t) + ", expected one of {";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
    msg += "}";
    throw SyntaxError(t.offset, std::move(expected), msg);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail({what});
    ++pos_;
  }

  struct NestGuard {
    explicit NestGuard(Parser& p) : p(p) {
      if (++p.nesting_ > kMaxExprDepth) {
        throw SyntaxError(p.peek().offset, {},
                          "expression nesting exceeds " + std::to_string(kMaxExprDepth));
      }
    }
    ~NestGuard() { --p.nesting_; }
    Parser& p;
  };

  std::int32_t parse_expr() {
    NestGuard guard(*this);
    auto lhs = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Op op = take().kind == Tok::Plus ? Op::Add : Op::Sub;
      const auto rhs = parse_term();
      lhs = builder_.op(op, lhs, rhs);
    }
    return lhs;
  }

  std::int32_t parse_term() {
    auto lhs = parse_factor();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Op op = take().kind == Tok::Star ? Op::Mul : Op::Div;
      const auto rhs = parse_factor();
      lhs = builder_.op(op, lhs, rhs);
    }
    return lhs;
  }

  std::int32_t parse_factor() {
    NestGuard guard(*this);
    const auto base = parse_unary();
    if (peek().kind == Tok::Caret) {
      ++pos_;
      const auto exponent = parse_factor();
      return builder_.op(Op::Pow, base, exponent);
    }
    return base;
  }

  std::int32_t parse_unary() {
    NestGuard guard(*this);
    if (peek().kind == Tok::Minus) {
      ++pos_;
      const auto arg = parse_unary();
      return builder_.op(Op::Neg, arg);
    }
    return parse_atom();
  }

  std::int32_t parse_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        ++pos_;
        return builder_.leaf_const(t.number);
      case Tok::LParen: {
        ++pos_;
        const auto inner = parse_expr();
        expect(Tok::RParen, ")");
        return inner;
      }
      case Tok::Ident: {
        ++pos_;
        if (peek().kind == Tok::LParen) return parse_call(t);
        const auto& vars = builder_.variables();
        const auto it = std::find(vars.begin(), vars.end(), t.text);
        if (it == vars.end()) {
          throw Error(ErrorKind::UnknownIdentifier,
                      "unknown identifier '" + std::string(t.text) + "' at offset " +
                          std::to_string(t.offset));
        }
        return builder_.leaf_var(static_cast<int>(it - vars.begin()));
      }
      default:
        fail({"number", "identifier", "(", "-"});
    }
  }

  std::int32_t parse_call(const Token& name) {
    const auto builtin = find_builtin(name.text);
    if (!builtin) {
      throw Error(ErrorKind::UnknownIdentifier,
                  "unknown function '" + std::string(name.text) + "' at offset " +
                      std::to_string(name.offset));
    }
    expect(Tok::LParen, "(");
    std::vector<std::int32_t> args;
    if (builtin->op == Op::If) {
      args.push_back(parse_condition());
    } else {
      args.push_back(parse_expr());
    }
    while (peek().kind == Tok::Comma) {
      ++pos_;
      args.push_back(parse_expr());
    }
    expect(Tok::RParen, ")");
    if (static_cast<int>(args.size()) != builtin->arity) {
      throw Error(ErrorKind::ArityMismatch,
                  std::string(builtin->name) + " expects " + std::to_string(builtin->arity) +
                      " argument(s), got " + std::to_string(args.size()) + " at offset " +
                      std::to_string(name.offset));
    }
    return builder_.op(builtin->op, args[0], args.size() > 1 ? args[1] : -1,
                       args.size() > 2 ? args[2] : -1);
  }

  std::int32_t parse_condition() {
    const auto lhs = parse_expr();
    Op op;
    switch (peek().kind) {
      case Tok::Lt: op = Op::Lt; break;
      case Tok::Le: op = Op::Le; break;
      case Tok::Gt: op = Op::Gt; break;
      case Tok::Ge: op = Op::Ge; break;
      case Tok::EqEq: op = Op::Eq; break;
      default: fail({"<", "<=", ">", ">=", "=="});
    }
    ++pos_;
    const auto rhs = parse_expr();
    return builder_.op(op, lhs, rhs);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int nesting_ = 0;
  ExprBuilder builder_;
};

}  // namespace

Expr Expr::parse(std::string_view src, std::vector<std::string> variables) {
  if (src.size() > kMaxSourceBytes) {
    throw SyntaxError(kMaxSourceBytes, {}, "expression source exceeds 64 KiB");
  }
  return Parser(src, std::move(variables)).run();
}

// ---------------------------------------------------------------------------
// Evaluation

double Expr::eval(std::span<const double> values) const {
  if (values.size() != variables_.size()) {
    throw Error(ErrorKind::ArityMismatch,
                "expression expects " + std::to_string(variables_.size()) + " values, got " +
                    std::to_string(values.size()));
  }
  return eval_node(static_cast<std::int32_t>(nodes_.size() - 1), values);
}

double Expr::eval(const std::map<std::string, double>& env) const {
  std::vector<double> values;
  values.reserve(variables_.size());
  for (const auto& name : variables_) {
    const auto it = env.find(name);
    if (it == env.end()) {
      throw Error(ErrorKind::UnknownIdentifier, "no binding for variable '" + name + "'");
    }
    values.push_back(it->second);
  }
  return eval(values);
}

double Expr::eval_node(std::int32_t index, std::span<const double> values) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  auto arg = [&](std::int32_t k) { return eval_node(k, values); };
  double r = 0.0;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: r = values[static_cast<std::size_t>(n.slot)]; break;
    case Op::Neg: r = -arg(n.a); break;
    case Op::Add: r = arg(n.a) + arg(n.b); break;
    case Op::Sub: r = arg(n.a) - arg(n.b); break;
    case Op::Mul: r = arg(n.a) * arg(n.b); break;
    case Op::Div: {
      const double num = arg(n.a);
      const double den = arg(n.b);
      if (den == 0.0) domain_error("division by zero");
      r = num / den;
      break;
    }
    case Op::Pow: {
      const double base = arg(n.a);
      const double ex = arg(n.b);
      if (base == 0.0 && ex < 0.0) domain_error("zero raised to a negative power");
      if (base < 0.0 && ex != std::floor(ex)) {
        domain_error("negative base raised to a non-integer power");
      }
      r = std::pow(base, ex);
      break;
    }
    case Op::Exp: r = std::exp(arg(n.a)); break;
    case Op::Log: {
      const double x = arg(n.a);
      if (!(x > 0.0)) domain_error("log of a nonpositive value");
      r = std::log(x);
      break;
    }
    case Op::Sin: r = std::sin(arg(n.a)); break;
    case Op::Cos: r = std::cos(arg(n.a)); break;
    case Op::Tanh: r = std::tanh(arg(n.a)); break;
    case Op::Artanh: {
      const double x = arg(n.a);
      if (!(std::abs(x) < 1.0)) domain_error("artanh argument outside (-1, 1)");
      r = std::atanh(x);
      break;
    }
    case Op::Sqrt: {
      const double x = arg(n.a);
      if (x < 0.0) domain_error("sqrt of a negative value");
      r = std::sqrt(x);
      break;
    }
    case Op::Abs: r = std::abs(arg(n.a)); break;
    case Op::Acos: {
      // Chart rounding can push unit-vector components a few ulps past 1.
      const double x = arg(n.a);
      if (!(std::abs(x) <= 1.0 + 1e-12)) domain_error("acos argument outside [-1, 1]");
      r = std::acos(std::clamp(x, -1.0, 1.0));
      break;
    }
    case Op::Min: r = std::min(arg(n.a), arg(n.b)); break;
    case Op::Max: r = std::max(arg(n.a), arg(n.b)); break;
    case Op::If: r = arg(n.a) != 0.0 ? arg(n.b) : arg(n.c); break;
    case Op::Lt: return arg(n.a) < arg(n.b) ? 1.0 : 0.0;
    case Op::Le: return arg(n.a) <= arg(n.b) ? 1.0 : 0.0;
    case Op::Gt: return arg(n.a) > arg(n.b) ? 1.0 : 0.0;
    case Op::Ge: return arg(n.a) >= arg(n.b) ? 1.0 : 0.0;
    case Op::Eq: return arg(n.a) == arg(n.b) ? 1.0 : 0.0;
  }
  if (!std::isfinite(r)) {
    domain_error(std::string("non-finite result from '") + std::string(op_name(n.op)) + "'");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Printing and comparison

std::string Expr::print_node(std::int32_t index) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.op) {
    case Op::Const:
      return n.value < 0.0 ? "(-" + format_number(-n.value) + ")" : format_number(n.value);
    case Op::Var: return variables_[static_cast<std::size_t>(n.slot)];
    case Op::Neg: return "(-" + print_node(n.a) + ")";
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow:
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
    case Op::Eq: {
      std::string out = print_node(n.a) + " " + std::string(op_name(n.op)) + " " + print_node(n.b);
      return is_comparison(n.op) ? out : "(" + out + ")";
    }
    case Op::If:
      return "if(" + print_node(n.a) + ", " + print_node(n.b) + ", " + print_node(n.c) + ")";
    default: {
      std::string out = std::string(op_name(n.op)) + "(" + print_node(n.a);
      if (n.b >= 0) out += ", " + print_node(n.b);
      return out + ")";
    }
  }
}

std::string Expr::to_string() const {
  return print_node(static_cast<std::int32_t>(nodes_.size() - 1));
}

bool Expr::equal_node(std::int32_t i, const Expr& other, std::int32_t j) const {
  const Node& a = nodes_[static_cast<std::size_t>(i)];
  const Node& b = other.nodes_[static_cast<std::size_t>(j)];
  if (a.op != b.op) return false;
  if (a.op == Op::Const) return a.value == b.value;
  if (a.op == Op::Var) {
    return variables_[static_cast<std::size_t>(a.slot)] ==
           other.variables_[static_cast<std::size_t>(b.slot)];
  }
  for (auto [x, y] : {std::pair{a.a, b.a}, std::pair{a.b, b.b}, std::pair{a.c, b.c}}) {
    if ((x < 0) != (y < 0)) return false;
    if (x >= 0 && !equal_node(x, other, y)) return false;
  }
  return true;
}

bool Expr::operator==(const Expr& other) const {
  return equal_node(static_cast<std::int32_t>(nodes_.size() - 1), other,
                    static_cast<std::int32_t>(other.nodes_.size() - 1));
}

bool Expr::is_constant() const noexcept {
  return std::none_of(nodes_.begin(), nodes_.end(),
                      [](const Node& n) { return n.op == Op::Var; });
}

bool Expr::is_variable(int slot) const noexcept {
  return nodes_.size() == 1 && nodes_[0].op == Op::Var && nodes_[0].slot == slot;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Op::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Op::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Op::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Op::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Op::Neg, a); }

}  // namespace geoconvex
