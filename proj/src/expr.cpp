#include "lbdie/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace lbdie::expr {

namespace {

Ast mk(Node n) { return std::make_shared<const Node>(std::move(n)); }

Ast mk_const(double v, std::size_t pos = 0) {
  return mk(Node{.kind = Kind::Constant, .value = v, .pos = pos});
}

Ast mk_var(Var v, std::size_t pos = 0) {
  return mk(Node{.kind = Kind::Variable, .var = v, .pos = pos});
}

bool is_const(const Ast& e, double v) {
  return e->kind == Kind::Constant && e->value == v;
}

Ast mk_unary(Fn f, Ast a, std::size_t pos = 0);
Ast mk_binary(Op op, Ast a, Ast b, std::size_t pos = 0);

// Smart constructors fold constants and strip algebraic identities so that
// derivatives come out in reduced form (0/1 elimination, constant folding).
Ast mk_unary(Fn f, Ast a, std::size_t pos) {
  if (a->kind == Kind::Constant) {
    double v = a->value;
    switch (f) {
      case Fn::Sin: return mk_const(std::sin(v), pos);
      case Fn::Cos: return mk_const(std::cos(v), pos);
      case Fn::Exp: return mk_const(std::exp(v), pos);
      case Fn::Neg: return mk_const(-v, pos);
      case Fn::Sqrt:
        if (v >= 0) return mk_const(std::sqrt(v), pos);
        break;
      case Fn::Log:
        if (v > 0) return mk_const(std::log(v), pos);
        break;
    }
  }
  if (f == Fn::Neg && a->kind == Kind::Unary && a->fn == Fn::Neg) return a->a;
  return mk(Node{.kind = Kind::Unary, .fn = f, .a = std::move(a), .pos = pos});
}

Ast mk_binary(Op op, Ast a, Ast b, std::size_t pos) {
  if (a->kind == Kind::Constant && b->kind == Kind::Constant) {
    double x = a->value, y = b->value;
    switch (op) {
      case Op::Add: return mk_const(x + y, pos);
      case Op::Sub: return mk_const(x - y, pos);
      case Op::Mul: return mk_const(x * y, pos);
      case Op::Div:
        if (y != 0) return mk_const(x / y, pos);
        break;
      case Op::Pow: {
        double p = std::pow(x, y);
        if (std::isfinite(p)) return mk_const(p, pos);
        break;
      }
    }
  }
  switch (op) {
    case Op::Add:
      if (is_const(a, 0)) return b;
      if (is_const(b, 0)) return a;
      break;
    case Op::Sub:
      if (is_const(b, 0)) return a;
      if (is_const(a, 0)) return mk_unary(Fn::Neg, b, pos);
      break;
    case Op::Mul:
      if (is_const(a, 0) || is_const(b, 0)) return mk_const(0, pos);
      if (is_const(a, 1)) return b;
      if (is_const(b, 1)) return a;
      break;
    case Op::Div:
      if (is_const(a, 0)) return mk_const(0, pos);
      if (is_const(b, 1)) return a;
      break;
    case Op::Pow:
      if (is_const(b, 1)) return a;
      if (is_const(b, 0)) return mk_const(1, pos);
      break;
  }
  return mk(Node{.kind = Kind::Binary, .op = op, .a = std::move(a), .b = std::move(b), .pos = pos});
}

struct Lexer {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eof() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    skip_ws();
    if (i >= s.size() || s[i] != c) throw ParseError(std::string("expected ") + what, i);
    ++i;
  }
};

struct Parser {
  Lexer lx;

  Ast parse_expr() {
    Ast e = parse_term();
    for (;;) {
      std::size_t pos = lx.i;
      if (lx.accept('+'))
        e = mk_binary(Op::Add, e, parse_term(), pos);
      else if (lx.accept('-'))
        e = mk_binary(Op::Sub, e, parse_term(), pos);
      else
        return e;
    }
  }

  Ast parse_term() {
    Ast e = parse_unary();
    for (;;) {
      std::size_t pos = lx.i;
      if (lx.accept('*'))
        e = mk_binary(Op::Mul, e, parse_unary(), pos);
      else if (lx.accept('/'))
        e = mk_binary(Op::Div, e, parse_unary(), pos);
      else
        return e;
    }
  }

  // Unary minus binds looser than ^, so -x1^2 reads as -(x1^2).
  Ast parse_unary() {
    std::size_t pos = lx.i;
    if (lx.accept('-')) return mk_unary(Fn::Neg, parse_unary(), pos);
    return parse_power();
  }

  Ast parse_power() {
    Ast base = parse_primary();
    std::size_t pos = lx.i;
    if (lx.accept('^')) return mk_binary(Op::Pow, base, parse_unary(), pos);
    return base;
  }

  Ast parse_primary() {
    lx.skip_ws();
    std::size_t pos = lx.i;
    if (pos >= lx.s.size()) throw ParseError("expression expected", pos);
    char c = lx.s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (c == '(') {
      ++lx.i;
      Ast e = parse_expr();
      lx.expect(')', "')'");
      return e;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos);
  }

  Ast parse_number() {
    std::size_t pos = lx.i;
    const char* begin = lx.s.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos);
    lx.i = pos + static_cast<std::size_t>(end - begin);
    return mk_const(v, pos);
  }

  Ast parse_ident() {
    std::size_t pos = lx.i;
    std::size_t j = pos;
    while (j < lx.s.size() &&
           (std::isalnum(static_cast<unsigned char>(lx.s[j])) || lx.s[j] == '_'))
      ++j;
    std::string name = lx.s.substr(pos, j - pos);
    lx.i = j;
    if (name == "x1") return mk_var(Var::X1, pos);
    if (name == "x2") return mk_var(Var::X2, pos);
    if (name == "x3") return mk_var(Var::X3, pos);
    if (name == "r") return mk_var(Var::R, pos);
    Fn f;
    if (name == "sin")
      f = Fn::Sin;
    else if (name == "cos")
      f = Fn::Cos;
    else if (name == "exp")
      f = Fn::Exp;
    else if (name == "sqrt")
      f = Fn::Sqrt;
    else if (name == "log")
      f = Fn::Log;
    else
      throw ParseError("unknown identifier '" + name + "'", pos);
    lx.expect('(', "'(' after function name");
    Ast arg = parse_expr();
    lx.expect(')', "')'");
    return mk_unary(f, arg, pos);
  }
};

struct Env {
  double x1 = 0, x2 = 0, x3 = 0, r = 0;
  bool spatial = false;  // x1..x3 bound (r derived); otherwise only r bound
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double eval(const Node& n, const Env& env) {
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Variable:
      switch (n.var) {
        case Var::X1:
          if (!env.spatial) throw DomainError("x1 unbound in radial evaluation", n.pos);
          return env.x1;
        case Var::X2:
          if (!env.spatial) throw DomainError("x2 unbound in radial evaluation", n.pos);
          return env.x2;
        case Var::X3:
          if (!env.spatial) throw DomainError("x3 unbound in radial evaluation", n.pos);
          return env.x3;
        case Var::R:
          return env.r;
      }
      break;
    case Kind::Unary: {
      double a = eval(*n.a, env);
      switch (n.fn) {
        case Fn::Sin: return std::sin(a);
        case Fn::Cos: return std::cos(a);
        case Fn::Exp: return std::exp(a);
        case Fn::Neg: return -a;
        case Fn::Sqrt:
          if (a < 0) throw DomainError("sqrt of negative value " + fmt(a), n.pos);
          return std::sqrt(a);
        case Fn::Log:
          if (a <= 0) throw DomainError("log of non-positive value " + fmt(a), n.pos);
          return std::log(a);
      }
      break;
    }
    case Kind::Binary: {
      double a = eval(*n.a, env);
      double b = eval(*n.b, env);
      switch (n.op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div:
          if (b == 0) throw DomainError("division by zero, numerator " + fmt(a), n.pos);
          return a / b;
        case Op::Pow: {
          double p = std::pow(a, b);
          if (!std::isfinite(p))
            throw DomainError("pow domain fault, base " + fmt(a) + " exponent " + fmt(b), n.pos);
          return p;
        }
      }
      break;
    }
  }
  throw DomainError("corrupt expression node", n.pos);
}

Ast diff(const Ast& e, Var v);

Ast diff_var(const Node& n, Var v) {
  if (n.var == v) return mk_const(1);
  // Spatial derivative of r: d r / d xk = xk / r.
  if (n.var == Var::R && v != Var::R)
    return mk_binary(Op::Div, mk_var(v), mk_var(Var::R));
  return mk_const(0);
}

Ast diff(const Ast& e, Var v) {
  const Node& n = *e;
  switch (n.kind) {
    case Kind::Constant:
      return mk_const(0);
    case Kind::Variable:
      return diff_var(n, v);
    case Kind::Unary: {
      Ast da = diff(n.a, v);
      switch (n.fn) {
        case Fn::Sin: return mk_binary(Op::Mul, mk_unary(Fn::Cos, n.a), da);
        case Fn::Cos:
          return mk_binary(Op::Mul, mk_unary(Fn::Neg, mk_unary(Fn::Sin, n.a)), da);
        case Fn::Exp: return mk_binary(Op::Mul, e, da);
        case Fn::Neg: return mk_unary(Fn::Neg, da);
        case Fn::Sqrt:
          return mk_binary(Op::Div, da, mk_binary(Op::Mul, mk_const(2), e));
        case Fn::Log: return mk_binary(Op::Div, da, n.a);
      }
      break;
    }
    case Kind::Binary: {
      switch (n.op) {
        case Op::Add: return mk_binary(Op::Add, diff(n.a, v), diff(n.b, v));
        case Op::Sub: return mk_binary(Op::Sub, diff(n.a, v), diff(n.b, v));
        case Op::Mul:
          return mk_binary(Op::Add, mk_binary(Op::Mul, diff(n.a, v), n.b),
                           mk_binary(Op::Mul, n.a, diff(n.b, v)));
        case Op::Div:
          return mk_binary(
              Op::Div,
              mk_binary(Op::Sub, mk_binary(Op::Mul, diff(n.a, v), n.b),
                        mk_binary(Op::Mul, n.a, diff(n.b, v))),
              mk_binary(Op::Pow, n.b, mk_const(2)));
        case Op::Pow:
          if (n.b->kind == Kind::Constant) {
            // d(a^c) = c * a^(c-1) * a'
            return mk_binary(
                Op::Mul,
                mk_binary(Op::Mul, n.b,
                          mk_binary(Op::Pow, n.a, mk_const(n.b->value - 1))),
                diff(n.a, v));
          }
          // d(a^b) = a^b * (b' log a + b a'/a)
          return mk_binary(
              Op::Mul, e,
              mk_binary(Op::Add,
                        mk_binary(Op::Mul, diff(n.b, v), mk_unary(Fn::Log, n.a)),
                        mk_binary(Op::Div, mk_binary(Op::Mul, n.b, diff(n.a, v)), n.a)));
      }
      break;
    }
  }
  throw std::logic_error("corrupt expression node");
}

int precedence(const Node& n) {
  if (n.kind == Kind::Binary) {
    switch (n.op) {
      case Op::Add:
      case Op::Sub: return 1;
      case Op::Mul:
      case Op::Div: return 2;
      case Op::Pow: return 4;
    }
  }
  if (n.kind == Kind::Unary && n.fn == Fn::Neg) return 3;
  return 5;
}

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Sqrt: return "sqrt";
    case Fn::Log: return "log";
    case Fn::Neg: return "-";
  }
  return "?";
}

void print(const Node& n, std::string& out) {
  auto child = [&](const Ast& c, int min_prec) {
    bool parens = precedence(*c) < min_prec;
    if (parens) out += '(';
    print(*c, out);
    if (parens) out += ')';
  };
  switch (n.kind) {
    case Kind::Constant:
      if (n.value < 0) {
        out += "(" + fmt(n.value) + ")";
      } else {
        out += fmt(n.value);
      }
      return;
    case Kind::Variable:
      switch (n.var) {
        case Var::X1: out += "x1"; return;
        case Var::X2: out += "x2"; return;
        case Var::X3: out += "x3"; return;
        case Var::R: out += "r"; return;
      }
      return;
    case Kind::Unary:
      if (n.fn == Fn::Neg) {
        out += '-';
        child(n.a, 4);
        return;
      }
      out += fn_name(n.fn);
      out += '(';
      print(*n.a, out);
      out += ')';
      return;
    case Kind::Binary: {
      int p = precedence(n);
      switch (n.op) {
        case Op::Add:
          child(n.a, p);
          out += '+';
          child(n.b, p);
          return;
        case Op::Sub:
          child(n.a, p);
          out += '-';
          child(n.b, p + 1);
          return;
        case Op::Mul:
          child(n.a, p);
          out += '*';
          child(n.b, p);
          return;
        case Op::Div:
          child(n.a, p);
          out += '/';
          child(n.b, p + 1);
          return;
        case Op::Pow:
          child(n.a, p + 1);  // right associative
          out += '^';
          child(n.b, p);
          return;
      }
    }
  }
}

}  // namespace

Ast parse(const std::string& text) {
  Parser p{Lexer{text}};
  Ast e = p.parse_expr();
  p.lx.skip_ws();
  if (p.lx.i < text.size())
    throw ParseError(std::string("trailing input starting at '") + text[p.lx.i] + "'", p.lx.i);
  return e;
}

double evaluate(const Ast& e, double x1, double x2, double x3) {
  Env env{x1, x2, x3, std::sqrt(x1 * x1 + x2 * x2 + x3 * x3), true};
  return eval(*e, env);
}

double evaluate_radial(const Ast& e, double r) {
  Env env;
  env.r = r;
  return eval(*e, env);
}

Ast derivative(const Ast& e, Var v) { return diff(e, v); }

std::string to_string(const Ast& e) {
  std::string out;
  print(*e, out);
  return out;
}

bool equal(const Ast& a, const Ast& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Constant: return a->value == b->value;
    case Kind::Variable: return a->var == b->var;
    case Kind::Unary: return a->fn == b->fn && equal(a->a, b->a);
    case Kind::Binary:
      return a->op == b->op && equal(a->a, b->a) && equal(a->b, b->b);
  }
  return false;
}

Ast constant(double v) { return mk_const(v); }

}  // namespace lbdie::expr
