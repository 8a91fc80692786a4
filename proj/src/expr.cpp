#include "subdiff/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace subdiff {

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;
using Kind = ExprNode::Kind;
using Func = ExprNode::Func;

NodePtr make(Kind kind, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->args = std::move(args);
  return n;
}

NodePtr make_number(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Number;
  n->number = v;
  return n;
}

struct FuncInfo {
  const char* name;
  Func func;
  std::size_t arity;
};

constexpr FuncInfo kFuncs[] = {
    {"sin", Func::Sin, 1},  {"cos", Func::Cos, 1},   {"exp", Func::Exp, 1}, {"abs", Func::Abs, 1},
    {"sqrt", Func::Sqrt, 1}, {"tri", Func::Tri, 1}, {"chi", Func::Chi, 3},
};

const FuncInfo& info(Func f) {
  for (const auto& fi : kFuncs) {
    if (fi.func == f) return fi;
  }
  return kFuncs[0];
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    skip_ws();
    if (pos_ == s_.size()) throw ExprError("empty expression", 0);
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ExprError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) throw ExprError(std::string("expected '") + c + "' but input ended", pos_);
      throw ExprError(std::string("expected '") + c + "', found '" + s_[pos_] + "'", pos_);
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Kind::Add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Kind::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Kind::Mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Kind::Div, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Negate, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ExprError("unexpected end of expression", pos_);
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ExprError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc() || ptr == s_.data() + pos_) throw ExprError("malformed number", start);
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    if (!std::isfinite(v)) throw ExprError("number out of range", start);
    return make_number(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = s_.substr(start, pos_ - start);
    if (name == "x") return make(Kind::VarX);
    if (name == "y") return make(Kind::VarY);
    if (name == "pi") return make(Kind::Pi);
    for (const auto& fi : kFuncs) {
      if (name != fi.name) continue;
      skip_ws();
      if (pos_ >= s_.size() || s_[pos_] != '(') {
        throw ExprError("function '" + std::string(name) + "' requires an argument list", pos_);
      }
      ++pos_;
      std::vector<NodePtr> args;
      if (!accept(')')) {
        do {
          args.push_back(expr());
        } while (accept(','));
        expect(')');
      }
      if (args.size() != fi.arity) {
        throw ExprError("function '" + std::string(name) + "' takes " + std::to_string(fi.arity) +
                            " argument(s), got " + std::to_string(args.size()),
                        start);
      }
      auto n = std::make_shared<ExprNode>();
      n->kind = Kind::Call;
      n->func = fi.func;
      n->args = std::move(args);
      return n;
    }
    throw ExprError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const ExprNode& n, double x, double y) {
  switch (n.kind) {
    case Kind::Number: return n.number;
    case Kind::VarX: return x;
    case Kind::VarY: return y;
    case Kind::Pi: return std::numbers::pi;
    case Kind::Negate: return -eval(*n.args[0], x, y);
    case Kind::Add: return eval(*n.args[0], x, y) + eval(*n.args[1], x, y);
    case Kind::Sub: return eval(*n.args[0], x, y) - eval(*n.args[1], x, y);
    case Kind::Mul: return eval(*n.args[0], x, y) * eval(*n.args[1], x, y);
    case Kind::Div: return eval(*n.args[0], x, y) / eval(*n.args[1], x, y);
    case Kind::Pow: return std::pow(eval(*n.args[0], x, y), eval(*n.args[1], x, y));
    case Kind::Call: {
      const double a = eval(*n.args[0], x, y);
      switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Exp: return std::exp(a);
        case Func::Abs: return std::abs(a);
        case Func::Sqrt: return std::sqrt(a);
        case Func::Tri: return triangle_wave(a);
        case Func::Chi: {
          const double b = eval(*n.args[1], x, y);
          const double s = eval(*n.args[2], x, y);
          return (s >= a && s <= b) ? 1.0 : 0.0;
        }
      }
    }
  }
  return 0.0;
}

void print(const ExprNode& n, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.args[0], out);
    out += op;
    print(*n.args[1], out);
    out += ')';
  };
  switch (n.kind) {
    case Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case Kind::VarX: out += 'x'; return;
    case Kind::VarY: out += 'y'; return;
    case Kind::Pi: out += "pi"; return;
    case Kind::Negate:
      out += "(-";
      print(*n.args[0], out);
      out += ')';
      return;
    case Kind::Add: binary("+"); return;
    case Kind::Sub: binary("-"); return;
    case Kind::Mul: binary("*"); return;
    case Kind::Div: binary("/"); return;
    case Kind::Pow: binary("^"); return;
    case Kind::Call:
      out += info(n.func).name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ',';
        print(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

}  // namespace

double triangle_wave(double s) {
  double m = std::fmod(s, 2.0);
  if (m < 0.0) m += 2.0;
  return 1.0 - std::abs(m - 1.0);
}

FieldExpr FieldExpr::parse(std::string_view text) {
  FieldExpr e;
  e.source_ = std::string(text);
  e.root_ = Parser(text).parse();
  return e;
}

FieldExpr FieldExpr::constant(double value) {
  FieldExpr e;
  e.root_ = make_number(value);
  e.source_ = e.to_string();
  return e;
}

double FieldExpr::operator()(double x, double y) const {
  if (!root_) throw InputError("FieldExpr: evaluating an empty expression");
  return eval(*root_, x, y);
}

SpatialFunction FieldExpr::as_function() const {
  return [expr = *this](const Point& p) { return expr(p.x, p.y); };
}

std::string FieldExpr::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

FieldExpr parse_field_expr(std::string_view text) { return FieldExpr::parse(text); }

bool same_tree(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  if (a.kind == Kind::Number && a.number != b.number) return false;
  if (a.kind == Kind::Call && a.func != b.func) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!same_tree(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

}  // namespace subdiff
