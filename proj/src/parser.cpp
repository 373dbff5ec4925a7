#include "lpsens/parser.hpp"

#include "lpsens/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>

namespace lpsens {

namespace {

enum class Tok { Number, Ident, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  bool is_symbol(std::string_view s) const {
    return current_.kind == Tok::Symbol && current_.text == s;
  }

  void expect(std::string_view s) {
    if (!is_symbol(s)) {
      throw ParseError("expected '" + std::string(s) + "'" + found(), current_.offset);
    }
    advance();
  }

  std::string found() const {
    if (current_.kind == Tok::End) return ", found end of input";
    return ", found '" + current_.text + "'";
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
      ++pos_;
    }
    current_ = Token{};
    current_.offset = pos_;
    if (pos_ >= src_.size()) return;
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      std::size_t end = pos_;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      if (end < src_.size() && src_[end] == '.') {
        ++end;
        while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      }
      current_.kind = Tok::Number;
      current_.text = std::string(src_.substr(pos_, end - pos_));
      pos_ = end;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) {
        ++end;
      }
      current_.kind = Tok::Ident;
      current_.text = std::string(src_.substr(pos_, end - pos_));
      pos_ = end;
      return;
    }
    static constexpr std::string_view two[] = {"<=", ">=", "=="};
    for (auto s : two) {
      if (src_.substr(pos_, 2) == s) {
        current_.kind = Tok::Symbol;
        current_.text = std::string(s);
        pos_ += 2;
        return;
      }
    }
    static constexpr std::string_view one = "+-*/^(),<>[]=";
    if (one.find(c) != std::string_view::npos) {
      current_.kind = Tok::Symbol;
      current_.text = std::string(1, c);
      ++pos_;
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token current_;
};

ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }

Constant constant_from_text(const Token& t) {
  auto r = parse_rational(t.text);
  if (!r) throw ParseError("malformed number '" + t.text + "'", t.offset);
  return Constant{*r, to_double(*r)};
}

struct FunctionInfo {
  std::string_view name;
  Function fn;
  std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"sin", Function::Sin, 1},  {"cos", Function::Cos, 1},
    {"exp", Function::Exp, 1},  {"log", Function::Log, 1},
    {"abs", Function::Abs, 1},  {"sqrt", Function::Sqrt, 1},
    {"min", Function::Min, 2},  {"max", Function::Max, 2},
};

std::string_view function_name(Function fn) {
  for (const auto& info : kFunctions) {
    if (info.fn == fn) return info.name;
  }
  return "?";
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : lex_(src) {}

  ExprPtr parse_all() {
    auto e = expr();
    if (lex_.peek().kind != Tok::End) {
      throw ParseError("unexpected '" + lex_.peek().text + "'", lex_.peek().offset);
    }
    return e;
  }

 private:
  ExprPtr expr() {
    auto lhs = term();
    while (lex_.is_symbol("+") || lex_.is_symbol("-")) {
      const auto op = lex_.take().text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      lhs = make(Binary{op, lhs, term()});
    }
    return lhs;
  }

  ExprPtr term() {
    auto lhs = factor();
    while (lex_.is_symbol("*") || lex_.is_symbol("/")) {
      const auto op = lex_.take().text == "*" ? BinaryOp::Mul : BinaryOp::Div;
      lhs = make(Binary{op, lhs, factor()});
    }
    return lhs;
  }

  ExprPtr factor() {
    auto base = atom();
    if (lex_.is_symbol("^")) {
      lex_.take();
      return make(Binary{BinaryOp::Pow, base, factor()});
    }
    return base;
  }

  ExprPtr atom() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::End:
        throw ParseError("unexpected end of input", t.offset);
      case Tok::Number:
        return make(constant_from_text(lex_.take()));
      case Tok::Symbol:
        if (t.text == "(") {
          lex_.take();
          auto e = expr();
          lex_.expect(")");
          return e;
        }
        if (t.text == "-") {
          lex_.take();
          return make(Negate{atom()});
        }
        throw ParseError("unexpected '" + t.text + "'", t.offset);
      case Tok::Ident:
        break;
    }
    const Token id = lex_.take();
    if (id.text == "x") return make(Variable{});
    if (id.text == "if") return conditional(id);
    const auto* info = std::find_if(std::begin(kFunctions), std::end(kFunctions),
                                    [&](const auto& f) { return f.name == id.text; });
    if (info == std::end(kFunctions)) {
      throw ParseError("unknown identifier '" + id.text + "'", id.offset);
    }
    lex_.expect("(");
    std::vector<ExprPtr> args;
    args.push_back(expr());
    while (lex_.is_symbol(",")) {
      lex_.take();
      args.push_back(expr());
    }
    lex_.expect(")");
    if (args.size() != info->arity) {
      throw ParseError("function '" + id.text + "' takes " + std::to_string(info->arity) +
                           " argument(s), got " + std::to_string(args.size()),
                       id.offset);
    }
    return make(Call{info->fn, std::move(args)});
  }

  ExprPtr conditional(const Token& id) {
    lex_.expect("(");
    auto lhs = expr();
    const Token& op = lex_.peek();
    Comparison cmp;
    if (op.kind == Tok::Symbol && op.text == "<") {
      cmp = Comparison::Lt;
    } else if (op.kind == Tok::Symbol && op.text == "<=") {
      cmp = Comparison::Le;
    } else if (op.kind == Tok::Symbol && op.text == ">") {
      cmp = Comparison::Gt;
    } else if (op.kind == Tok::Symbol && op.text == ">=") {
      cmp = Comparison::Ge;
    } else if (op.kind == Tok::Symbol && op.text == "==") {
      cmp = Comparison::Eq;
    } else {
      throw ParseError("'if' needs a comparison as its first argument" + lex_.found(),
                       op.offset);
    }
    lex_.take();
    auto rhs = expr();
    if (!lex_.is_symbol(",")) {
      throw ParseError("'if' takes 3 arguments", id.offset);
    }
    lex_.take();
    auto then_branch = expr();
    if (!lex_.is_symbol(",")) {
      throw ParseError("'if' takes 3 arguments", id.offset);
    }
    lex_.take();
    auto else_branch = expr();
    if (lex_.is_symbol(",")) throw ParseError("'if' takes 3 arguments", id.offset);
    lex_.expect(")");
    return make(Conditional{cmp, lhs, rhs, then_branch, else_branch});
  }

  Lexer lex_;
};

// Precedence levels used by the printer: 1 sum, 2 product, 3 power, 4 atom.
int level(const Expr& e) {
  if (const auto* b = std::get_if<Binary>(&e.node)) {
    switch (b->op) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
        return 1;
      case BinaryOp::Mul:
      case BinaryOp::Div:
        return 2;
      case BinaryOp::Pow:
        return 3;
    }
  }
  return 4;
}

std::string print_expr(const Expr& e);

std::string print_at(const Expr& e, int min_level) {
  auto s = print_expr(e);
  return level(e) < min_level ? "(" + s + ")" : s;
}

std::string_view comparison_text(Comparison c) {
  switch (c) {
    case Comparison::Lt: return "<";
    case Comparison::Le: return "<=";
    case Comparison::Gt: return ">";
    case Comparison::Ge: return ">=";
    case Comparison::Eq: return "==";
  }
  return "?";
}

std::string print_expr(const Expr& e) {
  struct Visitor {
    std::string operator()(const Constant& c) const { return to_exact_string(c.value); }
    std::string operator()(const Variable&) const { return "x"; }
    std::string operator()(const Negate& n) const { return "-" + print_at(*n.operand, 4); }
    std::string operator()(const Binary& b) const {
      switch (b.op) {
        case BinaryOp::Add:
          return print_at(*b.lhs, 1) + " + " + print_at(*b.rhs, 2);
        case BinaryOp::Sub:
          return print_at(*b.lhs, 1) + " - " + print_at(*b.rhs, 2);
        case BinaryOp::Mul:
          return print_at(*b.lhs, 2) + " * " + print_at(*b.rhs, 3);
        case BinaryOp::Div:
          return print_at(*b.lhs, 2) + " / " + print_at(*b.rhs, 3);
        case BinaryOp::Pow:
          return print_at(*b.lhs, 4) + "^" + print_at(*b.rhs, 3);
      }
      return {};
    }
    std::string operator()(const Call& c) const {
      std::string s(function_name(c.fn));
      s += "(";
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i) s += ", ";
        s += print_expr(*c.args[i]);
      }
      return s + ")";
    }
    std::string operator()(const Conditional& c) const {
      return "if(" + print_expr(*c.lhs) + " " + std::string(comparison_text(c.cmp)) + " " +
             print_expr(*c.rhs) + ", " + print_expr(*c.then_branch) + ", " +
             print_expr(*c.else_branch) + ")";
    }
  };
  return std::visit(Visitor{}, e.node);
}

double checked(double v, const char* what) {
  if (std::isnan(v)) throw EvalError(EvalError::Kind::Domain, std::string("domain error in ") + what);
  if (!std::isfinite(v)) {
    throw EvalError(EvalError::Kind::NonFinite, std::string("non-finite result in ") + what);
  }
  return v;
}

double eval_expr(const Expr& e, double x) {
  struct Visitor {
    double x;
    double operator()(const Constant& c) const { return c.approx; }
    double operator()(const Variable&) const { return x; }
    double operator()(const Negate& n) const { return -eval_expr(*n.operand, x); }
    double operator()(const Binary& b) const {
      const double l = eval_expr(*b.lhs, x);
      const double r = eval_expr(*b.rhs, x);
      switch (b.op) {
        case BinaryOp::Add: return checked(l + r, "addition");
        case BinaryOp::Sub: return checked(l - r, "subtraction");
        case BinaryOp::Mul: return checked(l * r, "multiplication");
        case BinaryOp::Div:
          if (r == 0.0) throw EvalError(EvalError::Kind::NonFinite, "division by zero");
          return checked(l / r, "division");
        case BinaryOp::Pow:
          if (l < 0.0 && r != std::trunc(r)) {
            throw EvalError(EvalError::Kind::Domain, "negative base with non-integer exponent");
          }
          return checked(std::pow(l, r), "power");
      }
      return 0.0;
    }
    double operator()(const Call& c) const {
      const double a = eval_expr(*c.args[0], x);
      switch (c.fn) {
        case Function::Sin: return checked(std::sin(a), "sin");
        case Function::Cos: return checked(std::cos(a), "cos");
        case Function::Exp: return checked(std::exp(a), "exp");
        case Function::Log:
          if (a < 0.0) throw EvalError(EvalError::Kind::Domain, "log of a negative number");
          return checked(std::log(a), "log");
        case Function::Abs: return std::abs(a);
        case Function::Sqrt:
          if (a < 0.0) throw EvalError(EvalError::Kind::Domain, "sqrt of a negative number");
          return std::sqrt(a);
        case Function::Min: return std::min(a, eval_expr(*c.args[1], x));
        case Function::Max: return std::max(a, eval_expr(*c.args[1], x));
      }
      return 0.0;
    }
    double operator()(const Conditional& c) const {
      const double l = eval_expr(*c.lhs, x);
      const double r = eval_expr(*c.rhs, x);
      bool holds = false;
      switch (c.cmp) {
        case Comparison::Lt: holds = l < r; break;
        case Comparison::Le: holds = l <= r; break;
        case Comparison::Gt: holds = l > r; break;
        case Comparison::Ge: holds = l >= r; break;
        case Comparison::Eq: holds = l == r; break;
      }
      return eval_expr(holds ? *c.then_branch : *c.else_branch, x);
    }
  };
  return std::visit(Visitor{x}, e.node);
}

void collect_kinks(const Expr& e, std::vector<double>& out) {
  auto add_zero = [&](const Expr& a, const Expr* b) {
    std::optional<std::pair<Rational, Rational>> form;
    if (b == nullptr) {
      form = affine_form(a);
    } else {
      auto fa = affine_form(a);
      auto fb = affine_form(*b);
      if (fa && fb) form = std::pair{fa->first - fb->first, fa->second - fb->second};
    }
    if (form && form->first != 0) out.push_back(to_double(-form->second / form->first));
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Negate>) {
          collect_kinks(*n.operand, out);
        } else if constexpr (std::is_same_v<T, Binary>) {
          collect_kinks(*n.lhs, out);
          collect_kinks(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : n.args) collect_kinks(*a, out);
          if (n.fn == Function::Abs) add_zero(*n.args[0], nullptr);
          if (n.fn == Function::Min || n.fn == Function::Max) add_zero(*n.args[0], n.args[1].get());
        } else if constexpr (std::is_same_v<T, Conditional>) {
          collect_kinks(*n.lhs, out);
          collect_kinks(*n.rhs, out);
          collect_kinks(*n.then_branch, out);
          collect_kinks(*n.else_branch, out);
          add_zero(*n.lhs, n.rhs.get());
        }
      },
      e.node);
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const auto& nb = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Constant>) {
          return na.value == nb.value;
        } else if constexpr (std::is_same_v<T, Variable>) {
          return true;
        } else if constexpr (std::is_same_v<T, Negate>) {
          return structurally_equal(*na.operand, *nb.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return na.op == nb.op && structurally_equal(*na.lhs, *nb.lhs) &&
                 structurally_equal(*na.rhs, *nb.rhs);
        } else if constexpr (std::is_same_v<T, Call>) {
          if (na.fn != nb.fn || na.args.size() != nb.args.size()) return false;
          for (std::size_t i = 0; i < na.args.size(); ++i) {
            if (!structurally_equal(*na.args[i], *nb.args[i])) return false;
          }
          return true;
        } else {
          return na.cmp == nb.cmp && structurally_equal(*na.lhs, *nb.lhs) &&
                 structurally_equal(*na.rhs, *nb.rhs) &&
                 structurally_equal(*na.then_branch, *nb.then_branch) &&
                 structurally_equal(*na.else_branch, *nb.else_branch);
        }
      },
      a.node);
}

std::optional<std::pair<Rational, Rational>> affine_form(const Expr& e) {
  using Form = std::pair<Rational, Rational>;
  return std::visit(
      [](const auto& n) -> std::optional<Form> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return Form{0, n.value};
        } else if constexpr (std::is_same_v<T, Variable>) {
          return Form{1, 0};
        } else if constexpr (std::is_same_v<T, Negate>) {
          auto f = affine_form(*n.operand);
          if (!f) return std::nullopt;
          return Form{-f->first, -f->second};
        } else if constexpr (std::is_same_v<T, Binary>) {
          auto l = affine_form(*n.lhs);
          auto r = affine_form(*n.rhs);
          if (!l || !r) return std::nullopt;
          switch (n.op) {
            case BinaryOp::Add:
              return Form{l->first + r->first, l->second + r->second};
            case BinaryOp::Sub:
              return Form{l->first - r->first, l->second - r->second};
            case BinaryOp::Mul:
              if (l->first != 0 && r->first != 0) return std::nullopt;
              return Form{l->first * r->second + r->first * l->second, l->second * r->second};
            case BinaryOp::Div:
              if (r->first != 0 || r->second == 0) return std::nullopt;
              return Form{l->first / r->second, l->second / r->second};
            case BinaryOp::Pow: {
              if (l->first != 0 || r->first != 0) return std::nullopt;
              const Rational& ex = r->second;
              if (ex.get_den() != 1 || abs(ex) > 64) return std::nullopt;
              const long k = ex.get_num().get_si();
              if (l->second == 0 && k <= 0) return std::nullopt;
              Rational base = k < 0 ? Rational(1 / l->second) : l->second;
              Rational acc = 1;
              for (long i = 0; i < std::labs(k); ++i) acc *= base;
              return Form{0, acc};
            }
          }
          return std::nullopt;
        } else {
          return std::nullopt;
        }
      },
      e.node);
}

TargetFunction::TargetFunction(ExprPtr root, std::string source_text)
    : root_(std::move(root)), source_text_(std::move(source_text)) {
  collect_kinks(*root_, kinks_);
  std::sort(kinks_.begin(), kinks_.end());
  kinks_.erase(std::unique(kinks_.begin(), kinks_.end()), kinks_.end());
}

double TargetFunction::eval(double x) const { return eval_expr(*root_, x); }

std::string TargetFunction::print() const { return print_expr(*root_); }

TargetFunction parse_target(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("empty expression", 0);
  }
  ExprParser parser(text);
  return TargetFunction(parser.parse_all(), std::string(text));
}

double eval_target(const TargetFunction& f, double x) { return f.eval(x); }

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

namespace {

Rational binomial(unsigned n, unsigned k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return Rational(r);
}

// Coefficients of p(a + (b - a) t) in t.
std::vector<Rational> rescale(const std::vector<Rational>& c, const Rational& a,
                              const Rational& b) {
  const std::size_t n = c.size();
  std::vector<Rational> out(n, Rational(0));
  const Rational w = b - a;
  for (std::size_t i = 0; i < n; ++i) {
    // c_i (a + w t)^i
    Rational wp = 1;
    for (std::size_t k = 0; k <= i; ++k) {
      Rational ap = 1;
      for (std::size_t j = 0; j < i - k; ++j) ap *= a;
      out[k] += c[i] * binomial(i, k) * ap * wp;
      wp *= w;
    }
  }
  return out;
}

bool bernstein_nonnegative(std::vector<Rational> bern, int depth) {
  if (bern.front() < 0 || bern.back() < 0) return false;
  if (std::all_of(bern.begin(), bern.end(), [](const Rational& v) { return v >= 0; })) {
    return true;
  }
  if (depth == 0) return true;
  // de Casteljau split at t = 1/2.
  const std::size_t n = bern.size();
  std::vector<Rational> left(n), right(n);
  std::vector<Rational> work = bern;
  for (std::size_t r = 0; r < n; ++r) {
    left[r] = work[0];
    right[n - 1 - r] = work[n - 1 - r];
    for (std::size_t i = 0; i + 1 < n - r; ++i) work[i] = (work[i] + work[i + 1]) / 2;
  }
  return bernstein_nonnegative(std::move(left), depth - 1) &&
         bernstein_nonnegative(std::move(right), depth - 1);
}

class MeasureParser {
 public:
  explicit MeasureParser(std::string_view src) : lex_(src) {}

  MeasureSpec parse_all() {
    MeasureSpec spec;
    bool mass_declared = false;
    std::size_t mass_offset = 0;
    if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "mix") {
      lex_.take();
      lex_.expect("(");
      while (true) {
        if (lex_.peek().kind == Tok::Ident && lex_.peek().text == "mass") {
          mass_offset = lex_.take().offset;
          lex_.expect("=");
          spec.declared_total_mass = weight();
          if (spec.declared_total_mass <= 0) {
            throw ParseError("declared mass must be positive", mass_offset);
          }
          mass_declared = true;
        } else {
          spec.components.push_back(item());
        }
        if (!lex_.is_symbol(",")) break;
        lex_.take();
      }
      lex_.expect(")");
    } else {
      spec.components.push_back(item());
    }
    if (lex_.peek().kind != Tok::End) {
      throw ParseError("unexpected '" + lex_.peek().text + "'", lex_.peek().offset);
    }
    if (spec.components.empty()) throw ParseError("measure has no components", 0);
    Rational sum = 0;
    for (const auto& c : spec.components) sum += c.weight;
    if (sum != spec.declared_total_mass) {
      throw ParseError("component weights sum to " + to_exact_string(sum) +
                           " but the declared total mass is " +
                           to_exact_string(spec.declared_total_mass) +
                           (mass_declared ? "" : " (add mass=... for a finite measure)"),
                       mass_offset);
    }
    if (sum <= 0) throw ParseError("total mass must be positive", 0);
    return spec;
  }

 private:
  Rational number() {
    bool negative = false;
    if (lex_.is_symbol("-")) {
      lex_.take();
      negative = true;
    }
    const Token& t = lex_.peek();
    if (t.kind != Tok::Number) throw ParseError("expected a number" + lex_.found(), t.offset);
    auto r = parse_rational(lex_.take().text);
    if (!r) throw ParseError("malformed number", t.offset);
    return negative ? Rational(-*r) : *r;
  }

  Rational weight() {
    const std::size_t at = lex_.peek().offset;
    Rational w = number();
    if (lex_.is_symbol("/")) {
      lex_.take();
      const std::size_t den_at = lex_.peek().offset;
      Rational d = number();
      if (d == 0) throw ParseError("zero denominator", den_at);
      w /= d;
    }
    if (w < 0) throw ParseError("negative weight", at);
    return w;
  }

  MeasureComponent item() {
    Rational w = 1;
    if (lex_.peek().kind == Tok::Number || lex_.is_symbol("-")) {
      w = weight();
      lex_.expect("*");
    }
    return MeasureComponent{w, component()};
  }

  std::vector<Rational> list() {
    lex_.expect("[");
    std::vector<Rational> out;
    if (!lex_.is_symbol("]")) {
      out.push_back(number());
      while (lex_.is_symbol(",")) {
        lex_.take();
        out.push_back(number());
      }
    }
    lex_.expect("]");
    return out;
  }

  std::vector<Rational> args(std::size_t n) {
    lex_.expect("(");
    std::vector<Rational> out;
    out.push_back(number());
    while (lex_.is_symbol(",")) {
      lex_.take();
      out.push_back(number());
    }
    lex_.expect(")");
    if (out.size() != n) {
      throw ParseError("expected " + std::to_string(n) + " parameter(s), got " +
                           std::to_string(out.size()),
                       lex_.peek().offset);
    }
    return out;
  }

  ComponentKind component() {
    const Token id = lex_.peek();
    if (id.kind != Tok::Ident) throw ParseError("expected a component" + lex_.found(), id.offset);
    lex_.take();
    if (id.text == "atom") {
      auto a = args(1);
      return AtomKind{a[0]};
    }
    if (id.text == "uniform") {
      auto a = args(2);
      if (!(a[0] < a[1])) throw ParseError("invalid interval: uniform needs a < b", id.offset);
      return UniformKind{a[0], a[1]};
    }
    if (id.text == "normal") {
      auto a = args(2);
      if (a[1] <= 0) throw ParseError("normal needs stddev > 0", id.offset);
      return NormalKind{a[0], a[1]};
    }
    if (id.text == "exponential") {
      auto a = args(1);
      if (a[0] <= 0) throw ParseError("exponential needs rate > 0", id.offset);
      return ExponentialKind{a[0]};
    }
    if (id.text == "piecewise") return piecewise(id);
    throw ParseError("unknown measure component '" + id.text + "'", id.offset);
  }

  ComponentKind piecewise(const Token& id) {
    lex_.expect("(");
    PiecewiseDensityKind pw;
    pw.breakpoints = list();
    while (lex_.is_symbol(",")) {
      lex_.take();
      pw.pieces.push_back(list());
    }
    lex_.expect(")");
    if (pw.breakpoints.size() < 2) {
      throw ParseError("piecewise density needs at least two breakpoints", id.offset);
    }
    if (pw.pieces.size() + 1 != pw.breakpoints.size()) {
      throw ParseError("piecewise density needs one coefficient list per piece", id.offset);
    }
    for (std::size_t i = 0; i + 1 < pw.breakpoints.size(); ++i) {
      if (!(pw.breakpoints[i] < pw.breakpoints[i + 1])) {
        throw ParseError("piecewise breakpoints must increase", id.offset);
      }
      if (pw.pieces[i].empty()) throw ParseError("empty polynomial piece", id.offset);
      if (!nonnegative_on(pw.pieces[i], pw.breakpoints[i], pw.breakpoints[i + 1])) {
        throw ParseError("piecewise density is negative on piece " + std::to_string(i),
                         id.offset);
      }
    }
    return pw;
  }

  Lexer lex_;
};

}  // namespace

bool nonnegative_on(const std::vector<Rational>& coeffs, const Rational& a, const Rational& b) {
  if (coeffs.empty()) return true;
  auto t = rescale(coeffs, a, b);
  const unsigned n = static_cast<unsigned>(t.size() - 1);
  std::vector<Rational> bern(n + 1, Rational(0));
  for (unsigned k = 0; k <= n; ++k) {
    for (unsigned i = 0; i <= k; ++i) bern[k] += binomial(k, i) / binomial(n, i) * t[i];
  }
  return bernstein_nonnegative(std::move(bern), 24);
}

MeasureSpec parse_measure(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ParseError("empty measure", 0);
  }
  MeasureParser parser(text);
  auto spec = parser.parse_all();
  spec.source_text = std::string(text);
  return spec;
}

}  // namespace lpsens
