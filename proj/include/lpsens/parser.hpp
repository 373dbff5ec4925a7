#pragma once

#include "lpsens/rational.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace lpsens {

// ---------------------------------------------------------------------------
// Target expressions
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' factor)?
//   atom   := number | 'x' | ident '(' args ')' | '(' expr ')' | '-' atom
//
// Comparisons (<, <=, >, >=, ==) appear only as the first argument of the
// three-argument `if`.
// ---------------------------------------------------------------------------

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Function { Sin, Cos, Exp, Log, Abs, Sqrt, Min, Max };
enum class Comparison { Lt, Le, Gt, Ge, Eq };

struct Constant {
  Rational value;
  double approx = 0.0;
};
struct Variable {};
struct Negate {
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  Function fn;
  std::vector<ExprPtr> args;
};
struct Conditional {
  Comparison cmp;
  ExprPtr lhs;
  ExprPtr rhs;
  ExprPtr then_branch;
  ExprPtr else_branch;
};

struct Expr {
  std::variant<Constant, Variable, Negate, Binary, Call, Conditional> node;
};

bool structurally_equal(const Expr& a, const Expr& b);

/// A parsed target X: a real function of the single variable x.
class TargetFunction {
 public:
  TargetFunction(ExprPtr root, std::string source_text);

  const Expr& root() const { return *root_; }
  const ExprPtr& root_ptr() const { return root_; }
  const std::string& source_text() const { return source_text_; }

  /// Throws EvalError on domain violations and non-finite results.
  double eval(double x) const;

  /// Canonical text; parsing it yields a structurally identical tree.
  std::string print() const;

  /// Points where the expression may fail to be smooth and that can be
  /// located exactly: zeros of affine comparison operands and of affine
  /// abs/min/max arguments. Sorted, deduplicated.
  const std::vector<double>& kinks() const { return kinks_; }

  friend bool operator==(const TargetFunction& a, const TargetFunction& b) {
    return structurally_equal(*a.root_, *b.root_);
  }

 private:
  ExprPtr root_;
  std::string source_text_;
  std::vector<double> kinks_;
};

TargetFunction parse_target(std::string_view text);
double eval_target(const TargetFunction& f, double x);

/// slope * x + intercept when `e` is affine in x with exact coefficients
/// (constants combined by + - * / and integer powers).
std::optional<std::pair<Rational, Rational>> affine_form(const Expr& e);

// ---------------------------------------------------------------------------
// Measure specifications
//
//   measure   := component | 'mix' '(' item (',' item)* ')'
//   item      := [weight '*'] component | 'mass' '=' number
//   weight    := number ['/' number]
//   component := 'atom(' r ')' | 'uniform(' r ',' r ')' | 'normal(' r ',' r ')'
//              | 'exponential(' r ')'
//              | 'piecewise(' '[' r, ... ']' (',' '[' r, ... ']')+ ')'
//
// A piecewise density lists k+1 breakpoints followed by k coefficient lists,
// ascending powers of x; the density is normalised to unit mass.
// ---------------------------------------------------------------------------

struct AtomKind {
  Rational location;
};
struct UniformKind {
  Rational a;
  Rational b;
};
struct NormalKind {
  Rational mean;
  Rational stddev;
};
struct ExponentialKind {
  Rational rate;
};
struct PiecewiseDensityKind {
  std::vector<Rational> breakpoints;
  std::vector<std::vector<Rational>> pieces;
};

using ComponentKind = std::variant<AtomKind, UniformKind, NormalKind,
                                   ExponentialKind, PiecewiseDensityKind>;

struct MeasureComponent {
  Rational weight;
  ComponentKind kind;
};

struct MeasureSpec {
  std::vector<MeasureComponent> components;
  Rational declared_total_mass{1};
  std::string source_text;
};

MeasureSpec parse_measure(std::string_view text);

/// True when the polynomial (ascending coefficients) is >= 0 on [a, b], as far
/// as Bernstein subdivision to a fixed depth can decide.
bool nonnegative_on(const std::vector<Rational>& coeffs, const Rational& a,
                    const Rational& b);

}  // namespace lpsens
