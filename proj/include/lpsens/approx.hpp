#pragma once

#include "lpsens/funcspace.hpp"
#include "lpsens/measure.hpp"
#include "lpsens/norms.hpp"
#include "lpsens/parser.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lpsens {

/// Everything the pipeline needs: target X, measure mu, exponent p, accuracy
/// eps and sensitivity level M.
struct ApproxRequest {
  TargetFunction target;
  BorelMeasure mu;
  double p = 1.0;
  Rational eps;
  Rational M;
  std::string measure_text;

  /// eps / 100, the slack that makes the strict error inequality checkable.
  Rational quadrature_tolerance() const { return eps / 100; }
};

/// Parses and validates; throws ParseError or InvalidArgument.
ApproxRequest make_request(std::string_view target, std::string_view measure, double p,
                           const Rational& eps, const Rational& M);

/// Flags targets whose p-th moment looks infinite (tail contributions growing
/// over successive windows). Throws HypothesisViolation.
void check_moment(const ApproxRequest& req);

/// Open finite union V with V ⊇ B and mu(V \ B) < tol^p, obtained by pushing
/// every closed finite endpoint of B outward by delta and halving delta.
IntervalUnion approximate_borel_set(const IntervalUnion& B, const BorelMeasure& mu, double p,
                                    double tol);

/// Returns the j-th interval of an enumeration, or nullopt when exhausted.
using IntervalEnumerator = std::function<std::optional<Interval>(std::size_t)>;

struct Truncation {
  std::vector<Interval> kept;
  double tail = 0.0;

  std::size_t count() const { return kept.size(); }
};

/// Smallest prefix V_1..V_N with union_mass - sum mu(V_j) < tol^p. Throws
/// BudgetExhausted (with the achieved tail) when `cap` intervals do not
/// suffice.
Truncation truncate_union(const IntervalEnumerator& intervals, double union_mass,
                          const BorelMeasure& mu, double p, double tol, std::size_t cap);

/// Exact piecewise-constant reading of a target built from constants,
/// arithmetic, abs/min/max and `if` with affine or piecewise-constant
/// comparisons. nullopt when the target depends on x in any other way.
std::optional<Partition<Rational>> exact_simple_form(const TargetFunction& f);

struct StepApproximation {
  StepFunction phi0;
  /// Certified upper bound on ||phi0 - X||_p.
  double error_bound = 0.0;
  /// "simple-form" or "grid".
  std::string route;
};

/// phi0 with certified ||phi0 - X||_p < eps/2 - quadrature_tolerance. Throws
/// BudgetExhausted when the grid refinement cap is reached.
StepApproximation build_step_approximation(const ApproxRequest& req);

/// phi0_err_bound + s * wave_norm_bound.
double certify_error(double phi0_err_bound, double s, double wave_norm_bound);

struct Certificate {
  std::string target;
  std::string measure;
  double p = 1.0;
  Rational eps;
  Rational M;

  mpz_class b;
  Rational scale;
  StepFunction phi0;
  double error_bound = 0.0;
  std::string error_method;
  Rational min_abs_slope;
  Rational sup_bound;
  Window nondiff_window;
  std::size_t nondiff_count = 0;
  Rational quadrature_tolerance;
  double phi0_error_bound = 0.0;
  double wave_norm_bound = 0.0;
  std::string phi0_route;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct SensitizeResult {
  SensitiveApproximant approximant;
  Certificate certificate;
};

/// Y = phi0 + s * wave with ||Y - X||_p < eps and |Y'| > M wherever Y is
/// differentiable.
SensitizeResult sensitize(const ApproxRequest& req);

/// Rebuilds Y from a certificate.
SensitiveApproximant approximant_of(const Certificate& cert);

/// Number of points of (phi0 endpoints ∪ {j/b}) strictly inside the window,
/// counted without enumerating the lattice.
std::size_t count_nondiff(const SensitiveApproximant& y, const Window& w);

}  // namespace lpsens
