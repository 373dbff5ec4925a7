#pragma once

#include "lpsens/funcspace.hpp"
#include "lpsens/measure.hpp"
#include "lpsens/parser.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace lpsens {

/// Anything the norm machinery can integrate: a point evaluator plus optional
/// structure (exact evaluation at atoms, known kinks, a global bound).
struct Evaluable {
  std::function<double(double)> at;
  /// Exact-point evaluation, used at atom locations when present.
  std::function<double(const Rational&)> at_exact;
  /// Non-smooth points strictly inside (lo, hi).
  std::function<std::vector<double>(double, double)> knots;
  std::optional<double> sup_abs;

  static Evaluable constant(double c);
  static Evaluable of(const TargetFunction& f);
  static Evaluable of(const StepFunction& f);
  static Evaluable of(const TriangleWave& w);
  static Evaluable of(const SensitiveApproximant& y);

  Evaluable scaled(double c) const;
  friend Evaluable difference(const Evaluable& f, const Evaluable& g);
};

enum class NormMethod { AdaptiveQuadrature, ClosedForm, MonteCarlo };
std::string_view to_string(NormMethod m);

struct NormEstimate {
  double value = 0.0;
  double absolute_error_bound = 0.0;
  NormMethod method = NormMethod::AdaptiveQuadrature;
  double p = 1.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;

  double upper() const { return value + absolute_error_bound; }
};

/// Integral of |f|^p against mu with an error estimate.
struct PowerIntegral {
  double value = 0.0;
  double error = 0.0;
};

struct PowerIntegralOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 400000;
};

/// Atoms are summed exactly; each continuous component is integrated over its
/// support (bounded) or over a growing window sequence (unbounded) until the
/// outermost shell is negligible. Throws NonIntegrable when the shells keep
/// growing, overflow, or the budget runs out.
PowerIntegral integrate_abs_pow(const Evaluable& f, const BorelMeasure& mu, double p,
                                const PowerIntegralOptions& options = {});

NormEstimate lp_norm(const Evaluable& f, const BorelMeasure& mu, double p, double tol);
NormEstimate lp_distance(const Evaluable& f, const Evaluable& g, const BorelMeasure& mu, double p,
                         double tol);

/// Closed form for step functions: sum of |value|^p times cell/point masses.
NormEstimate lp_norm(const StepFunction& f, const BorelMeasure& mu, double p);

/// ((1/n) sum |f(xi_i)|^p)^(1/p) over inverse-transform draws; the error bound
/// is the 4-sigma confidence radius of the mean mapped through t -> t^(1/p).
NormEstimate mc_norm(const Evaluable& f, const BorelMeasure& mu, double p, std::size_t n,
                     std::uint64_t seed);

/// Upper bound on ||wave||_p: min(total_mass^(1/p), quadrature upper estimate).
double wave_norm_bound(const TriangleWave& w, const BorelMeasure& mu, double p);

/// Rejects p outside [1, inf).
void require_valid_p(double p);

}  // namespace lpsens
