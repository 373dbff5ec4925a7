#pragma once

#include "lpsens/measure.hpp"
#include "lpsens/partition.hpp"
#include "lpsens/rational.hpp"

#include <optional>
#include <vector>

namespace lpsens {

/// Finite open window (lower, upper) used by the structural queries.
struct Window {
  Rational lower;
  Rational upper;

  friend bool operator==(const Window&, const Window&) = default;
};

/// One term x_j * 1_{V_j} of a step function; V_j is open, either end may be
/// infinite.
struct StepTerm {
  Rational value;
  std::optional<Rational> lower;
  std::optional<Rational> upper;
};

/// A point where the function differs from the open-interval reading (which
/// would be zero there).
struct StepException {
  Rational point;
  Rational value;
};

/// sum_j x_j 1_{V_j} over disjoint open intervals, plus finitely many exception
/// points. Exact; every breakpoint is a genuine discontinuity.
class StepFunction {
 public:
  StepFunction();
  explicit StepFunction(Partition<Rational> partition);

  /// value * 1_u; every interval of u must be open.
  static StepFunction indicator(const IntervalUnion& u, const Rational& value);

  /// Rebuilds from serialised terms; rejects overlapping or unsorted input.
  static StepFunction from_terms(const std::vector<StepTerm>& terms,
                                 const std::vector<StepException>& exceptions);

  const Partition<Rational>& partition() const { return part_; }
  std::vector<StepTerm> terms() const;
  std::vector<StepException> exceptions() const;

  /// Finite set outside of which the function is locally constant.
  const std::vector<Rational>& endpoints() const { return part_.breakpoints(); }
  /// Nearest doubles of endpoints().
  const std::vector<double>& endpoints_approx() const { return breaks_d_; }

  Rational eval(const Rational& x) const { return part_.at(x); }
  double eval(double x) const;

  Rational sup_abs() const;
  bool is_zero() const;

  StepFunction operator+(const StepFunction& other) const;
  StepFunction operator-(const StepFunction& other) const;
  StepFunction scaled(const Rational& c) const;

  friend bool operator==(const StepFunction& a, const StepFunction& b) {
    return a.part_ == b.part_;
  }

 private:
  Partition<Rational> part_;
  std::vector<double> breaks_d_;
  std::vector<double> cells_d_;
};

/// Continuous zigzag: 0 at even multiples of 1/b, 1 at odd ones, affine in
/// between with slope +-b.
class TriangleWave {
 public:
  explicit TriangleWave(mpz_class b);

  const mpz_class& b() const { return b_; }

  Rational eval(const Rational& x) const;
  double eval(double x) const;

  /// Lattice points j/b strictly inside the window.
  std::vector<Rational> lattice(const Window& w) const;

  friend bool operator==(const TriangleWave&, const TriangleWave&) = default;

 private:
  mpz_class b_;
  double b_d_;
};

/// b = ceil(2 (M + 1) / eps), so that (eps / 2) * b >= M + 1.
TriangleWave build_zigzag(const Rational& eps, const Rational& M);

/// b = ceil((M + 1) / scale), so that scale * b >= M + 1.
TriangleWave zigzag_for_scale(const Rational& scale, const Rational& M);

Rational eval_wave(const TriangleWave& w, const Rational& x);

struct ApproximantInfo {
  Rational eps;
  Rational M;
  double p = 1.0;
};

struct SlopeCell {
  Rational lower;
  Rational upper;
  Rational slope;
};

/// Y = phi0 + scale * wave.
class SensitiveApproximant {
 public:
  SensitiveApproximant(StepFunction phi0, Rational scale, TriangleWave wave,
                       ApproximantInfo info = {});

  const StepFunction& phi0() const { return phi0_; }
  const Rational& scale() const { return scale_; }
  const TriangleWave& wave() const { return wave_; }
  const ApproximantInfo& info() const { return info_; }

  Rational eval(const Rational& x) const;
  double eval(double x) const;

  /// sup|phi0| + scale.
  Rational sup_bound() const;
  /// scale * b, the absolute slope on every affine cell.
  Rational min_abs_slope() const;

  /// phi0 endpoints and wave lattice inside the open window, sorted, unique.
  std::vector<Rational> nondiff_points(const Window& w) const;
  /// Maximal affine cells of the window and their exact slopes.
  std::vector<SlopeCell> slope_profile(const Window& w) const;

 private:
  StepFunction phi0_;
  Rational scale_;
  TriangleWave wave_;
  ApproximantInfo info_;
  double scale_d_;
};

}  // namespace lpsens
