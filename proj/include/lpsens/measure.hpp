#pragma once

#include "lpsens/parser.hpp"
#include "lpsens/partition.hpp"
#include "lpsens/rational.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace lpsens {

/// One interval of the real line. A missing endpoint is infinite (and open).
struct Interval {
  std::optional<Rational> lower;
  bool lower_closed = false;
  std::optional<Rational> upper;
  bool upper_closed = false;

  static Interval open(Rational a, Rational b) { return {std::move(a), false, std::move(b), false}; }
  static Interval closed(Rational a, Rational b) { return {std::move(a), true, std::move(b), true}; }
  static Interval point(const Rational& a) { return {a, true, a, true}; }
  static Interval whole_line() { return {}; }

  bool is_open() const {
    return !(lower && lower_closed) && !(upper && upper_closed);
  }
  bool valid() const;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of intervals kept in normal form: sorted, pairwise disjoint,
/// and no two neighbours could be merged into one interval.
class IntervalUnion {
 public:
  IntervalUnion() = default;

  /// Normalises arbitrary (possibly overlapping) valid intervals.
  static IntervalUnion from(std::vector<Interval> intervals);
  static IntervalUnion from_partition(const Partition<bool>& indicator);

  Partition<bool> to_partition() const;

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  bool all_open() const;

  bool contains(const Rational& x) const;
  /// other ⊆ *this, decided exactly.
  bool contains(const IntervalUnion& other) const;

  IntervalUnion complement() const;
  IntervalUnion unite(const IntervalUnion& other) const;
  IntervalUnion intersect(const IntervalUnion& other) const;
  IntervalUnion minus(const IntervalUnion& other) const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<Interval> intervals_;
};

/// Standardised absolutely continuous component (unit mass before weighting).
class ContinuousComponent {
 public:
  struct Uniform {
    double a, b;
  };
  struct Normal {
    double mean, stddev;
  };
  struct Exponential {
    double rate;
  };
  struct Piecewise {
    std::vector<double> breaks;
    std::vector<std::vector<double>> coeffs;  // normalised density per piece
    std::vector<double> cumulative;           // mass left of breaks[i]
  };
  using Kind = std::variant<Uniform, Normal, Exponential, Piecewise>;

  ContinuousComponent(Rational weight, Kind kind);

  double weight() const { return weight_; }
  const Rational& weight_exact() const { return weight_exact_; }
  const Kind& kind() const { return kind_; }

  double density(double x) const;
  double cdf(double x) const;
  /// 1 - cdf(x), computed without cancellation in the upper tail.
  double survival(double x) const;
  /// Probability of the open interval (a, b); a, b may be infinite.
  double probability(double a, double b) const;
  /// Closed-form inverse cdf when the family has one.
  std::optional<double> quantile(double q) const;

  /// Smallest closed interval carrying all mass (may be infinite).
  std::pair<double, double> support() const;
  /// Support ends and density breakpoints.
  std::vector<double> knots() const;

 private:
  double weight_;
  Rational weight_exact_;
  Kind kind_;
};

struct Atom {
  Rational location;
  double x = 0.0;
  Rational mass_exact;
  double mass = 0.0;
};

/// A finite Borel measure on the reals: finitely many atoms plus a finite
/// mixture of absolutely continuous components.
class BorelMeasure {
 public:
  static BorelMeasure from_spec(const MeasureSpec& spec);
  static BorelMeasure parse(std::string_view text);

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<ContinuousComponent>& continuous_parts() const { return parts_; }
  double total_mass() const { return total_; }
  const Rational& total_mass_exact() const { return total_exact_; }
  bool is_probability() const { return total_exact_ == 1; }

  double measure_of(const Interval& interval) const;
  double measure_of(const IntervalUnion& set) const;

  /// mu((-inf, x]).
  double cdf(double x) const;
  /// mu((-inf, x)).
  double cdf_left(double x) const;
  /// mu([x, inf)).
  double tail_from(double x) const;

  /// inf{x : cdf(x) >= q} for q in (0, total_mass].
  double quantile(double q) const;

  /// Inverse-transform draws; requires a probability measure.
  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

  /// Finite (a, b) with mu(R \ (a, b)) <= delta.
  std::pair<double, double> essential_window(double delta) const;

  /// The same measure scaled to unit mass.
  BorelMeasure normalized() const;

  /// Atom locations and density breakpoints, sorted.
  std::vector<double> knots() const;

 private:
  std::pair<double, double> bracket() const;

  std::vector<Atom> atoms_;
  std::vector<ContinuousComponent> parts_;
  double total_ = 0.0;
  Rational total_exact_;
};

/// Upper-tail standard normal probability Q(z) = P(Z > z).
double normal_survival(double z);
/// Inverse of the standard normal cdf, refined to full double precision.
double normal_quantile(double p);

}  // namespace lpsens
