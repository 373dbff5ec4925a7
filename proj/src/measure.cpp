#include "lpsens/measure.hpp"

#include "lpsens/errors.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace lpsens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Partition<bool> interval_indicator(const Interval& iv) {
  if (iv.lower && iv.upper) {
    if (*iv.lower == *iv.upper) {
      return Partition<bool>({*iv.lower}, {false, false}, {true});
    }
    return Partition<bool>({*iv.lower, *iv.upper}, {false, true, false},
                           {iv.lower_closed, iv.upper_closed});
  }
  if (iv.upper) return Partition<bool>({*iv.upper}, {true, false}, {iv.upper_closed});
  if (iv.lower) return Partition<bool>({*iv.lower}, {false, true}, {iv.lower_closed});
  return Partition<bool>(true);
}

}  // namespace

// ---------------------------------------------------------------------------
// Intervals
// ---------------------------------------------------------------------------

bool Interval::valid() const {
  if ((!lower && lower_closed) || (!upper && upper_closed)) return false;
  if (lower && upper) {
    if (*lower < *upper) return true;
    return *lower == *upper && lower_closed && upper_closed;
  }
  return true;
}

IntervalUnion IntervalUnion::from(std::vector<Interval> intervals) {
  std::vector<Partition<bool>> parts;
  parts.reserve(intervals.size());
  for (const auto& iv : intervals) {
    if (!iv.valid()) throw InvalidArgument("empty or malformed interval");
    parts.push_back(interval_indicator(iv));
  }
  return from_partition(
      reduce_all(std::move(parts), [](bool a, bool b) { return a || b; }, false));
}

IntervalUnion IntervalUnion::from_partition(const Partition<bool>& indicator) {
  const auto p = indicator.simplified();
  const auto& br = p.breakpoints();
  const auto& cells = p.cells();
  const auto& points = p.points();
  const std::size_t n = br.size();
  IntervalUnion out;
  // Walk cell0, point0, cell1, ..., cell_n; element 2k is cell k, 2k+1 point k.
  std::optional<Interval> run;
  for (std::size_t e = 0; e <= 2 * n; ++e) {
    const bool is_cell = e % 2 == 0;
    const std::size_t k = e / 2;
    const bool value = is_cell ? cells[k] : points[k];
    if (value && !run) {
      run = Interval{};
      if (is_cell) {
        if (k > 0) run->lower = br[k - 1];
      } else {
        run->lower = br[k];
        run->lower_closed = true;
      }
    } else if (!value && run) {
      if (is_cell) {
        run->upper = br[k - 1];
        run->upper_closed = true;
      } else {
        run->upper = br[k];
      }
      out.intervals_.push_back(*run);
      run.reset();
    }
  }
  if (run) out.intervals_.push_back(*run);
  return out;
}

Partition<bool> IntervalUnion::to_partition() const {
  std::vector<Partition<bool>> parts;
  parts.reserve(intervals_.size());
  for (const auto& iv : intervals_) parts.push_back(interval_indicator(iv));
  return reduce_all(std::move(parts), [](bool a, bool b) { return a || b; }, false);
}

bool IntervalUnion::all_open() const {
  return std::all_of(intervals_.begin(), intervals_.end(),
                     [](const Interval& iv) { return iv.is_open(); });
}

bool IntervalUnion::contains(const Rational& x) const { return to_partition().at(x); }

bool IntervalUnion::contains(const IntervalUnion& other) const {
  return other.minus(*this).empty();
}

IntervalUnion IntervalUnion::complement() const {
  return from_partition(to_partition().map([](bool v) { return !v; }));
}

IntervalUnion IntervalUnion::unite(const IntervalUnion& other) const {
  return from_partition(
      combine(to_partition(), other.to_partition(), [](bool a, bool b) { return a || b; }));
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
  return from_partition(
      combine(to_partition(), other.to_partition(), [](bool a, bool b) { return a && b; }));
}

IntervalUnion IntervalUnion::minus(const IntervalUnion& other) const {
  return from_partition(
      combine(to_partition(), other.to_partition(), [](bool a, bool b) { return a && !b; }));
}

// ---------------------------------------------------------------------------
// Normal distribution helpers
// ---------------------------------------------------------------------------

// glibc erfc is a rational-approximation implementation accurate to about
// one ulp, far inside the 1e-13 absolute budget.
double normal_survival(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  // Acklam's rational approximation, then Halley refinement.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  for (int it = 0; it < 2; ++it) {
    const double e = (x < 0 ? normal_survival(-x) : 1.0 - normal_survival(x)) - p;
    const double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    x = x - u / (1 + x * u / 2);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Continuous components
// ---------------------------------------------------------------------------

namespace {

double poly_antiderivative(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k] / static_cast<double>(k + 1);
  return acc * x;
}

double poly_eval(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

ContinuousComponent::Kind kind_from_spec(const ComponentKind& kind) {
  return std::visit(
      [](const auto& k) -> ContinuousComponent::Kind {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, UniformKind>) {
          return ContinuousComponent::Uniform{to_double(k.a), to_double(k.b)};
        } else if constexpr (std::is_same_v<T, NormalKind>) {
          return ContinuousComponent::Normal{to_double(k.mean), to_double(k.stddev)};
        } else if constexpr (std::is_same_v<T, ExponentialKind>) {
          return ContinuousComponent::Exponential{to_double(k.rate)};
        } else if constexpr (std::is_same_v<T, PiecewiseDensityKind>) {
          // Exact total mass, then normalise.
          Rational z = 0;
          for (std::size_t i = 0; i < k.pieces.size(); ++i) {
            const auto& c = k.pieces[i];
            Rational ua = 1, ub = 1;
            for (std::size_t j = 0; j < c.size(); ++j) {
              ua *= k.breakpoints[i];
              ub *= k.breakpoints[i + 1];
              z += c[j] * (ub - ua) / Rational(static_cast<long>(j + 1));
            }
          }
          if (z <= 0) throw InvalidArgument("piecewise density has zero mass");
          ContinuousComponent::Piecewise pw;
          for (const auto& b : k.breakpoints) pw.breaks.push_back(to_double(b));
          Rational cum = 0;
          for (std::size_t i = 0; i < k.pieces.size(); ++i) {
            std::vector<double> c;
            Rational ua = 1, ub = 1;
            for (std::size_t j = 0; j < k.pieces[i].size(); ++j) {
              const Rational cj = k.pieces[i][j] / z;
              c.push_back(to_double(cj));
              ua *= k.breakpoints[i];
              ub *= k.breakpoints[i + 1];
              cum += cj * (ub - ua) / Rational(static_cast<long>(j + 1));
            }
            pw.coeffs.push_back(std::move(c));
            pw.cumulative.push_back(to_double(cum));
          }
          pw.cumulative.insert(pw.cumulative.begin(), 0.0);
          return pw;
        } else {
          throw InvalidArgument("atoms are not continuous components");
        }
      },
      kind);
}

}  // namespace

ContinuousComponent::ContinuousComponent(Rational weight, Kind kind)
    : weight_(to_double(weight)), weight_exact_(std::move(weight)), kind_(std::move(kind)) {}

double ContinuousComponent::density(double x) const {
  return std::visit(
      [x](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return (x > k.a && x < k.b) ? 1.0 / (k.b - k.a) : 0.0;
        } else if constexpr (std::is_same_v<T, Normal>) {
          const double z = (x - k.mean) / k.stddev;
          return std::exp(-0.5 * z * z) / (k.stddev * std::sqrt(2 * std::numbers::pi));
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return x < 0 ? 0.0 : k.rate * std::exp(-k.rate * x);
        } else {
          if (x <= k.breaks.front() || x >= k.breaks.back()) return 0.0;
          const auto it = std::upper_bound(k.breaks.begin(), k.breaks.end(), x);
          const auto i = static_cast<std::size_t>(it - k.breaks.begin()) - 1;
          return std::max(0.0, poly_eval(k.coeffs[i], x));
        }
      },
      kind_);
}

double ContinuousComponent::cdf(double x) const {
  return std::visit(
      [x](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          if (x <= k.a) return 0.0;
          if (x >= k.b) return 1.0;
          return (x - k.a) / (k.b - k.a);
        } else if constexpr (std::is_same_v<T, Normal>) {
          return normal_survival(-(x - k.mean) / k.stddev);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return x <= 0 ? 0.0 : -std::expm1(-k.rate * x);
        } else {
          if (x <= k.breaks.front()) return 0.0;
          if (x >= k.breaks.back()) return 1.0;
          const auto it = std::upper_bound(k.breaks.begin(), k.breaks.end(), x);
          const auto i = static_cast<std::size_t>(it - k.breaks.begin()) - 1;
          const double v = k.cumulative[i] + poly_antiderivative(k.coeffs[i], x) -
                           poly_antiderivative(k.coeffs[i], k.breaks[i]);
          return std::clamp(v, 0.0, 1.0);
        }
      },
      kind_);
}

double ContinuousComponent::survival(double x) const {
  if (const auto* n = std::get_if<Normal>(&kind_)) {
    return normal_survival((x - n->mean) / n->stddev);
  }
  if (const auto* e = std::get_if<Exponential>(&kind_)) {
    return x <= 0 ? 1.0 : std::exp(-e->rate * x);
  }
  return 1.0 - cdf(x);
}

double ContinuousComponent::probability(double a, double b) const {
  if (!(a < b)) return 0.0;
  if (const auto* n = std::get_if<Normal>(&kind_)) {
    const double za = (a - n->mean) / n->stddev;
    const double zb = (b - n->mean) / n->stddev;
    if (za >= 0) return std::max(0.0, normal_survival(za) - normal_survival(zb));
    if (zb <= 0) return std::max(0.0, normal_survival(-zb) - normal_survival(-za));
    return std::max(0.0, 1.0 - normal_survival(-za) - normal_survival(zb));
  }
  if (const auto* e = std::get_if<Exponential>(&kind_)) {
    const double lo = std::max(a, 0.0);
    const double hi = std::max(b, 0.0);
    if (!(lo < hi)) return 0.0;
    if (std::isinf(hi)) return std::exp(-e->rate * lo);
    return std::exp(-e->rate * lo) * -std::expm1(-e->rate * (hi - lo));
  }
  return std::max(0.0, cdf(b) - cdf(a));
}

std::optional<double> ContinuousComponent::quantile(double q) const {
  if (const auto* u = std::get_if<Uniform>(&kind_)) return u->a + (u->b - u->a) * q;
  if (const auto* n = std::get_if<Normal>(&kind_)) return n->mean + n->stddev * normal_quantile(q);
  if (const auto* e = std::get_if<Exponential>(&kind_)) return -std::log1p(-q) / e->rate;
  return std::nullopt;
}

std::pair<double, double> ContinuousComponent::support() const {
  return std::visit(
      [](const auto& k) -> std::pair<double, double> {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return {k.a, k.b};
        } else if constexpr (std::is_same_v<T, Normal>) {
          return {-kInf, kInf};
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return {0.0, kInf};
        } else {
          return {k.breaks.front(), k.breaks.back()};
        }
      },
      kind_);
}

std::vector<double> ContinuousComponent::knots() const {
  if (const auto* pw = std::get_if<Piecewise>(&kind_)) return pw->breaks;
  auto [lo, hi] = support();
  std::vector<double> out;
  if (std::isfinite(lo)) out.push_back(lo);
  if (std::isfinite(hi)) out.push_back(hi);
  return out;
}

// ---------------------------------------------------------------------------
// Borel measures
// ---------------------------------------------------------------------------

BorelMeasure BorelMeasure::from_spec(const MeasureSpec& spec) {
  BorelMeasure mu;
  std::map<Rational, Rational> atoms;
  for (const auto& c : spec.components) {
    if (c.weight == 0) continue;
    if (const auto* a = std::get_if<AtomKind>(&c.kind)) {
      atoms[a->location] += c.weight;
    } else {
      mu.parts_.emplace_back(c.weight, kind_from_spec(c.kind));
    }
  }
  for (auto& [loc, mass] : atoms) {
    mu.atoms_.push_back(Atom{loc, to_double(loc), mass, to_double(mass)});
  }
  mu.total_exact_ = spec.declared_total_mass;
  mu.total_ = to_double(mu.total_exact_);
  return mu;
}

BorelMeasure BorelMeasure::parse(std::string_view text) { return from_spec(parse_measure(text)); }

double BorelMeasure::measure_of(const Interval& iv) const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    bool inside = true;
    if (iv.lower) inside = iv.lower_closed ? a.location >= *iv.lower : a.location > *iv.lower;
    if (inside && iv.upper) {
      inside = iv.upper_closed ? a.location <= *iv.upper : a.location < *iv.upper;
    }
    if (inside) m += a.mass;
  }
  const double lo = iv.lower ? to_double(*iv.lower) : -kInf;
  const double hi = iv.upper ? to_double(*iv.upper) : kInf;
  for (const auto& p : parts_) m += p.weight() * p.probability(lo, hi);
  return m;
}

double BorelMeasure::measure_of(const IntervalUnion& set) const {
  double m = 0.0;
  for (const auto& iv : set.intervals()) m += measure_of(iv);
  return m;
}

double BorelMeasure::cdf(double x) const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (a.x <= x) m += a.mass;
  }
  for (const auto& p : parts_) m += p.weight() * p.cdf(x);
  return m;
}

double BorelMeasure::cdf_left(double x) const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (a.x < x) m += a.mass;
  }
  for (const auto& p : parts_) m += p.weight() * p.cdf(x);
  return m;
}

double BorelMeasure::tail_from(double x) const {
  double m = 0.0;
  for (const auto& a : atoms_) {
    if (a.x >= x) m += a.mass;
  }
  for (const auto& p : parts_) m += p.weight() * p.survival(x);
  return m;
}

std::pair<double, double> BorelMeasure::bracket() const {
  double lo = kInf;
  double hi = -kInf;
  for (const auto& a : atoms_) {
    lo = std::min(lo, a.x);
    hi = std::max(hi, a.x);
  }
  for (const auto& p : parts_) {
    auto [a, b] = p.support();
    if (const auto* n = std::get_if<ContinuousComponent::Normal>(&p.kind())) {
      a = n->mean - 40 * n->stddev;
      b = n->mean + 40 * n->stddev;
    } else if (const auto* e = std::get_if<ContinuousComponent::Exponential>(&p.kind())) {
      b = 800.0 / e->rate;
    }
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  return {lo - 1.0, hi + 1.0};
}

double BorelMeasure::quantile(double q) const {
  if (!(q > 0.0) || q > total_) {
    throw InvalidArgument("quantile level must lie in (0, total_mass]");
  }
  if (atoms_.empty() && parts_.size() == 1) {
    if (auto x = parts_.front().quantile(std::min(1.0, q / parts_.front().weight()))) {
      if (std::isfinite(*x)) return *x;
    }
  }
  auto [lo, hi] = bracket();
  if (cdf(lo) >= q) return lo;
  if (cdf(hi) < q) return hi;
  // Invariant: cdf(lo) < q <= cdf(hi).
  while (hi - lo > 1e-12) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (cdf(mid) >= q) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  for (const auto& a : atoms_) {
    if (a.x > lo && a.x <= hi && cdf(a.x) >= q) return a.x;
  }
  return hi;
}

std::vector<double> BorelMeasure::sample(std::size_t n, std::uint64_t seed) const {
  if (!is_probability()) {
    throw InvalidArgument("sampling is defined for probability measures only");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Strictly inside (0, 1).
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    out.push_back(quantile(u));
  }
  return out;
}

std::pair<double, double> BorelMeasure::essential_window(double delta) const {
  if (!(delta > 0.0) || !(delta < total_)) {
    throw InvalidArgument("essential_window needs 0 < delta < total_mass");
  }
  const double half = delta / 2;
  const auto [blo, bhi] = bracket();
  // Lower end: sup{x : cdf(x) <= delta/2}.
  double lo = blo;
  double hi = bhi;
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(lo))) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (cdf(mid) <= half) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double a = lo;
  // Upper end: inf{x : mu([x, inf)) <= delta/2}.
  lo = blo;
  hi = bhi;
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    if (tail_from(mid) <= half) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return {a, hi};
}

BorelMeasure BorelMeasure::normalized() const {
  BorelMeasure mu;
  for (const auto& a : atoms_) {
    Rational m = a.mass_exact / total_exact_;
    mu.atoms_.push_back(Atom{a.location, a.x, m, to_double(m)});
  }
  for (const auto& p : parts_) {
    mu.parts_.emplace_back(Rational(p.weight_exact() / total_exact_), p.kind());
  }
  mu.total_exact_ = 1;
  mu.total_ = 1.0;
  return mu;
}

std::vector<double> BorelMeasure::knots() const {
  std::vector<double> out;
  for (const auto& a : atoms_) out.push_back(a.x);
  for (const auto& p : parts_) {
    auto k = p.knots();
    out.insert(out.end(), k.begin(), k.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace lpsens
