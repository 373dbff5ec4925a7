#include "lpsens/norms.hpp"

#include "lpsens/errors.hpp"
#include "lpsens/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace lpsens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double abs_pow(double v, double p) {
  v = std::abs(v);
  if (p == 1.0) return v;
  if (p == 2.0) return v * v;
  return std::pow(v, p);
}

std::vector<double> inside(const std::vector<double>& sorted, double lo, double hi) {
  auto first = std::upper_bound(sorted.begin(), sorted.end(), lo);
  auto last = std::lower_bound(first, sorted.end(), hi);
  return {first, last};
}

// Window sequence for an unbounded component: index 0 is the core.
std::pair<double, double> window(const ContinuousComponent& part, int k) {
  if (const auto* n = std::get_if<ContinuousComponent::Normal>(&part.kind())) {
    const double r = 6.0 + 2.0 * k;
    return {n->mean - r * n->stddev, n->mean + r * n->stddev};
  }
  const auto& e = std::get<ContinuousComponent::Exponential>(part.kind());
  return {0.0, (20.0 + 10.0 * k) / e.rate};
}

int window_count(const ContinuousComponent& part) {
  return std::holds_alternative<ContinuousComponent::Normal>(part.kind()) ? 17 : 69;
}

}  // namespace

// ---------------------------------------------------------------------------
// Evaluable
// ---------------------------------------------------------------------------

Evaluable Evaluable::constant(double c) {
  Evaluable e;
  e.at = [c](double) { return c; };
  e.at_exact = [c](const Rational&) { return c; };
  e.sup_abs = std::abs(c);
  return e;
}

Evaluable Evaluable::of(const TargetFunction& f) {
  auto fp = std::make_shared<const TargetFunction>(f);
  Evaluable e;
  e.at = [fp](double x) { return fp->eval(x); };
  e.at_exact = [fp](const Rational& x) { return fp->eval(to_double(x)); };
  e.knots = [fp](double lo, double hi) { return inside(fp->kinks(), lo, hi); };
  return e;
}

Evaluable Evaluable::of(const StepFunction& f) {
  auto fp = std::make_shared<const StepFunction>(f);
  Evaluable e;
  e.at = [fp](double x) { return fp->eval(x); };
  e.at_exact = [fp](const Rational& x) { return to_double(fp->eval(x)); };
  e.knots = [fp](double lo, double hi) { return inside(fp->endpoints_approx(), lo, hi); };
  e.sup_abs = std::nextafter(to_double(f.sup_abs()), kInf);
  return e;
}

namespace {

std::vector<double> lattice_between(const TriangleWave& w, double lo, double hi) {
  const double b = w.b().get_d();
  std::vector<double> out;
  const double first = std::floor(lo * b);
  for (double j = first; j / b < hi; j += 1.0) {
    const double x = j / b;
    if (x > lo) out.push_back(x);
  }
  return out;
}

}  // namespace

Evaluable Evaluable::of(const TriangleWave& w) {
  auto wp = std::make_shared<const TriangleWave>(w);
  Evaluable e;
  e.at = [wp](double x) { return wp->eval(x); };
  e.at_exact = [wp](const Rational& x) { return to_double(wp->eval(x)); };
  e.knots = [wp](double lo, double hi) { return lattice_between(*wp, lo, hi); };
  e.sup_abs = 1.0;
  return e;
}

Evaluable Evaluable::of(const SensitiveApproximant& y) {
  auto yp = std::make_shared<const SensitiveApproximant>(y);
  Evaluable e;
  e.at = [yp](double x) { return yp->eval(x); };
  e.at_exact = [yp](const Rational& x) { return to_double(yp->eval(x)); };
  e.knots = [yp](double lo, double hi) {
    auto k = lattice_between(yp->wave(), lo, hi);
    auto s = inside(yp->phi0().endpoints_approx(), lo, hi);
    k.insert(k.end(), s.begin(), s.end());
    std::sort(k.begin(), k.end());
    return k;
  };
  e.sup_abs = std::nextafter(to_double(y.sup_bound()), kInf);
  return e;
}

Evaluable Evaluable::scaled(double c) const {
  Evaluable e;
  auto self = *this;
  e.at = [self, c](double x) { return c * self.at(x); };
  if (at_exact) e.at_exact = [self, c](const Rational& x) { return c * self.at_exact(x); };
  e.knots = knots;
  if (sup_abs) e.sup_abs = std::abs(c) * *sup_abs;
  return e;
}

Evaluable difference(const Evaluable& f, const Evaluable& g) {
  Evaluable e;
  e.at = [f, g](double x) { return f.at(x) - g.at(x); };
  if (f.at_exact && g.at_exact) {
    e.at_exact = [f, g](const Rational& x) { return f.at_exact(x) - g.at_exact(x); };
  }
  if (f.knots || g.knots) {
    e.knots = [f, g](double lo, double hi) {
      std::vector<double> k;
      if (f.knots) k = f.knots(lo, hi);
      if (g.knots) {
        auto kg = g.knots(lo, hi);
        k.insert(k.end(), kg.begin(), kg.end());
      }
      std::sort(k.begin(), k.end());
      k.erase(std::unique(k.begin(), k.end()), k.end());
      return k;
    };
  }
  if (f.sup_abs && g.sup_abs) e.sup_abs = *f.sup_abs + *g.sup_abs;
  return e;
}

std::string_view to_string(NormMethod m) {
  switch (m) {
    case NormMethod::AdaptiveQuadrature: return "adaptive-quadrature";
    case NormMethod::ClosedForm: return "closed-form";
    case NormMethod::MonteCarlo: return "monte-carlo";
  }
  return "?";
}

void require_valid_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw InvalidArgument("p must satisfy 1 ≤ p < ∞");
  }
}

// ---------------------------------------------------------------------------
// Integration
// ---------------------------------------------------------------------------

PowerIntegral integrate_abs_pow(const Evaluable& f, const BorelMeasure& mu, double p,
                                const PowerIntegralOptions& options) {
  require_valid_p(p);
  PowerIntegral out;
  for (const auto& a : mu.atoms()) {
    const double v = f.at_exact ? f.at_exact(a.location) : f.at(a.x);
    out.value += a.mass * abs_pow(v, p);
  }
  const auto& parts = mu.continuous_parts();
  if (parts.empty()) return out;
  const double comp_tol = options.abs_tol / static_cast<double>(parts.size());
  const double quad_tol = comp_tol / 2;
  const double tail_tol = comp_tol / 2;
  const auto measure_knots = mu.knots();
  const std::optional<double> sup_pow =
      f.sup_abs ? std::optional<double>(abs_pow(*f.sup_abs, p)) : std::nullopt;

  for (const auto& part : parts) {
    auto integrand = [&](double x) {
      const double d = part.density(x);
      if (d == 0.0) return 0.0;
      return part.weight() * d * abs_pow(f.at(x), p);
    };
    auto region = [&](double lo, double hi, double tol) {
      std::vector<double> k{lo, hi};
      if (f.knots) {
        auto fk = f.knots(lo, hi);
        k.insert(k.end(), fk.begin(), fk.end());
      }
      auto mk = inside(measure_knots, lo, hi);
      k.insert(k.end(), mk.begin(), mk.end());
      return integrate(integrand, std::move(k),
                       QuadratureOptions{tol, options.rel_tol, options.max_intervals});
    };

    const auto [slo, shi] = part.support();
    if (std::isfinite(slo) && std::isfinite(shi)) {
      auto r = region(slo, shi, quad_tol);
      out.value += r.value;
      out.error += r.error;
      continue;
    }

    // Unbounded support: core window, then outward shells.
    const int windows = window_count(part);
    auto [lo, hi] = window(part, 0);
    auto core = region(lo, hi, quad_tol / 2);
    out.value += core.value;
    out.error += core.error;
    double prev = core.value;
    int increases = 0;
    bool settled = false;
    const double shell_tol = quad_tol / 2 / windows;
    for (int k = 1; k < windows && !settled; ++k) {
      const double beyond =
          part.weight() * (part.cdf(lo) + (std::isfinite(hi) ? part.survival(hi) : 0.0));
      if (sup_pow && *sup_pow * beyond <= tail_tol) {
        out.error += *sup_pow * beyond;
        settled = true;
        break;
      }
      const auto [nlo, nhi] = window(part, k);
      double shell = 0.0;
      try {
        if (nlo < lo) {
          auto r = region(nlo, lo, shell_tol);
          shell += r.value;
          out.error += r.error;
        }
        if (nhi > hi) {
          auto r = region(hi, nhi, shell_tol);
          shell += r.value;
          out.error += r.error;
        }
      } catch (const EvalError& e) {
        if (e.kind() == EvalError::Kind::NonFinite) {
          throw NonIntegrable("integrand overflows in the tail: the p-th moment looks infinite");
        }
        throw;
      }
      out.value += shell;
      lo = nlo;
      hi = nhi;
      if (!sup_pow && shell <= tail_tol && shell <= prev) {
        // The remainder beyond a decaying shell is charged at the shell's size.
        out.error += shell;
        settled = true;
        break;
      }
      increases = shell > prev ? increases + 1 : 0;
      if (increases >= 3) {
        throw NonIntegrable("tail contributions grow across successive windows: "
                            "the p-th moment looks infinite");
      }
      prev = shell;
    }
    if (!settled) throw NonIntegrable("tail did not settle within the window budget");
  }
  if (!std::isfinite(out.value)) throw NonIntegrable("integral overflowed");
  // Rounding in the summations.
  out.error += 16 * std::numeric_limits<double>::epsilon() * out.value;
  return out;
}

namespace {

NormEstimate norm_from_integral(const PowerIntegral& r, double p) {
  NormEstimate est;
  est.p = p;
  est.method = NormMethod::AdaptiveQuadrature;
  const double inv = 1.0 / p;
  est.value = std::pow(r.value, inv);
  const double up = std::pow(r.value + r.error, inv) - est.value;
  const double down = est.value - std::pow(std::max(0.0, r.value - r.error), inv);
  est.absolute_error_bound = std::max(up, down);
  return est;
}

}  // namespace

NormEstimate lp_norm(const Evaluable& f, const BorelMeasure& mu, double p, double tol) {
  require_valid_p(p);
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  double tol_int = std::pow(tol, p);
  if (p > 1.0) {
    // d(I^(1/p)) = dI / (p I^(1-1/p)): a rough pass sizes the integral tolerance.
    auto rough = integrate_abs_pow(f, mu, p, {std::max(tol_int, 1e-300), 1e-3, 100000});
    const double lower = std::max(0.0, rough.value - rough.error);
    tol_int = std::max(tol_int, 0.5 * p * tol * std::pow(lower, 1.0 - 1.0 / p));
  }
  auto r = integrate_abs_pow(f, mu, p, {tol_int, 0.0, 400000});
  return norm_from_integral(r, p);
}

NormEstimate lp_distance(const Evaluable& f, const Evaluable& g, const BorelMeasure& mu, double p,
                         double tol) {
  return lp_norm(difference(f, g), mu, p, tol);
}

NormEstimate lp_norm(const StepFunction& f, const BorelMeasure& mu, double p) {
  require_valid_p(p);
  const auto& part = f.partition();
  const auto& br = part.breakpoints();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  // Each measure_of is a difference of cdf values, so its absolute error is a
  // few ulps of the total mass; the products and the sum add relative ulps.
  const double mass_ulp = 2 * eps * mu.total_mass();
  double sum = 0.0;
  double err = 0.0;
  std::size_t n_terms = 0;
  auto add = [&](const Rational& v, double m) {
    const double w = abs_pow(to_double(v), p);
    sum += w * m;
    err += w * (mass_ulp + 4 * eps * m);
    ++n_terms;
  };
  for (std::size_t k = 0; k < part.cells().size(); ++k) {
    const auto& v = part.cells()[k];
    if (v == 0) continue;
    Interval cell;
    if (k > 0) cell.lower = br[k - 1];
    if (k < br.size()) cell.upper = br[k];
    add(v, mu.measure_of(cell));
  }
  for (std::size_t k = 0; k < br.size(); ++k) {
    const auto& v = part.points()[k];
    if (v == 0) continue;
    add(v, mu.measure_of(Interval::point(br[k])));
  }
  err += static_cast<double>(n_terms + 1) * eps * sum;
  PowerIntegral r;
  r.value = sum;
  r.error = sum == 0.0 ? 0.0 : err;
  NormEstimate est = norm_from_integral(r, p);
  est.method = NormMethod::ClosedForm;
  return est;
}

NormEstimate mc_norm(const Evaluable& f, const BorelMeasure& mu, double p, std::size_t n,
                     std::uint64_t seed) {
  require_valid_p(p);
  if (n < 1000) throw InvalidArgument("Monte Carlo norm needs at least 1000 samples");
  if (!mu.is_probability()) {
    throw InvalidArgument("Monte Carlo norm is defined for probability measures only");
  }
  const auto xs = mu.sample(n, seed);
  std::vector<double> v(n);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = abs_pow(f.at(xs[i]), p);
    sum += v[i];
  }
  const double mean = static_cast<double>(sum / static_cast<long double>(n));
  long double ss = 0.0L;
  for (double vi : v) ss += (vi - mean) * static_cast<long double>(vi - mean);
  const double sd = n > 1 ? std::sqrt(static_cast<double>(ss / static_cast<long double>(n - 1)))
                          : 0.0;
  const double radius = 4.0 * sd / std::sqrt(static_cast<double>(n));

  NormEstimate est;
  est.p = p;
  est.method = NormMethod::MonteCarlo;
  est.n_samples = n;
  est.seed = seed;
  const double inv = 1.0 / p;
  est.value = std::pow(mean, inv);
  est.absolute_error_bound = std::max(std::pow(mean + radius, inv) - est.value,
                                      est.value - std::pow(std::max(0.0, mean - radius), inv));
  return est;
}

double wave_norm_bound(const TriangleWave& w, const BorelMeasure& mu, double p) {
  require_valid_p(p);
  const double a_priori = std::pow(mu.total_mass(), 1.0 / p);
  try {
    const auto est = lp_norm(Evaluable::of(w), mu, p, 1e-6);
    return std::min(a_priori, est.upper());
  } catch (const NonIntegrable&) {
    return a_priori;
  }
}

}  // namespace lpsens
