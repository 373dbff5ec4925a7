#include "lpsens/approx.hpp"

#include "lpsens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lpsens {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxGridCells = std::size_t{1} << 20;

mpz_class floor_q(const Rational& v) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
  return out;
}

Rational pow2(int k) {
  Rational out(1);
  if (k >= 0) {
    mpz_mul_2exp(out.get_num_mpz_t(), out.get_num_mpz_t(), static_cast<unsigned>(k));
  } else {
    mpz_mul_2exp(out.get_den_mpz_t(), out.get_den_mpz_t(), static_cast<unsigned>(-k));
  }
  out.canonicalize();
  return out;
}

// A few ulps above m^(1/p).
double root_up(double m, double p) {
  double r = std::pow(m, 1.0 / p);
  for (int i = 0; i < 4; ++i) r = std::nextafter(r, kInf);
  return r;
}

// Smallest double >= v.
double double_up(const Rational& v) {
  double d = to_double(v);
  if (rational_from_double(d) < v) d = std::nextafter(d, kInf);
  return d;
}

}  // namespace

ApproxRequest make_request(std::string_view target, std::string_view measure, double p,
                           const Rational& eps, const Rational& M) {
  require_valid_p(p);
  if (eps <= 0) throw InvalidArgument("eps must be positive");
  if (M < 0) throw InvalidArgument("M must be nonnegative");
  ApproxRequest req{parse_target(target), BorelMeasure::parse(measure), p, eps, M,
                    std::string(measure)};
  if (req.mu.total_mass_exact() <= 0) throw InvalidArgument("measure must have positive mass");
  return req;
}

void check_moment(const ApproxRequest& req) {
  try {
    integrate_abs_pow(Evaluable::of(req.target), req.mu, req.p, {1e-8, 1e-3, 400000});
  } catch (const NonIntegrable& e) {
    throw HypothesisViolation(std::string("target does not appear to lie in L^p: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Outer regularity and truncation
// ---------------------------------------------------------------------------

IntervalUnion approximate_borel_set(const IntervalUnion& B, const BorelMeasure& mu, double p,
                                    double tol) {
  require_valid_p(p);
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  if (B.all_open()) return B;
  const double target = std::pow(tol, p);
  Rational delta = rational_from_decimal_double(tol / 10);
  double achieved = kInf;
  for (int attempt = 0; attempt < 200; ++attempt, delta /= 2) {
    std::vector<Interval> grown;
    grown.reserve(B.intervals().size());
    for (const auto& iv : B.intervals()) {
      Interval g;
      if (iv.lower) g.lower = iv.lower_closed ? Rational(*iv.lower - delta) : *iv.lower;
      if (iv.upper) g.upper = iv.upper_closed ? Rational(*iv.upper + delta) : *iv.upper;
      grown.push_back(std::move(g));
    }
    auto V = IntervalUnion::from(std::move(grown));
    achieved = mu.measure_of(V.minus(B));
    if (achieved < target && V.contains(B)) return V;
  }
  throw BudgetExhausted("outer approximation did not reach the requested tolerance", achieved);
}

Truncation truncate_union(const IntervalEnumerator& intervals, double union_mass,
                          const BorelMeasure& mu, double p, double tol, std::size_t cap) {
  require_valid_p(p);
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
  const double target = std::pow(tol, p);
  Truncation out;
  double covered = 0.0;
  out.tail = union_mass;
  for (std::size_t j = 0; out.tail >= target; ++j) {
    if (j >= cap) {
      throw BudgetExhausted("interval cap reached before the tail bound was met", out.tail);
    }
    auto iv = intervals(j);
    if (!iv) throw BudgetExhausted("enumeration ended before the tail bound was met", out.tail);
    covered += mu.measure_of(*iv);
    out.kept.push_back(std::move(*iv));
    out.tail = union_mass - covered;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact simple-form reading of a target
// ---------------------------------------------------------------------------

namespace {

using Steps = Partition<Rational>;

bool has_zero(const Steps& s) {
  auto zero = [](const Rational& v) { return v == 0; };
  return std::any_of(s.cells().begin(), s.cells().end(), zero) ||
         std::any_of(s.points().begin(), s.points().end(), zero);
}

Rational int_pow(const Rational& base, long k) {
  mpz_class num;
  mpz_class den;
  const auto e = static_cast<unsigned long>(k < 0 ? -k : k);
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  Rational out = k < 0 ? Rational(den, num) : Rational(num, den);
  out.canonicalize();
  return out;
}

bool compare(Comparison cmp, int sign) {
  switch (cmp) {
    case Comparison::Lt: return sign < 0;
    case Comparison::Le: return sign <= 0;
    case Comparison::Gt: return sign > 0;
    case Comparison::Ge: return sign >= 0;
    case Comparison::Eq: return sign == 0;
  }
  return false;
}

std::optional<Steps> simple(const Expr& e);

std::optional<Partition<bool>> truth(const Conditional& c) {
  auto la = affine_form(*c.lhs);
  auto ra = affine_form(*c.rhs);
  if (la && ra) {
    const Rational slope = la->first - ra->first;
    const Rational icept = la->second - ra->second;
    if (slope == 0) return Partition<bool>(compare(c.cmp, sgn(icept)));
    const Rational root = -icept / slope;
    const int s = sgn(slope);
    return Partition<bool>({root}, {compare(c.cmp, -s), compare(c.cmp, s)}, {compare(c.cmp, 0)})
        .simplified();
  }
  auto ls = simple(*c.lhs);
  auto rs = simple(*c.rhs);
  if (!ls || !rs) return std::nullopt;
  return combine(*ls, *rs, [cmp = c.cmp](const Rational& a, const Rational& b) {
    return compare(cmp, sgn(Rational(a - b)));
  });
}

std::optional<Steps> simple(const Expr& e) {
  if (const auto* c = std::get_if<Constant>(&e.node)) return Steps(c->value);
  if (std::holds_alternative<Variable>(e.node)) return std::nullopt;
  if (const auto* n = std::get_if<Negate>(&e.node)) {
    auto v = simple(*n->operand);
    if (!v) return std::nullopt;
    return v->map([](const Rational& a) { return Rational(-a); });
  }
  if (const auto* b = std::get_if<Binary>(&e.node)) {
    auto l = simple(*b->lhs);
    auto r = simple(*b->rhs);
    if (!l || !r) return std::nullopt;
    switch (b->op) {
      case BinaryOp::Add:
        return combine(*l, *r, [](const Rational& x, const Rational& y) { return Rational(x + y); });
      case BinaryOp::Sub:
        return combine(*l, *r, [](const Rational& x, const Rational& y) { return Rational(x - y); });
      case BinaryOp::Mul:
        return combine(*l, *r, [](const Rational& x, const Rational& y) { return Rational(x * y); });
      case BinaryOp::Div:
        if (has_zero(*r)) return std::nullopt;
        return combine(*l, *r, [](const Rational& x, const Rational& y) { return Rational(x / y); });
      case BinaryOp::Pow: {
        if (!r->breakpoints().empty()) return std::nullopt;
        const Rational& k = r->cells()[0];
        if (k.get_den() != 1 || abs(k) > 64) return std::nullopt;
        const long ki = k.get_num().get_si();
        if (ki < 0 && has_zero(*l)) return std::nullopt;
        return l->map([ki](const Rational& x) { return int_pow(x, ki); });
      }
    }
    return std::nullopt;
  }
  if (const auto* call = std::get_if<Call>(&e.node)) {
    std::vector<Steps> args;
    for (const auto& a : call->args) {
      auto v = simple(*a);
      if (!v) return std::nullopt;
      args.push_back(std::move(*v));
    }
    switch (call->fn) {
      case Function::Abs:
        return args.at(0).map([](const Rational& x) { return abs(x); });
      case Function::Min:
        return reduce_all(
            std::move(args),
            [](const Rational& x, const Rational& y) { return x < y ? x : y; },
            Rational(0));
      case Function::Max:
        return reduce_all(
            std::move(args),
            [](const Rational& x, const Rational& y) { return x < y ? y : x; },
            Rational(0));
      default:
        return std::nullopt;
    }
  }
  const auto& c = std::get<Conditional>(e.node);
  auto cond = truth(c);
  auto t = simple(*c.then_branch);
  auto f = simple(*c.else_branch);
  if (!cond || !t || !f) return std::nullopt;
  auto taken = combine(*cond, *t, [](bool b, const Rational& v) { return b ? v : Rational(0); });
  auto other = combine(*cond, *f, [](bool b, const Rational& v) { return b ? Rational(0) : v; });
  return combine(taken, other, [](const Rational& x, const Rational& y) { return Rational(x + y); });
}

}  // namespace

std::optional<Partition<Rational>> exact_simple_form(const TargetFunction& f) {
  return simple(f.root());
}

// ---------------------------------------------------------------------------
// Step approximation
// ---------------------------------------------------------------------------

namespace {

std::optional<StepApproximation> simple_route(const ApproxRequest& req,
                                              const Partition<Rational>& x, double budget) {
  std::vector<Rational> levels;
  for (const auto& v : x.cells()) levels.push_back(v);
  for (const auto& v : x.points()) levels.push_back(v);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  levels.erase(std::remove(levels.begin(), levels.end(), Rational(0)), levels.end());

  StepFunction phi0;
  for (const auto& c : levels) {
    const double tau =
        0.999 * budget / (static_cast<double>(levels.size()) * to_double(abs(c)));
    auto level_set =
        IntervalUnion::from_partition(x.map([&c](const Rational& v) { return v == c; }));
    auto V = approximate_borel_set(level_set, req.mu, req.p, tau / 2);

    std::vector<std::pair<double, Interval>> by_mass;
    for (const auto& iv : V.intervals()) by_mass.emplace_back(req.mu.measure_of(iv), iv);
    std::stable_sort(by_mass.begin(), by_mass.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    auto cut = truncate_union(
        [&by_mass](std::size_t j) -> std::optional<Interval> {
          if (j >= by_mass.size()) return std::nullopt;
          return by_mass[j].second;
        },
        req.mu.measure_of(V), req.mu, req.p, tau / 2, by_mass.size());
    phi0 = phi0 + StepFunction::indicator(IntervalUnion::from(cut.kept), c);
  }

  const StepFunction residual(combine(phi0.partition(), x, [](const Rational& a, const Rational& b) {
    return Rational(a - b);
  }));
  const double error = lp_norm(residual, req.mu, req.p).upper();
  if (!(error < budget)) return std::nullopt;
  return StepApproximation{std::move(phi0), error, "simple-form"};
}

StepFunction grid_step(const ApproxRequest& req, const Rational& lo, const Rational& h,
                       std::size_t n) {
  std::vector<Rational> breaks(n + 1);
  for (std::size_t i = 0; i <= n; ++i) breaks[i] = lo + Rational(static_cast<long>(i)) * h;
  std::vector<Rational> cells(n + 2, Rational(0));
  std::vector<Rational> points(n + 1, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (req.mu.measure_of(Interval::open(breaks[i], breaks[i + 1])) == 0.0) continue;
    const double v = req.target.eval(to_double(Rational((breaks[i] + breaks[i + 1]) / 2)));
    cells[i + 1] = rational_from_decimal_double(v);
  }
  StepFunction phi0(Partition<Rational>(std::move(breaks), std::move(cells), std::move(points)));

  // Atoms where the staircase misses X get a short interval carrying X(a).
  const auto& atoms = req.mu.atoms();
  Rational w = h / 4;
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    w = std::min(w, Rational((atoms[i].location - atoms[i - 1].location) / 4));
  }
  std::vector<Rational> obreaks;
  std::vector<std::optional<Rational>> ocells{std::nullopt};
  std::vector<std::optional<Rational>> opoints;
  for (const auto& a : atoms) {
    const Rational xa = rational_from_decimal_double(req.target.eval(a.x));
    if (phi0.eval(a.location) == xa) continue;
    obreaks.push_back(a.location - w);
    obreaks.push_back(a.location + w);
    ocells.push_back(xa);
    ocells.push_back(std::nullopt);
    opoints.push_back(Rational(0));
    opoints.push_back(Rational(0));
  }
  if (obreaks.empty()) return phi0;
  Partition<std::optional<Rational>> overlay(std::move(obreaks), std::move(ocells),
                                             std::move(opoints));
  return StepFunction(combine(phi0.partition(), overlay,
                              [](const Rational& v, const std::optional<Rational>& o) {
                                return o ? *o : v;
                              }));
}

StepApproximation grid_route(const ApproxRequest& req, double budget, double qt) {
  const auto& mu = req.mu;
  const double p = req.p;
  const auto X = Evaluable::of(req.target);
  double delta = 1e-10 * mu.total_mass();
  std::optional<int> k;
  double best = kInf;
  for (int widen = 0;;) {
    auto [a, b] = mu.essential_window(delta);
    for (const auto& atom : mu.atoms()) {
      a = std::min(a, atom.x);
      b = std::max(b, atom.x);
    }
    if (!k) k = static_cast<int>(std::floor(std::log2(std::max(b - a, 1e-300) / 32)));
    const Rational h = pow2(*k);
    const Rational lo = Rational(floor_q(rational_from_double(a) / h) - 1) * h;
    const Rational hi = Rational(ceil(rational_from_double(b) / h) + 1) * h;
    const mpz_class n = floor_q((hi - lo) / h);
    if (n > kMaxGridCells) {
      throw BudgetExhausted("grid refinement cap reached; best certified error " +
                                format_double(best),
                            best);
    }

    auto phi0 = grid_step(req, lo, h, n.get_ui());
    const auto est = lp_distance(Evaluable::of(phi0), X, mu, p, qt);
    if (est.upper() < budget) return {std::move(phi0), est.upper(), "grid"};
    best = std::min(best, est.upper());

    // Decide between widening the window and refining the cells.
    const double lo_d = to_double(lo);
    const double hi_d = to_double(hi);
    Evaluable outside;
    outside.at = [X, lo_d, hi_d](double x) { return x > lo_d && x < hi_d ? 0.0 : X.at(x); };
    outside.knots = [X, lo_d, hi_d](double l, double r) {
      auto out = X.knots(l, r);
      for (double e : {lo_d, hi_d}) {
        if (e > l && e < r) out.push_back(e);
      }
      std::sort(out.begin(), out.end());
      return out;
    };
    const double budget_p = std::pow(budget, p);
    const double tail = integrate_abs_pow(outside, mu, p, {budget_p / 1000, 0.0, 400000}).value;
    if (tail > budget_p / 16) {
      if (++widen > 10) {
        throw BudgetExhausted("window could not be widened enough; best certified error " +
                                  format_double(best),
                              best);
      }
      delta /= 100;
    } else {
      const double ratio = est.value / (0.5 * budget);
      *k -= std::clamp(static_cast<int>(std::ceil(std::log2(std::max(ratio, 1.0)))), 1, 4);
    }
  }
}

}  // namespace

StepApproximation build_step_approximation(const ApproxRequest& req) {
  const double qt = to_double(req.quadrature_tolerance());
  const double budget = to_double(req.eps) / 2 - qt;
  if (auto x = exact_simple_form(req.target)) {
    if (auto out = simple_route(req, *x, budget)) return std::move(*out);
  }
  return grid_route(req, budget, qt);
}

double certify_error(double phi0_err_bound, double s, double wave_norm_bound) {
  return phi0_err_bound + s * wave_norm_bound;
}

// ---------------------------------------------------------------------------
// Sensitisation
// ---------------------------------------------------------------------------

std::size_t count_nondiff(const SensitiveApproximant& y, const Window& w) {
  const Rational B(y.wave().b());
  const mpz_class first = floor_q(w.lower * B);
  const mpz_class last = ceil(w.upper * B);
  mpz_class n = last - first - 1;
  if (n < 0) n = 0;
  std::size_t count = n.get_ui();
  for (const auto& e : y.phi0().endpoints()) {
    if (!(e > w.lower && e < w.upper)) continue;
    if (Rational(e * B).get_den() != 1) ++count;
  }
  return count;
}

SensitiveApproximant approximant_of(const Certificate& cert) {
  return SensitiveApproximant(cert.phi0, cert.scale, TriangleWave(cert.b),
                              ApproximantInfo{cert.eps, cert.M, cert.p});
}

SensitizeResult sensitize(const ApproxRequest& req) {
  check_moment(req);
  auto step = build_step_approximation(req);

  const Rational& mass = req.mu.total_mass_exact();
  Rational s;
  double wave_bound;
  if (mass <= 1) {
    s = req.eps / 2;
    wave_bound = mass == 1 ? 1.0 : std::min(1.0, root_up(req.mu.total_mass(), req.p));
  } else {
    // Shrink the scale so that s * ||wave||_p still fits in eps/2.
    wave_bound = root_up(req.mu.total_mass(), req.p);
    s = req.eps / (2 * rational_from_double(wave_bound));
  }
  TriangleWave wave = mass <= 1 ? build_zigzag(req.eps, req.M) : zigzag_for_scale(s, req.M);
  SensitiveApproximant y(step.phi0, s, wave, ApproximantInfo{req.eps, req.M, req.p});

  const double error = certify_error(step.error_bound, double_up(s), wave_bound);
  const Rational qt = req.quadrature_tolerance();
  if (!(error + double_up(qt) < to_double(req.eps))) {
    throw BudgetExhausted("certified error does not fit below eps", error);
  }
  if (!(y.min_abs_slope() > req.M)) throw Error("slope bound violated");

  Certificate cert;
  cert.target = req.target.source_text();
  cert.measure = req.measure_text;
  cert.p = req.p;
  cert.eps = req.eps;
  cert.M = req.M;
  cert.b = wave.b();
  cert.scale = s;
  cert.phi0 = step.phi0;
  cert.error_bound = error;
  cert.error_method = "triangle-chain";
  cert.min_abs_slope = y.min_abs_slope();
  cert.sup_bound = y.sup_bound();
  const auto [wa, wb] = req.mu.essential_window(1e-6 * req.mu.total_mass());
  cert.nondiff_window = Window{Rational(floor_q(rational_from_double(wa))),
                               Rational(ceil(rational_from_double(wb)))};
  cert.nondiff_count = count_nondiff(y, cert.nondiff_window);
  cert.quadrature_tolerance = qt;
  cert.phi0_error_bound = step.error_bound;
  cert.wave_norm_bound = wave_bound;
  cert.phi0_route = step.route;
  return {std::move(y), std::move(cert)};
}

}  // namespace lpsens
