#include "lpsens/errors.hpp"
#include "lpsens/norms.hpp"
#include "lpsens/quadrature.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace lpsens;

namespace {

BorelMeasure M(const char* text) { return BorelMeasure::parse(text); }
Evaluable T(const char* text) { return Evaluable::of(parse_target(text)); }

StepFunction ind(const char* a, const char* b, long value) {
  return StepFunction::indicator(
      IntervalUnion::from({Interval::open(*parse_rational(a), *parse_rational(b))}),
      Rational(value));
}

Rational q(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

bool agree(const NormEstimate& a, const NormEstimate& b) {
  return std::abs(a.value - b.value) <= a.absolute_error_bound + b.absolute_error_bound;
}

}  // namespace

TEST_CASE("gauss-kronrod quadrature") {
  auto cubic = integrate([](double x) { return x * x * x - x; }, {0.0, 2.0});
  CHECK(cubic.value == doctest::Approx(2.0).epsilon(1e-14));
  auto kink = integrate([](double x) { return std::abs(x - 0.3); }, {0.0, 0.3, 1.0});
  CHECK(kink.value == doctest::Approx(0.045 + 0.245).epsilon(1e-14));
  CHECK(kink.intervals == 2);
  auto root = integrate([](double x) { return std::sqrt(x); }, {0.0, 1.0}, {1e-12, 0, 200000});
  CHECK(std::abs(root.value - 2.0 / 3.0) <= root.error + 1e-15);
  CHECK(root.converged);
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / (x - 0.5); }, {0.0, 1.0}), EvalError);
}

TEST_CASE("lp_norm examples") {
  auto one = lp_norm(Evaluable::constant(1), M("uniform(0,1)"), 3, 1e-9);
  CHECK(std::abs(one.value - 1) <= one.absolute_error_bound + 1e-15);

  auto step = ind("0", "0.5", 3);
  auto quad = lp_norm(Evaluable::of(step), M("uniform(0,1)"), 1, 1e-9);
  CHECK(std::abs(quad.value - 1.5) <= quad.absolute_error_bound);
  auto closed = lp_norm(step, M("uniform(0,1)"), 1);
  CHECK(closed.value == 1.5);
  CHECK(closed.method == NormMethod::ClosedForm);
  CHECK(closed.absolute_error_bound <= 1e-12);

  auto x2 = lp_norm(T("x"), M("normal(0,1)"), 2, 1e-8);
  CHECK(std::abs(x2.value - 1) <= x2.absolute_error_bound);
  CHECK(x2.absolute_error_bound <= 1e-8);

  auto expo = lp_norm(T("x"), M("exponential(2)"), 1, 1e-9);
  CHECK(std::abs(expo.value - 0.5) <= expo.absolute_error_bound);

  auto atoms = lp_norm(T("x^2"), M("mix(1/4*atom(-2), 3/4*atom(1))"), 1, 1e-9);
  CHECK(atoms.value == doctest::Approx(0.25 * 4 + 0.75));

  auto finite = lp_norm(Evaluable::constant(1), M("mix(4*uniform(0,1), mass=4)"), 2, 1e-9);
  CHECK(finite.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lp_distance examples") {
  auto f = T("sin(3*x) + x^2");
  auto same = lp_distance(f, f, M("normal(0,1)"), 2, 1e-8);
  CHECK(same.value == 0);
  auto d = lp_distance(Evaluable::of(ind("0", "0.75", 1)), Evaluable::of(ind("0", "0.5", 1)),
                       M("uniform(0,1)"), 2, 1e-9);
  CHECK(std::abs(d.value - 0.5) <= d.absolute_error_bound + 1e-15);
  SensitiveApproximant y(StepFunction(), Rational(1, 2), TriangleWave(2));
  auto w = lp_distance(Evaluable::of(y), Evaluable::constant(0), M("uniform(0,1)"), 1, 1e-9);
  CHECK(std::abs(w.value - 0.25) <= w.absolute_error_bound + 1e-15);
}

TEST_CASE("monte carlo norm") {
  auto one = mc_norm(Evaluable::constant(1), M("normal(3,2)"), 2, 10000, 1);
  CHECK(one.value == 1);
  CHECK(one.absolute_error_bound == 0);
  CHECK(one.method == NormMethod::MonteCarlo);
  CHECK(one.seed == 1);
  CHECK(one.n_samples == 10000);

  auto x = mc_norm(T("x"), M("uniform(0,1)"), 1, 1000000, 42);
  CHECK(std::abs(x.value - 0.5) <= x.absolute_error_bound);
  auto w = mc_norm(Evaluable::of(TriangleWave(2)), M("uniform(0,1)"), 1, 1000000, 7);
  CHECK(std::abs(w.value - 0.5) <= w.absolute_error_bound);

  CHECK_THROWS_AS(mc_norm(T("x"), M("uniform(0,1)"), 1, 999, 1), InvalidArgument);
  CHECK_THROWS_AS(mc_norm(T("x"), M("mix(2*uniform(0,1), mass=2)"), 1, 1000, 1), InvalidArgument);
  auto again = mc_norm(T("x^2"), M("normal(0,1)"), 2, 5000, 9);
  CHECK(again.value == mc_norm(T("x^2"), M("normal(0,1)"), 2, 5000, 9).value);
}

TEST_CASE("wave norm bound") {
  testing::Gen g(5);
  for (int i = 0; i < 20; ++i) {
    TriangleWave w(g.integer(1, 50));
    const double p = g.real(1, 4);
    for (const char* s : testing::test_measures()) CHECK(wave_norm_bound(w, M(s), p) <= 1.0);
  }
  const double b2 = wave_norm_bound(TriangleWave(2), M("uniform(0,1)"), 1);
  CHECK(b2 == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(b2 >= 0.5);
  CHECK(wave_norm_bound(TriangleWave(3), M("mix(4*normal(0,1), mass=4)"), 2) <= 2.0);
}

TEST_CASE("p outside [1, inf) is rejected") {
  CHECK_THROWS_WITH_AS(require_valid_p(0.5), "p must satisfy 1 ≤ p < ∞", InvalidArgument);
  CHECK_THROWS_AS(require_valid_p(INFINITY), InvalidArgument);
  CHECK_THROWS_AS(require_valid_p(NAN), InvalidArgument);
  CHECK_NOTHROW(require_valid_p(1));
}

TEST_CASE("divergent moments are flagged") {
  CHECK_THROWS_AS(integrate_abs_pow(T("exp(x^2)"), M("normal(0,1)"), 2), NonIntegrable);
  CHECK_THROWS_AS(integrate_abs_pow(T("exp(x)"), M("exponential(1)"), 1), NonIntegrable);
  CHECK_NOTHROW(integrate_abs_pow(T("exp(x/4)"), M("exponential(1)"), 2));
  CHECK_NOTHROW(integrate_abs_pow(T("exp(x^2/8)"), M("normal(0,1)"), 2));
}

namespace {

const char* kBounded[] = {"sin(x)", "cos(3*x)", "if(x < 0.5, 1, -2)", "abs(x - 0.2)",
                          "min(x, 0.3)", "exp(0 - x^2)", "max(x, 0) - min(x, 0)", "1"};

}  // namespace

TEST_CASE("homogeneity, triangle inequality and monotonicity in p") {
  testing::Gen g(77);
  for (const char* s : testing::test_measures()) {
    auto mu = M(s);
    for (const char* fs : kBounded) {
      CAPTURE(fs);
      auto f = T(fs);
      const double c = g.real(-3, 3);
      auto nf = lp_norm(f, mu, 2, 1e-8);
      auto ncf = lp_norm(f.scaled(c), mu, 2, 1e-8);
      CHECK(std::abs(ncf.value - std::abs(c) * nf.value) <=
            ncf.absolute_error_bound + std::abs(c) * nf.absolute_error_bound + 1e-14);

      auto n1 = lp_norm(f, mu, 1, 1e-8);
      CHECK(n1.value <= nf.value + n1.absolute_error_bound + nf.absolute_error_bound);
    }
    for (int i = 0; i < 10; ++i) {
      auto f = T(kBounded[g.integer(0, 7)]);
      auto gg = T(kBounded[g.integer(0, 7)]);
      auto h = T(kBounded[g.integer(0, 7)]);
      const double p = g.real(1, 3);
      auto fh = lp_distance(f, h, mu, p, 1e-7);
      auto fg = lp_distance(f, gg, mu, p, 1e-7);
      auto gh = lp_distance(gg, h, mu, p, 1e-7);
      CHECK(fh.value <= fg.value + gh.value + fh.absolute_error_bound + fg.absolute_error_bound +
                            gh.absolute_error_bound);
    }
  }
}

TEST_CASE("quadrature and monte carlo agree") {
  const char* corpus[] = {"x", "x^2", "sin(5*x)", "if(x < 0, -1, 2)", "abs(x) ^ 1.5"};
  for (const char* s : testing::test_measures()) {
    for (const char* fs : corpus) {
      CAPTURE(s);
      CAPTURE(fs);
      const double p = 1.5;
      auto quad = lp_norm(T(fs), M(s), p, 1e-8);
      auto mc = mc_norm(T(fs), M(s), p, 200000, 3);
      CHECK(agree(quad, mc));
    }
  }
}

TEST_CASE("closed form matches quadrature for step functions") {
  testing::Gen g(91);
  for (int i = 0; i < 40; ++i) {
    StepFunction f;
    for (int k = 0; k < 3; ++k) {
      const long a = g.integer(-16, 12);
      f = f + StepFunction::indicator(
                  IntervalUnion::from({Interval::open(q(a, 8), q(a + g.integer(1, 9), 8))}),
                  g.rational(5, 3));
    }
    for (const char* s : testing::test_measures()) {
      auto closed = lp_norm(f, M(s), 2);
      auto quad = lp_norm(Evaluable::of(f), M(s), 2, 1e-9);
      CAPTURE(s);
      CHECK(agree(closed, quad));
    }
  }
}
