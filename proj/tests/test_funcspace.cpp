#include "lpsens/approx.hpp"
#include "lpsens/errors.hpp"
#include "lpsens/funcspace.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>

using namespace lpsens;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

StepFunction ind(long a, long b, long value, long den = 1) {
  return StepFunction::indicator(IntervalUnion::from({Interval::open(q(a, den), q(b, den))}),
                                 q(value));
}

// Random step function: a sum of a few scaled indicators on a 1/8 grid.
StepFunction random_step(testing::Gen& g) {
  StepFunction f;
  const int n = static_cast<int>(g.integer(0, 5));
  for (int i = 0; i < n; ++i) {
    const long a = g.integer(-24, 20);
    const long b = a + g.integer(1, 12);
    f = f + StepFunction::indicator(IntervalUnion::from({Interval::open(q(a, 8), q(b, 8))}),
                                    g.rational(9, 4));
  }
  return f;
}

}  // namespace

TEST_CASE("step functions from indicators") {
  auto f = ind(0, 1, 3);
  CHECK(f.eval(q(1, 2)) == 3);
  CHECK(f.eval(q(0)) == 0);
  CHECK(f.eval(q(1)) == 0);
  CHECK(f.terms().size() == 1);
  CHECK(f.exceptions().empty());
  CHECK(f.sup_abs() == 3);

  auto g = ind(0, 2, 1) + ind(1, 3, 1);
  CHECK(g.eval(q(1, 2)) == 1);
  CHECK(g.eval(q(3, 2)) == 2);
  CHECK(g.eval(q(5, 2)) == 1);
  // Endpoints follow pointwise addition of open indicators.
  CHECK(g.eval(q(1)) == 1);
  CHECK(g.eval(q(2)) == 1);
  const auto terms = g.terms();
  REQUIRE(terms.size() == 3);
  CHECK(terms[1].value == 2);
  CHECK(*terms[1].lower == 1);
  CHECK(*terms[1].upper == 2);
  const auto ex = g.exceptions();
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].point == 1);
  CHECK(ex[0].value == 1);

  CHECK_THROWS_AS(StepFunction::indicator(IntervalUnion::from({Interval{q(0), false, q(1), true}}),
                                          q(1)),
                  InvalidArgument);
  CHECK((ind(0, 1, 2) - ind(0, 1, 2)).is_zero());
  CHECK(ind(0, 1, 2).scaled(q(-1, 2)).eval(q(1, 2)) == -1);
}

TEST_CASE("terms and exceptions rebuild the function") {
  testing::Gen g(31);
  for (int i = 0; i < 300; ++i) {
    auto f = random_step(g);
    CHECK(StepFunction::from_terms(f.terms(), f.exceptions()) == f);
    for (const auto& t : f.terms()) {
      CHECK(t.value != 0);
      if (t.lower && t.upper) CHECK(*t.lower < *t.upper);
    }
    // Every endpoint is a genuine discontinuity.
    for (const auto& e : f.endpoints()) {
      const Rational left = f.eval(Rational(e - q(1, 1024)));
      const Rational right = f.eval(Rational(e + q(1, 1024)));
      CHECK((left != f.eval(e) || right != f.eval(e)));
    }
  }
  CHECK_THROWS_AS(StepFunction::from_terms({{q(1), q(0), q(2)}, {q(1), q(1), q(3)}}, {}),
                  InvalidArgument);
  CHECK_THROWS_AS(StepFunction::from_terms({{q(0), q(0), q(2)}}, {}), InvalidArgument);
}

TEST_CASE("double evaluation agrees with exact evaluation") {
  testing::Gen g(41);
  for (int i = 0; i < 200; ++i) {
    auto f = random_step(g);
    for (const auto& e : f.endpoints()) {
      CHECK(f.eval(to_double(e)) == to_double(f.eval(rational_from_double(to_double(e)))));
    }
    for (int k = 0; k < 50; ++k) {
      const double x = g.real(-4, 4);
      CHECK(f.eval(x) == to_double(f.eval(rational_from_double(x))));
    }
  }
  // A breakpoint that is not a double: 1/3.
  auto third = StepFunction::indicator(IntervalUnion::from({Interval::open(q(1, 3), q(1))}), q(1));
  const double d = to_double(q(1, 3));
  CHECK(third.eval(d) == to_double(third.eval(rational_from_double(d))));
}

TEST_CASE("zigzag frequency") {
  CHECK(build_zigzag(q(1), q(0)).b() == 2);
  CHECK(build_zigzag(q(1, 2), q(3)).b() == 16);
  CHECK(build_zigzag(q(3, 10), q(1)).b() == 14);
  CHECK(build_zigzag(q(1, 10), q(10)).b() == 220);
  CHECK_THROWS_AS(build_zigzag(q(0), q(1)), InvalidArgument);
  CHECK_THROWS_AS(build_zigzag(q(1), q(-1)), InvalidArgument);
  CHECK(zigzag_for_scale(q(1, 4), q(3)).b() == 16);
}

TEST_CASE("triangle wave values") {
  TriangleWave w(2);
  CHECK(eval_wave(w, q(0)) == 0);
  CHECK(eval_wave(w, q(1, 2)) == 1);
  CHECK(eval_wave(w, q(1, 4)) == q(1, 2));
  CHECK(eval_wave(w, q(-1, 4)) == q(1, 2));
  CHECK(w.eval(0.75) == 0.5);
  for (long j = -20; j <= 20; ++j) CHECK(eval_wave(TriangleWave(7), q(j, 7)) == (j % 2 == 0 ? 0 : 1));
}

TEST_CASE("triangle wave bounds and periodicity") {
  testing::Gen g(53);
  for (int i = 0; i < 100000; ++i) {
    const double x = g.real(-100, 100);
    const double v = TriangleWave(static_cast<long>(g.integer(1, 500))).eval(x);
    CHECK((v >= 0 && v <= 1));
  }
  for (int i = 0; i < 3000; ++i) {
    TriangleWave w(static_cast<long>(g.integer(1, 300)));
    const Rational x = g.rational(100000, 997);
    CHECK(w.eval(Rational(x + Rational(2) / Rational(w.b()))) == w.eval(x));
    CHECK(w.eval(x) == eval_wave(w, x));
    const double xd = to_double(x);
    CHECK(std::abs(w.eval(xd) - to_double(w.eval(rational_from_double(xd)))) < 1e-9);
  }
}

TEST_CASE("approximant evaluation") {
  SensitiveApproximant zero(StepFunction(), q(1, 2), TriangleWave(2));
  CHECK(zero.eval(q(1, 2)) == q(1, 2));
  SensitiveApproximant y(ind(0, 1, 3), q(1, 20), TriangleWave(220));
  CHECK(y.eval(q(1, 220)) == q(61, 20));
  CHECK(y.eval(q(1, 440)) == q(121, 40));
  CHECK(y.eval(q(-5)) == 0);
  CHECK(y.sup_bound() == q(61, 20));
  CHECK(y.min_abs_slope() == 11);
}

TEST_CASE("slope profiles") {
  SensitiveApproximant zero(StepFunction(), q(1, 2), TriangleWave(2));
  auto cells = zero.slope_profile(Window{q(0), q(1)});
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].upper == q(1, 2));
  CHECK(cells[0].slope == 1);
  CHECK(cells[1].slope == -1);

  SensitiveApproximant y(ind(0, 1, 1, 2), q(1, 4), TriangleWave(16));
  for (const auto& c : y.slope_profile(Window{q(-1), q(1)})) CHECK(abs(c.slope) == 4);
}

TEST_CASE("slopes equal exact finite differences") {
  testing::Gen g(61);
  for (int i = 0; i < 100; ++i) {
    SensitiveApproximant y(random_step(g), g.positive_rational(5, 7),
                           TriangleWave(static_cast<long>(g.integer(1, 40))));
    for (const auto& c : y.slope_profile(Window{q(-3), q(3)})) {
      const Rational width = c.upper - c.lower;
      const Rational x1 = c.lower + width / 3;
      const Rational x2 = c.lower + 2 * width / 3;
      CHECK(Rational((y.eval(x2) - y.eval(x1)) / (x2 - x1)) == c.slope);
      CHECK(abs(c.slope) == y.min_abs_slope());
    }
  }
}

TEST_CASE("non-differentiability points") {
  SensitiveApproximant a(StepFunction(), q(1, 2), TriangleWave(2));
  CHECK(a.nondiff_points(Window{q(-1), q(1)}) == std::vector<Rational>{q(-1, 2), q(0), q(1, 2)});
  SensitiveApproximant b(ind(1, 3, 1, 4), q(1, 2), TriangleWave(2));
  CHECK(b.nondiff_points(Window{q(0), q(1)}) ==
        std::vector<Rational>{q(1, 4), q(1, 2), q(3, 4)});
  SensitiveApproximant c(StepFunction(), q(1, 2), TriangleWave(3));
  CHECK(c.nondiff_points(Window{q(0), q(1)}) == std::vector<Rational>{q(1, 3), q(2, 3)});
}

TEST_CASE("non-differentiability points are isolated and bounded") {
  testing::Gen g(71);
  for (int i = 0; i < 200; ++i) {
    auto phi0 = random_step(g);
    SensitiveApproximant y(phi0, g.positive_rational(3, 5),
                           TriangleWave(static_cast<long>(g.integer(1, 60))));
    const auto pts = y.nondiff_points(Window{q(-4), q(4)});
    Rational min_gap = Rational(1) / Rational(y.wave().b());
    const auto& ends = phi0.endpoints();
    for (std::size_t k = 1; k < ends.size(); ++k) {
      min_gap = std::min(min_gap, Rational(ends[k] - ends[k - 1]));
    }
    // An endpoint may sit arbitrarily close to a lattice point, so only gaps
    // within one of the two sets obey the min_gap bound.
    const Rational B(y.wave().b());
    auto on_lattice = [&B](const Rational& x) { return Rational(x * B).get_den() == 1; };
    for (std::size_t k = 1; k < pts.size(); ++k) {
      CHECK(pts[k] > pts[k - 1]);
      if (on_lattice(pts[k]) == on_lattice(pts[k - 1])) CHECK(pts[k] - pts[k - 1] >= min_gap);
    }
    CHECK(count_nondiff(y, Window{q(-4), q(4)}) == pts.size());

    for (int k = 0; k < 500; ++k) {
      const double x = g.real(-5, 5);
      CHECK(std::abs(y.eval(x)) <= to_double(y.sup_bound()) * (1 + 1e-15));
    }
  }
}
