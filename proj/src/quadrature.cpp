#include "lpsens/quadrature.hpp"

#include "lpsens/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace lpsens {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (kXgk[1], [3], [5], [7]).
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
};

struct ByError {
  bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

double finite_or_throw(double v) {
  if (!std::isfinite(v)) throw EvalError(EvalError::Kind::NonFinite, "non-finite integrand value");
  return v;
}

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = finite_or_throw(f(center));
  double kronrod = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double s = finite_or_throw(f(center - dx)) + finite_or_throw(f(center + dx));
    kronrod += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kronrod *= half;
  gauss *= half;
  return Segment{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, std::vector<double> knots,
                           const QuadratureOptions& options) {
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  QuadratureResult result;
  if (knots.size() < 2) return result;

  std::priority_queue<Segment, std::vector<Segment>, ByError> work;
  std::vector<Segment> done;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    auto s = gk15(f, knots[i], knots[i + 1]);
    total += s.value;
    total_err += s.error;
    work.push(s);
  }
  std::size_t count = work.size();
  auto target = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };
  while (!work.empty() && total_err > target()) {
    if (count >= options.max_intervals) {
      result.converged = false;
      break;
    }
    Segment s = work.top();
    work.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (!(mid > s.a && mid < s.b)) {
      done.push_back(s);
      continue;
    }
    auto left = gk15(f, s.a, mid);
    auto right = gk15(f, mid, s.b);
    total += left.value + right.value - s.value;
    total_err += left.error + right.error - s.error;
    work.push(left);
    work.push(right);
    ++count;
  }
  while (!work.empty()) {
    done.push_back(work.top());
    work.pop();
  }
  // Fixed summation order, independent of queue history.
  std::sort(done.begin(), done.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  result.value = 0.0;
  result.error = 0.0;
  for (const auto& s : done) {
    result.value += s.value;
    result.error += s.error;
  }
  result.intervals = done.size();
  if (result.error > target()) result.converged = false;
  return result;
}

}  // namespace lpsens
