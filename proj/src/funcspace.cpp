#include "lpsens/funcspace.hpp"

#include "lpsens/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lpsens {

// ---------------------------------------------------------------------------
// StepFunction
// ---------------------------------------------------------------------------

StepFunction::StepFunction() : StepFunction(Partition<Rational>(Rational(0))) {}

StepFunction::StepFunction(Partition<Rational> partition) : part_(partition.simplified()) {
  breaks_d_.reserve(part_.breakpoints().size());
  for (const auto& b : part_.breakpoints()) breaks_d_.push_back(to_double(b));
  cells_d_.reserve(part_.cells().size());
  for (const auto& c : part_.cells()) cells_d_.push_back(to_double(c));
}

StepFunction StepFunction::indicator(const IntervalUnion& u, const Rational& value) {
  if (!u.all_open()) {
    throw InvalidArgument("step functions are built from open intervals only");
  }
  const Rational zero = 0;
  return StepFunction(
      u.to_partition().map([&](bool in) { return in ? value : zero; }));
}

StepFunction StepFunction::from_terms(const std::vector<StepTerm>& terms,
                                      const std::vector<StepException>& exceptions) {
  std::vector<Partition<Rational>> parts;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (t.value == 0) throw InvalidArgument("step term with zero value");
    if (t.lower && t.upper && !(*t.lower < *t.upper)) {
      throw InvalidArgument("step term with empty interval");
    }
    if (i > 0) {
      const auto& prev = terms[i - 1];
      if (!prev.upper || !t.lower || *t.lower < *prev.upper) {
        throw InvalidArgument("step terms overlap or are out of order");
      }
    }
    Interval iv{t.lower, false, t.upper, false};
    parts.push_back(indicator(IntervalUnion::from({iv}), t.value).partition());
  }
  auto sum = reduce_all(
      std::move(parts), [](const Rational& a, const Rational& b) { return Rational(a + b); },
      Rational(0));
  if (exceptions.empty()) return StepFunction(std::move(sum));

  std::vector<Rational> pts;
  std::vector<std::optional<Rational>> vals;
  for (std::size_t i = 0; i < exceptions.size(); ++i) {
    if (i > 0 && !(exceptions[i - 1].point < exceptions[i].point)) {
      throw InvalidArgument("exception points must strictly increase");
    }
    pts.push_back(exceptions[i].point);
    vals.push_back(exceptions[i].value);
  }
  Partition<std::optional<Rational>> overrides(
      pts, std::vector<std::optional<Rational>>(pts.size() + 1), vals);
  return StepFunction(combine(sum, overrides,
                              [](const Rational& a, const std::optional<Rational>& b) {
                                return b ? *b : a;
                              }));
}

std::vector<StepTerm> StepFunction::terms() const {
  std::vector<StepTerm> out;
  const auto& br = part_.breakpoints();
  const auto& cells = part_.cells();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (cells[k] == 0) continue;
    StepTerm t{cells[k], std::nullopt, std::nullopt};
    if (k > 0) t.lower = br[k - 1];
    if (k < br.size()) t.upper = br[k];
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<StepException> StepFunction::exceptions() const {
  std::vector<StepException> out;
  const auto& br = part_.breakpoints();
  const auto& pts = part_.points();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k] != 0) out.push_back({br[k], pts[k]});
  }
  return out;
}

double StepFunction::eval(double x) const {
  const auto it = std::upper_bound(breaks_d_.begin(), breaks_d_.end(), x);
  const auto k = static_cast<std::size_t>(it - breaks_d_.begin());
  // Doubles compare correctly against the rational breakpoints except when x
  // coincides with a breakpoint's nearest double.
  if (k > 0 && breaks_d_[k - 1] == x) return to_double(part_.at(Rational(x)));
  return cells_d_[k];
}

Rational StepFunction::sup_abs() const {
  Rational best = 0;
  for (const auto& c : part_.cells()) best = std::max(best, abs(c));
  for (const auto& p : part_.points()) best = std::max(best, abs(p));
  return best;
}

bool StepFunction::is_zero() const {
  return part_.breakpoints().empty() && part_.cells().front() == 0;
}

StepFunction StepFunction::operator+(const StepFunction& other) const {
  return StepFunction(combine(part_, other.part_, [](const Rational& a, const Rational& b) {
    return Rational(a + b);
  }));
}

StepFunction StepFunction::operator-(const StepFunction& other) const {
  return StepFunction(combine(part_, other.part_, [](const Rational& a, const Rational& b) {
    return Rational(a - b);
  }));
}

StepFunction StepFunction::scaled(const Rational& c) const {
  return StepFunction(part_.map([&](const Rational& v) { return Rational(v * c); }));
}

// ---------------------------------------------------------------------------
// TriangleWave
// ---------------------------------------------------------------------------

TriangleWave::TriangleWave(mpz_class b) : b_(std::move(b)) {
  if (b_ <= 0) throw InvalidArgument("wave frequency b must be a positive integer");
  b_d_ = b_.get_d();
}

Rational TriangleWave::eval(const Rational& x) const {
  const Rational t = x * Rational(b_);
  mpz_class j;
  mpz_fdiv_q(j.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
  Rational frac = t - Rational(j);
  return mpz_even_p(j.get_mpz_t()) ? frac : Rational(1 - frac);
}

double TriangleWave::eval(double x) const {
  const double t = x * b_d_;
  const double j = std::floor(t);
  const double frac = t - j;
  return std::fmod(j, 2.0) == 0.0 ? frac : 1.0 - frac;
}

std::vector<Rational> TriangleWave::lattice(const Window& w) const {
  const Rational B(b_);
  mpz_class j;
  const Rational lo = w.lower * B;
  mpz_fdiv_q(j.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  std::vector<Rational> out;
  for (;; ++j) {
    Rational pt(j, b_);
    pt.canonicalize();
    if (pt <= w.lower) continue;
    if (pt >= w.upper) break;
    out.push_back(std::move(pt));
  }
  return out;
}

TriangleWave build_zigzag(const Rational& eps, const Rational& M) {
  if (eps <= 0) throw InvalidArgument("eps must be positive");
  if (M < 0) throw InvalidArgument("M must be nonnegative");
  return TriangleWave(ceil(Rational(2 * (M + 1) / eps)));
}

TriangleWave zigzag_for_scale(const Rational& scale, const Rational& M) {
  if (scale <= 0) throw InvalidArgument("scale must be positive");
  if (M < 0) throw InvalidArgument("M must be nonnegative");
  return TriangleWave(ceil(Rational((M + 1) / scale)));
}

Rational eval_wave(const TriangleWave& w, const Rational& x) { return w.eval(x); }

// ---------------------------------------------------------------------------
// SensitiveApproximant
// ---------------------------------------------------------------------------

SensitiveApproximant::SensitiveApproximant(StepFunction phi0, Rational scale, TriangleWave wave,
                                           ApproximantInfo info)
    : phi0_(std::move(phi0)),
      scale_(std::move(scale)),
      wave_(std::move(wave)),
      info_(std::move(info)),
      scale_d_(to_double(scale_)) {
  if (scale_ <= 0) throw InvalidArgument("scale must be positive");
}

Rational SensitiveApproximant::eval(const Rational& x) const {
  return phi0_.eval(x) + scale_ * wave_.eval(x);
}

double SensitiveApproximant::eval(double x) const {
  return phi0_.eval(x) + scale_d_ * wave_.eval(x);
}

Rational SensitiveApproximant::sup_bound() const { return phi0_.sup_abs() + scale_; }

Rational SensitiveApproximant::min_abs_slope() const { return scale_ * Rational(wave_.b()); }

std::vector<Rational> SensitiveApproximant::nondiff_points(const Window& w) const {
  std::vector<Rational> out = wave_.lattice(w);
  for (const auto& e : phi0_.endpoints()) {
    if (e > w.lower && e < w.upper) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SlopeCell> SensitiveApproximant::slope_profile(const Window& w) const {
  auto pts = nondiff_points(w);
  pts.insert(pts.begin(), w.lower);
  pts.push_back(w.upper);
  const Rational B(wave_.b());
  const Rational magnitude = scale_ * B;
  std::vector<SlopeCell> out;
  out.reserve(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Rational mid = (pts[i] + pts[i + 1]) / 2;
    const Rational t = mid * B;
    mpz_class j;
    mpz_fdiv_q(j.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    out.push_back({pts[i], pts[i + 1],
                   mpz_even_p(j.get_mpz_t()) ? magnitude : Rational(-magnitude)});
  }
  return out;
}

}  // namespace lpsens
