#pragma once

#include "lpsens/measure.hpp"
#include "lpsens/rational.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace lpsens::testing {

/// Seeded generators for the property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  /// num/den with |num| <= max_num, 1 <= den <= max_den.
  Rational rational(long max_num, long max_den) {
    Rational r(integer(-max_num, max_num), integer(1, max_den));
    r.canonicalize();
    return r;
  }

  Rational positive_rational(long max_num, long max_den) {
    Rational r(integer(1, max_num), integer(1, max_den));
    r.canonicalize();
    return r;
  }

  /// Up to `max_parts` random intervals with endpoints on a 1/den grid inside
  /// [lo, hi], with random closedness and occasional points.
  std::vector<Interval> intervals(int max_parts, long lo, long hi, long den) {
    std::vector<Interval> out;
    const int parts = static_cast<int>(integer(1, max_parts));
    for (int i = 0; i < parts; ++i) {
      Rational a(integer(lo * den, hi * den), den);
      a.canonicalize();
      if (integer(0, 9) == 0) {
        out.push_back(Interval::point(a));
        continue;
      }
      Rational len(integer(1, 3 * den), den);
      len.canonicalize();
      Rational b = a + len;
      Interval iv{a, coin(), b, coin()};
      if (integer(0, 19) == 0) iv.lower.reset(), iv.lower_closed = false;
      if (integer(0, 19) == 0) iv.upper.reset(), iv.upper_closed = false;
      out.push_back(iv);
    }
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline const std::vector<const char*>& test_measures() {
  static const std::vector<const char*> m = {"uniform(0,1)", "normal(0,1)",
                                             "mix(0.5*atom(0), 0.5*uniform(0,1))"};
  return m;
}

}  // namespace lpsens::testing
