#include "lpsens/rational.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace lpsens {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

std::optional<Rational> parse_decimal(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) return std::nullopt;
  if (!whole.empty() && !all_digits(whole)) return std::nullopt;
  if (dot != std::string_view::npos && !frac.empty() && !all_digits(frac)) {
    return std::nullopt;
  }
  if (dot != std::string_view::npos && frac.empty() && whole.empty()) {
    return std::nullopt;
  }
  std::string digits(whole);
  digits.append(frac);
  if (digits.empty()) return std::nullopt;
  mpz_class num(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
  Rational r(num, den);
  r.canonicalize();
  if (negative) r = -r;
  return r;
}

}  // namespace

std::optional<Rational> parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  auto num = parse_decimal(text.substr(0, slash));
  auto den = parse_decimal(text.substr(slash + 1));
  if (!num || !den || *den == 0) return std::nullopt;
  Rational r = *num / *den;
  r.canonicalize();
  return r;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw std::domain_error("non-finite value has no rational form");
  }
  return Rational(value);
}

Rational rational_from_decimal_double(double value) {
  auto r = parse_rational(format_double(value));
  if (!r) throw std::domain_error("non-finite value has no rational form");
  return *r;
}

double to_double(const Rational& value) {
  // get_d truncates toward zero; the nearest double is either it or its
  // outward neighbour.
  const double t = value.get_d();
  if (!std::isfinite(t)) return t;
  const double away =
      std::nextafter(t, value < 0 ? -HUGE_VAL : HUGE_VAL);
  if (!std::isfinite(away)) return t;
  const Rational dt = abs(Rational(t) - value);
  const Rational da = abs(Rational(away) - value);
  return da < dt ? away : t;
}

std::string to_fraction_string(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::optional<std::string> to_exact_decimal(const Rational& value) {
  mpz_class den = value.get_den();
  unsigned twos = 0;
  unsigned fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return std::nullopt;
  const unsigned digits = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  mpz_class scaled = value.get_num() * (scale / value.get_den());
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string s = scaled.get_str();
  if (digits > 0) {
    if (s.size() <= digits) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return negative ? "-" + s : s;
}

std::string to_exact_string(const Rational& value) {
  if (auto d = to_exact_decimal(value)) return *d;
  return to_fraction_string(value);
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  std::string s(buf.data(), end);
  // Expand exponent notation so the result stays a plain decimal.
  if (s.find('e') != std::string::npos) {
    auto r = rational_from_double(value);
    // Shortest digits with exponent -> exact rational of those digits.
    const auto epos = s.find('e');
    const int exp10 = std::stoi(s.substr(epos + 1));
    auto mant = parse_rational(s.substr(0, epos));
    if (!mant) return s;
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned>(std::abs(exp10)));
    r = exp10 >= 0 ? Rational(*mant * Rational(p)) : Rational(*mant / Rational(p));
    r.canonicalize();
    if (auto d = to_exact_decimal(r)) return *d;
  }
  return s;
}

mpz_class ceil(const Rational& value) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
  return q;
}

Rational abs(const Rational& value) { return value < 0 ? Rational(-value) : value; }

}  // namespace lpsens
