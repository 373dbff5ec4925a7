#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace lpsens {

using Rational = mpq_class;

/// Parses an exact decimal literal: optional sign, digits, optional fraction.
/// Also accepts "num/den". Returns nullopt on malformed text.
std::optional<Rational> parse_rational(std::string_view text);

/// Exact value of a double (every finite double is a dyadic rational).
Rational rational_from_double(double value);

/// The rational named by the shortest decimal that round-trips `value`.
/// This is how programmatic double inputs become deterministic exact values.
Rational rational_from_decimal_double(double value);

/// Round-to-nearest conversion.
double to_double(const Rational& value);

/// "num/den" with a positive denominator; integers still carry "/1".
std::string to_fraction_string(const Rational& value);

/// Terminating decimal expansion, or nullopt when the denominator has a
/// prime factor other than 2 or 5.
std::optional<std::string> to_exact_decimal(const Rational& value);

/// Exact decimal when it terminates, otherwise "num/den".
std::string to_exact_string(const Rational& value);

/// Shortest round-trip decimal for a double.
std::string format_double(double value);

/// Smallest integer >= value.
mpz_class ceil(const Rational& value);

Rational abs(const Rational& value);

}  // namespace lpsens
