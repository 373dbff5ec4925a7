#pragma once

#include "lpsens/approx.hpp"

#include <string>
#include <string_view>

namespace lpsens {

inline constexpr std::string_view kCertificateSchema = "1";

/// JSON text of a certificate. Exact quantities are "num/den" strings,
/// interval endpoints are exact decimals when they terminate ("-inf"/"inf" for
/// unbounded ends), and error_bound is a shortest round-trip number.
std::string write_certificate(const Certificate& cert);

/// Inverse of write_certificate. Throws ParseError on malformed or
/// incomplete input.
Certificate read_certificate(std::string_view text);

}  // namespace lpsens
