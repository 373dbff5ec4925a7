#include "lpsens/certificate.hpp"

#include "lpsens/errors.hpp"

#include <json.hpp>

namespace lpsens {

namespace {

using json = nlohmann::ordered_json;

std::string endpoint_text(const std::optional<Rational>& v, bool lower) {
  if (!v) return lower ? "-inf" : "inf";
  return to_exact_string(*v);
}

[[noreturn]] void corrupt(const std::string& what) {
  throw ParseError("corrupt certificate: " + what, 0);
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) corrupt(std::string("missing field '") + name + "'");
  return j.at(name);
}

std::string text_field(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_string()) corrupt(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

double number_field(const json& j, const char* name) {
  const auto& v = field(j, name);
  if (!v.is_number()) corrupt(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

Rational rational_field(const json& j, const char* name) {
  auto r = parse_rational(text_field(j, name));
  if (!r) corrupt(std::string("field '") + name + "' is not an exact rational");
  return *r;
}

std::optional<Rational> endpoint_field(const json& j, const char* name, bool lower) {
  const auto text = text_field(j, name);
  if (text == (lower ? "-inf" : "inf")) return std::nullopt;
  auto r = parse_rational(text);
  if (!r) corrupt(std::string("bad endpoint '") + text + "'");
  return r;
}

}  // namespace

std::string write_certificate(const Certificate& cert) {
  json phi0 = json::array();
  for (const auto& t : cert.phi0.terms()) {
    phi0.push_back({{"value", to_fraction_string(t.value)},
                    {"lower", endpoint_text(t.lower, true)},
                    {"upper", endpoint_text(t.upper, false)}});
  }
  json exceptions = json::array();
  for (const auto& e : cert.phi0.exceptions()) {
    exceptions.push_back(
        {{"point", to_exact_string(e.point)}, {"value", to_fraction_string(e.value)}});
  }
  json j = {
      {"schema_version", std::string(kCertificateSchema)},
      {"request",
       {{"target", cert.target},
        {"measure", cert.measure},
        {"p", format_double(cert.p)},
        {"eps", to_exact_string(cert.eps)},
        {"M", to_exact_string(cert.M)}}},
      {"b", cert.b.fits_ulong_p() ? json(cert.b.get_ui()) : json(cert.b.get_str())},
      {"scale", to_fraction_string(cert.scale)},
      {"phi0", phi0},
      {"exceptions", exceptions},
      {"error_bound", cert.error_bound},
      {"error_method", cert.error_method},
      {"min_abs_slope", to_fraction_string(cert.min_abs_slope)},
      {"sup_bound", to_fraction_string(cert.sup_bound)},
      {"nondiff_window",
       {{"lower", to_exact_string(cert.nondiff_window.lower)},
        {"upper", to_exact_string(cert.nondiff_window.upper)}}},
      {"nondiff_count_in_window", cert.nondiff_count},
      {"quadrature_tolerance", to_exact_string(cert.quadrature_tolerance)},
      {"phi0_error_bound", cert.phi0_error_bound},
      {"wave_norm_bound", cert.wave_norm_bound},
      {"phi0_route", cert.phi0_route},
  };
  return j.dump(2) + "\n";
}

Certificate read_certificate(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("corrupt certificate: ") + e.what(), e.byte);
  }
  if (text_field(j, "schema_version") != kCertificateSchema) {
    corrupt("unsupported schema_version");
  }

  Certificate c;
  const auto& req = field(j, "request");
  c.target = text_field(req, "target");
  c.measure = text_field(req, "measure");
  const auto p = parse_rational(text_field(req, "p"));
  if (!p) corrupt("p is not a decimal");
  c.p = to_double(*p);
  c.eps = rational_field(req, "eps");
  c.M = rational_field(req, "M");

  const auto b = field(j, "b");
  if (b.is_number_unsigned()) {
    c.b = mpz_class(b.get<unsigned long>());
  } else if (!b.is_string() || c.b.set_str(b.get<std::string>(), 10) != 0) {
    corrupt("b is not an integer");
  }
  if (c.b <= 0) corrupt("b must be positive");
  c.scale = rational_field(j, "scale");
  if (c.scale <= 0) corrupt("scale must be positive");

  std::vector<StepTerm> terms;
  const auto& phi0 = field(j, "phi0");
  if (!phi0.is_array()) corrupt("phi0 must be a list");
  for (const auto& t : phi0) {
    terms.push_back({rational_field(t, "value"), endpoint_field(t, "lower", true),
                     endpoint_field(t, "upper", false)});
  }
  std::vector<StepException> exceptions;
  const auto& ex = field(j, "exceptions");
  if (!ex.is_array()) corrupt("exceptions must be a list");
  for (const auto& e : ex) {
    exceptions.push_back({rational_field(e, "point"), rational_field(e, "value")});
  }
  try {
    c.phi0 = StepFunction::from_terms(terms, exceptions);
  } catch (const InvalidArgument& e) {
    corrupt(e.what());
  }

  c.error_bound = number_field(j, "error_bound");
  c.error_method = text_field(j, "error_method");
  c.min_abs_slope = rational_field(j, "min_abs_slope");
  c.sup_bound = rational_field(j, "sup_bound");
  c.quadrature_tolerance = rational_field(j, "quadrature_tolerance");

  // Informational fields, optional on input.
  if (j.contains("nondiff_window")) {
    const auto& w = j.at("nondiff_window");
    c.nondiff_window = Window{rational_field(w, "lower"), rational_field(w, "upper")};
  }
  if (j.contains("nondiff_count_in_window")) {
    c.nondiff_count = j.at("nondiff_count_in_window").get<std::size_t>();
  }
  if (j.contains("phi0_error_bound")) c.phi0_error_bound = number_field(j, "phi0_error_bound");
  if (j.contains("wave_norm_bound")) c.wave_norm_bound = number_field(j, "wave_norm_bound");
  if (j.contains("phi0_route")) c.phi0_route = text_field(j, "phi0_route");
  return c;
}

}  // namespace lpsens
