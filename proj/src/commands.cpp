#include "lpsens/commands.hpp"

#include "lpsens/approx.hpp"
#include "lpsens/certificate.hpp"
#include "lpsens/errors.hpp"
#include "lpsens/norms.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lpsens {

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const HypothesisViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const NonIntegrable& e) {
    err << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const BudgetExhausted& e) {
    err << "error: " << e.what() << " (achieved " << format_double(e.achieved()) << ")\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

Rational parse_exact(const std::string& text, const char* what) {
  auto r = parse_rational(text);
  if (!r) throw InvalidArgument(std::string("invalid ") + what + " '" + text + "'");
  return *r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << content;
  if (!f) throw InvalidArgument("failed writing '" + path + "'");
}

std::string decimal_or_double(const Rational& x) {
  if (auto d = to_exact_decimal(x)) return *d;
  return format_double(to_double(x));
}

// Slopes are checked on at most this many lattice cells.
constexpr long kProfileCells = 1000000;

}  // namespace

double parse_exponent(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity" || text == "∞") {
    return std::numeric_limits<double>::infinity();
  }
  return to_double(parse_exact(text, "p"));
}

int cmd_sensitize(const SensitizeOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const double p = parse_exponent(opt.p);
    require_valid_p(p);
    auto req = make_request(opt.target, opt.measure, p, parse_exact(opt.eps, "eps"),
                            parse_exact(opt.M, "M"));
    auto result = sensitize(req);
    const auto& c = result.certificate;
    write_file(opt.out, write_certificate(c));
    out << "b=" << c.b.get_str() << " error_bound=" << format_double(c.error_bound)
        << " min_abs_slope=" << to_fraction_string(c.min_abs_slope) << "\n";
    return kExitPass;
  });
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cert = read_certificate(read_file(opt.cert));
    const auto req = make_request(cert.target, cert.measure, cert.p, cert.eps, cert.M);
    const auto y = approximant_of(cert);
    bool pass = true;

    const Rational derived = cert.scale * Rational(cert.b);
    const bool slope_match = derived == cert.min_abs_slope;
    out << "min_abs_slope " << to_fraction_string(cert.min_abs_slope) << " scale*b "
        << to_fraction_string(derived) << (slope_match ? " match" : " MISMATCH") << "\n";
    pass = pass && slope_match;

    Window w = cert.nondiff_window;
    if (!(w.lower < w.upper)) w = Window{Rational(-1), Rational(1)};
    const Rational B(cert.b);
    if (Rational((w.upper - w.lower) * B) > kProfileCells) {
      w.upper = w.lower + Rational(kProfileCells) / B;
    }
    bool profile_ok = true;
    for (const auto& cell : y.slope_profile(w)) {
      if (abs(cell.slope) != derived) profile_ok = false;
    }
    out << "slope profile on (" << to_exact_string(w.lower) << ", " << to_exact_string(w.upper)
        << ") " << (profile_ok ? "uniform" : "NOT UNIFORM") << "\n";
    pass = pass && profile_ok;

    const bool sensitive = cert.min_abs_slope > cert.M && derived > cert.M;
    out << "sensitivity " << to_fraction_string(derived) << " > M=" << to_exact_string(cert.M)
        << (sensitive ? " holds" : " FAILS") << "\n";
    pass = pass && sensitive;

    const double eps = to_double(cert.eps);
    const bool claim = cert.error_bound + to_double(cert.quadrature_tolerance) < eps;
    out << "claimed error_bound " << format_double(cert.error_bound)
        << (claim ? " fits" : " DOES NOT FIT") << " below eps\n";
    pass = pass && claim;

    const auto mu = req.mu.is_probability() ? req.mu : req.mu.normalized();
    const double factor = std::pow(req.mu.total_mass(), 1.0 / req.p);
    auto est = mc_norm(difference(Evaluable::of(y), Evaluable::of(req.target)), mu, req.p,
                       opt.samples, opt.seed);
    const double value = est.value * factor;
    const double radius = est.absolute_error_bound * factor;
    const bool mc_ok = value + radius < eps;
    out << "monte-carlo distance " << format_double(value) << " +/- " << format_double(radius)
        << " (n=" << opt.samples << ", seed=" << opt.seed << ")"
        << (mc_ok ? " < " : " >= ") << "eps=" << to_exact_string(cert.eps) << "\n";
    pass = pass && mc_ok;

    out << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kExitPass : kExitVerifyFail;
  });
}

int cmd_norm(const NormOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const double p = parse_exponent(opt.p);
    require_valid_p(p);
    const auto f = parse_target(opt.target);
    const auto mu = BorelMeasure::parse(opt.measure);
    // Piecewise-constant targets have a closed form.
    const auto simple = exact_simple_form(f);
    const auto est = simple ? lp_norm(StepFunction(*simple), mu, p)
                            : lp_norm(Evaluable::of(f), mu, p, opt.tol);
    out << "value: " << format_double(est.value) << "\n"
        << "absolute_error_bound: " << format_double(est.absolute_error_bound) << "\n"
        << "method: " << to_string(est.method) << "\n";
    return kExitPass;
  });
}

int cmd_plot(const PlotOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto colon = opt.window.find(':');
    if (colon == std::string::npos) throw InvalidArgument("window must look like a:b");
    const Rational a = parse_exact(opt.window.substr(0, colon), "window start");
    const Rational b = parse_exact(opt.window.substr(colon + 1), "window end");
    if (!(a < b)) throw InvalidArgument("window start must be below its end");
    if (opt.points < 2) throw InvalidArgument("points must be at least 2");
    const auto cert = read_certificate(read_file(opt.cert));
    const auto target = parse_target(cert.target);
    const auto y = approximant_of(cert);

    if (Rational((b - a) * Rational(cert.b)) > 10 * kProfileCells) {
      throw InvalidArgument("window holds too many non-differentiability points");
    }
    const Window w{a, b};
    const auto kinks = y.nondiff_points(w);

    std::ostringstream csv;
    csv << "x,target,approximant\n";
    const Rational steps(static_cast<long>(opt.points - 1));
    for (std::size_t i = 0; i < opt.points; ++i) {
      const Rational x = a + (b - a) * Rational(static_cast<long>(i)) / steps;
      std::string tv;
      try {
        tv = format_double(target.eval(to_double(x)));
      } catch (const EvalError&) {
        tv = "nan";
      }
      csv << decimal_or_double(x) << "," << tv << "," << format_double(to_double(y.eval(x)))
          << "\n";
    }
    std::ostringstream side;
    for (const auto& k : kinks) side << decimal_or_double(k) << "\n";

    write_file(opt.out, csv.str());
    write_file(opt.out + ".nondiff.txt", side.str());
    out << "wrote " << opt.points << " rows to " << opt.out << " and " << kinks.size()
        << " non-differentiability points to " << opt.out << ".nondiff.txt\n";
    return kExitPass;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dense M-sensitive approximation in L^p with checkable certificates"};
  app.require_subcommand(1);

  SensitizeOptions s;
  auto* sens = app.add_subcommand("sensitize", "Build an M-sensitive approximant and certificate");
  sens->add_option("--target", s.target, "Target expression in x")->required();
  sens->add_option("--measure", s.measure, "Measure specification")->required();
  sens->add_option("--p", s.p, "Exponent, 1 <= p < inf")->required();
  sens->add_option("--eps", s.eps, "Accuracy")->required();
  sens->add_option("--M", s.M, "Sensitivity level")->required();
  sens->add_option("--out", s.out, "Certificate path")->required();

  VerifyOptions v;
  auto* ver = app.add_subcommand("verify", "Check a certificate independently");
  ver->add_option("--cert", v.cert, "Certificate path")->required();
  ver->add_option("--samples", v.samples, "Monte Carlo sample count");
  ver->add_option("--seed", v.seed, "Monte Carlo seed");

  NormOptions n;
  auto* nrm = app.add_subcommand("norm", "L^p norm of a target");
  nrm->add_option("--target,--f", n.target, "Expression in x")->required();
  nrm->add_option("--measure", n.measure, "Measure specification")->required();
  nrm->add_option("--p", n.p, "Exponent, 1 <= p < inf")->required();
  nrm->add_option("--tol", n.tol, "Absolute tolerance");

  PlotOptions pl;
  auto* plt = app.add_subcommand("plot", "Sample target and approximant to CSV");
  plt->add_option("--cert", pl.cert, "Certificate path")->required();
  plt->add_option("--window", pl.window, "Window a:b");
  plt->add_option("--points", pl.points, "Number of rows");
  plt->add_option("--out", pl.out, "CSV path")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitPass : kExitInputError;
  }

  if (*sens) return cmd_sensitize(s, out, err);
  if (*ver) return cmd_verify(v, out, err);
  if (*nrm) return cmd_norm(n, out, err);
  return cmd_plot(pl, out, err);
}

}  // namespace lpsens
