// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "lpsens/approx.hpp"
#include "lpsens/certificate.hpp"
#include "lpsens/commands.hpp"
#include "lpsens/errors.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace lpsens;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void report(int n, const char* title, const Outcome& o) {
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << title
            << "): " << o.detail << std::endl;
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o;
  std::ostringstream e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str() + e.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / "lpsens_acceptance";
  fs::create_directories(dir);
  return dir;
}

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

// Certificates collected for the exact-sensitivity and nondiff criteria.
std::vector<Certificate> g_certs;

Outcome theorem_witness() {
  const char* targets[] = {"0", "x", "x^2", "if(x < 0.5, if(x > 0, 1, 0), 0)"};
  const char* measures[] = {"uniform(0,1)", "normal(0,1)", "mix(0.5*atom(0), 0.5*uniform(0,1))"};
  const auto dir = scratch_dir();
  int cases = 0;
  int failed = 0;
  double slowest = 0;
  std::string first_failure;
  for (const char* t : targets) {
    for (const char* m : measures) {
      for (const char* p : {"1", "2"}) {
        for (const char* eps : {"0.5", "0.1"}) {
          for (const char* M : {"0", "10"}) {
            const auto path = dir / ("case" + std::to_string(cases++) + ".json");
            const auto start = std::chrono::steady_clock::now();
            std::string log;
            int code = cli({"sensitize", "--target", t, "--measure", m, "--p", p, "--eps", eps,
                            "--M", M, "--out", path.string()},
                           &log);
            if (code == 0) {
              code = cli({"verify", "--cert", path.string(), "--samples", "1000000", "--seed",
                          "42"},
                         &log);
            }
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            slowest = std::max(slowest, secs);
            if (code != 0 || secs >= 10) {
              ++failed;
              if (first_failure.empty()) {
                first_failure = std::string(t) + " | " + m + " | p=" + p + " eps=" + eps +
                                " M=" + M + " exit " + std::to_string(code) + ": " + log;
              }
              continue;
            }
            g_certs.push_back(read_certificate(slurp(path)));
          }
        }
      }
    }
  }
  Outcome o;
  o.pass = failed == 0;
  o.detail = std::to_string(cases - failed) + "/" + std::to_string(cases) +
             " cases verified, slowest " + format_double(std::round(slowest * 100) / 100) + " s";
  if (!first_failure.empty()) o.detail += "; first failure: " + first_failure;
  return o;
}

Outcome convergence() {
  Outcome o;
  mpz_class prev = 0;
  std::vector<std::string> bs;
  const std::vector<mpz_class> expected{10, 20, 40, 80};
  int i = 0;
  for (const char* eps : {"0.4", "0.2", "0.1", "0.05"}) {
    try {
      auto req = make_request("x^2", "normal(0,1)", 2, *parse_rational(eps), Rational(1));
      auto cert = sensitize(req).certificate;
      const bool ok = cert.error_bound + to_double(cert.quadrature_tolerance) <
                          to_double(req.eps) &&
                      cert.b >= prev && cert.b == expected[i];
      if (!ok) o.pass = false;
      bs.push_back(cert.b.get_str());
      prev = cert.b;
      g_certs.push_back(std::move(cert));
    } catch (const std::exception& e) {
      o.pass = false;
      bs.push_back(std::string("error: ") + e.what());
    }
    ++i;
  }
  o.detail = "b =";
  for (const auto& b : bs) o.detail += " " + b;
  return o;
}

Outcome exact_sensitivity() {
  Outcome o;
  int bad = 0;
  for (const auto& c : g_certs) {
    // Re-derive from the serialized form.
    const auto back = read_certificate(write_certificate(c));
    const Rational derived = back.scale * Rational(back.b);
    if (!(derived == back.min_abs_slope && back.min_abs_slope >= back.M + 1)) ++bad;
  }
  o.pass = bad == 0 && !g_certs.empty();
  o.detail = std::to_string(g_certs.size() - bad) + "/" + std::to_string(g_certs.size()) +
             " certificates with min_abs_slope = scale*b >= M+1";
  return o;
}

// ceil(n/d) for d > 0 using plain integer division.
long long ceil_div(long long n, long long d) { return n >= 0 ? (n + d - 1) / d : -((-n) / d); }

Outcome zigzag_formula() {
  testing::Gen g(3);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const long long en = g.integer(1, 5000);
    const long long ed = g.integer(1, 5000);
    const long long mn = g.integer(0, 5000);
    const long long md = g.integer(1, 5000);
    // 2 (M + 1) / eps = 2 (mn + md) ed / (md en)
    const long long oracle = ceil_div(2 * (mn + md) * ed, md * en);
    const auto b = build_zigzag(q(en, ed), q(mn, md)).b();
    if (b != static_cast<long>(oracle)) ++bad;
  }
  return {bad == 0, std::to_string(1000 - bad) + "/1000 pairs match the ceiling oracle"};
}

Outcome outer_regularity() {
  testing::Gen g(4);
  int runs = 0;
  int bad = 0;
  for (const char* s : testing::test_measures()) {
    const auto mu = BorelMeasure::parse(s);
    for (int i = 0; i < 200; ++i) {
      const auto B = IntervalUnion::from(g.intervals(5, -3, 3, 16));
      for (double p : {1.0, 2.0}) {
        for (double tol : {0.1, 0.01}) {
          ++runs;
          const auto V = approximate_borel_set(B, mu, p, tol);
          if (!(V.all_open() && V.contains(B) && mu.measure_of(V.minus(B)) < std::pow(tol, p))) {
            ++bad;
          }
        }
      }
    }
  }
  return {bad == 0, std::to_string(runs - bad) + "/" + std::to_string(runs) + " runs hold"};
}

Outcome tail_truncation() {
  const auto mu = BorelMeasure::parse("uniform(0,1)");
  // V_j = (2^-j, 2^-j+1), j >= 1.
  IntervalEnumerator dyadic = [](std::size_t i) -> std::optional<Interval> {
    mpz_class den = 1;
    den <<= static_cast<unsigned>(i);
    return Interval::open(Rational(mpz_class(1), mpz_class(2 * den)), Rational(mpz_class(1), den));
  };
  const double tols[] = {0.9,  0.5,  0.3,  0.25,    0.2,  0.125, 0.1,  0.05, 0.03125, 0.02,
                         0.01, 5e-3, 1e-3, 0x1p-10, 5e-4, 1e-4,  3e-5, 1e-5, 0x1p-16, 1e-6};
  int bad = 0;
  for (double tol : tols) {
    // Smallest N with 2^-N < tol.
    int oracle = 0;
    while (!(std::ldexp(1.0, -oracle) < tol)) ++oracle;
    const auto t = truncate_union(dyadic, 1.0, mu, 1.0, tol, 200);
    if (static_cast<int>(t.count()) != oracle) ++bad;
  }
  return {bad == 0, std::to_string(20 - bad) + "/20 tolerances give the minimal N"};
}

Outcome norm_oracle() {
  struct Case {
    const char* f;
    const char* mu;
    double p;
  };
  const Case corpus[] = {
      {"x", "uniform(0,1)", 1},
      {"x", "normal(0,1)", 2},
      {"x^2", "normal(0,1)", 1},
      {"x^2", "uniform(-1,1)", 3},
      {"sin(x)", "normal(0,1)", 2},
      {"cos(5*x)", "uniform(0,3)", 1},
      {"exp(x)", "uniform(0,1)", 2},
      {"exp(0 - x)", "exponential(1)", 1},
      {"x", "exponential(2)", 2},
      {"sqrt(x)", "exponential(1)", 1.5},
      {"log(1 + x^2)", "normal(1,2)", 1},
      {"abs(x)", "normal(0,3)", 1},
      {"abs(x - 0.3)", "mix(0.5*atom(0), 0.5*uniform(0,1))", 2},
      {"if(x < 0, -1, 2)", "normal(0,1)", 1},
      {"if(x < 0.5, if(x > 0, 1, 0), 0)", "uniform(0,1)", 2},
      {"min(x, 0.3)", "uniform(0,1)", 1},
      {"max(x, 0)", "normal(0,1)", 2},
      {"x^3 - x", "normal(0,1)", 1},
      {"1", "normal(3,2)", 4},
      {"sin(3*x) + x^2", "normal(0,1)", 2},
      {"1 / (1 + x^2)", "normal(0,1)", 1},
      {"x", "piecewise([0, 1, 2], [1], [0, 1])", 1},
      {"x^2", "piecewise([0, 1, 2], [1], [0, 1])", 2},
      {"sin(x)", "mix(0.3*normal(0,1), 0.2*atom(1), 0.5*exponential(1))", 1},
      {"x", "mix(0.3*normal(0,1), 0.2*atom(1), 0.5*exponential(1))", 2},
      {"abs(x) ^ 1.5", "normal(0,1)", 1.5},
      {"exp(0 - x^2 / 2)", "normal(0,1)", 2},
      {"cos(x) * exp(x / 4)", "exponential(1)", 1},
      {"if(x <= 1, x, 2 - x)", "uniform(0,2)", 3},
      {"x * (1 - x)", "mix(0.25*atom(0.5), 0.75*uniform(0,1))", 1},
  };
  int agree = 0;
  std::string misses;
  for (const auto& c : corpus) {
    const auto f = Evaluable::of(parse_target(c.f));
    const auto mu = BorelMeasure::parse(c.mu);
    const auto quad = lp_norm(f, mu, c.p, 1e-8);
    const auto mc = mc_norm(f, mu, c.p, 1000000, 42);
    if (std::abs(quad.value - mc.value) <= quad.absolute_error_bound + mc.absolute_error_bound) {
      ++agree;
    } else {
      misses += std::string(" [") + c.f + " under " + c.mu + "]";
    }
  }
  const int n = static_cast<int>(std::size(corpus));
  Outcome o{agree >= n - 1, std::to_string(agree) + "/" + std::to_string(n) + " agree"};
  if (!misses.empty()) o.detail += "; outside bounds:" + misses;
  return o;
}

Outcome nondiff_structure() {
  int bad = 0;
  const Window w{q(-2), q(2)};
  for (const auto& c : g_certs) {
    const auto y = approximant_of(c);
    const auto pts = y.nondiff_points(w);
    std::set<Rational> expected;
    const long b = c.b.get_si();
    for (long j = -2 * b + 1; j <= 2 * b - 1; ++j) expected.insert(q(j, b));
    for (const auto& e : c.phi0.endpoints()) {
      if (e > w.lower && e < w.upper) expected.insert(e);
    }
    bool ok = std::vector<Rational>(expected.begin(), expected.end()) == pts;
    for (std::size_t k = 1; k < pts.size(); ++k) ok = ok && pts[k] - pts[k - 1] > 0;
    if (!ok) ++bad;
  }
  return {bad == 0 && !g_certs.empty(),
          std::to_string(g_certs.size() - bad) + "/" + std::to_string(g_certs.size()) +
              " approximants match (endpoints ∪ lattice) on (-2, 2)"};
}

Outcome hypothesis_rejection() {
  const auto out = (scratch_dir() / "reject.json").string();
  auto run = [&](const char* target, const char* measure, const char* p) {
    return cli({"sensitize", "--target", target, "--measure", measure, "--p", p, "--eps", "0.1",
                "--M", "1", "--out", out});
  };
  const int half = run("x", "uniform(0,1)", "0.5");
  const int inf = run("x", "uniform(0,1)", "inf");
  const int wild = run("exp(x^2)", "normal(0,1)", "2");
  return {half == 2 && inf == 2 && wild == 4,
          "exit codes " + std::to_string(half) + ", " + std::to_string(inf) + ", " +
              std::to_string(wild)};
}

}  // namespace

int main() {
  bool all = true;
  auto record = [&all](int n, const char* title, const Outcome& o) {
    report(n, title, o);
    all = all && o.pass;
  };
  record(1, "theorem witness", theorem_witness());
  const auto conv = convergence();
  record(2, "exact sensitivity", exact_sensitivity());
  record(3, "zigzag formula", zigzag_formula());
  record(4, "outer regularity", outer_regularity());
  record(5, "tail truncation", tail_truncation());
  record(6, "norm oracle agreement", norm_oracle());
  record(7, "non-differentiability structure", nondiff_structure());
  record(8, "convergence", conv);
  record(9, "hypothesis rejection", hypothesis_rejection());
  return all ? 0 : 1;
}
