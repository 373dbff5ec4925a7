#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace lpsens {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitPass = 0,
  kExitVerifyFail = 1,
  kExitInputError = 2,
  kExitBudget = 3,
  kExitHypothesis = 4,
};

struct SensitizeOptions {
  std::string target;
  std::string measure;
  std::string p;
  std::string eps;
  std::string M;
  std::string out;
};

struct VerifyOptions {
  std::string cert;
  std::size_t samples = 1000000;
  std::uint64_t seed = 42;
};

struct NormOptions {
  std::string target;
  std::string measure;
  std::string p;
  double tol = 1e-6;
};

struct PlotOptions {
  std::string cert;
  std::string window = "0:1";
  std::size_t points = 101;
  std::string out;
};

/// Accepts decimals, "num/den", and "inf"/"infinity" (rejected later).
double parse_exponent(const std::string& text);

int cmd_sensitize(const SensitizeOptions& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);
int cmd_norm(const NormOptions& opt, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotOptions& opt, std::ostream& out, std::ostream& err);

/// Full command line (without the program name) to exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpsens
