#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace lpsens {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = true;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 200000;
};

/// Global adaptive Gauss-Kronrod (7/15) integration over [knots.front(),
/// knots.back()]. Every knot is a mandatory subdivision point; the local error
/// indicator is |K15 - G7|. Subdivision of the worst interval continues until
/// the summed indicator is within max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, std::vector<double> knots,
                           const QuadratureOptions& options = {});

}  // namespace lpsens
