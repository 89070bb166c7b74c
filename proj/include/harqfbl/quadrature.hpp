#pragma once

#include <functional>
#include <span>

namespace harqfbl {

struct QuadratureOptions {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 0.0;
  /// Total number of bisections allowed across all sub-intervals.
  int max_subdivisions = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

/// Globally adaptive 21-point Gauss-Kronrod integration over [edges.front(), edges.back()].
///
/// `edges` must be sorted; interior entries act as mandatory breakpoints (put them where
/// the integrand changes quickly). The interval with the largest error estimate is bisected
/// until the summed error is below max(absolute_tolerance, relative_tolerance * |value|)
/// or the subdivision budget runs out, in which case `converged` is false.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    std::span<const double> edges,
                                    const QuadratureOptions& options = {});

}  // namespace harqfbl
