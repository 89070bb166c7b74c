#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "harqfbl/channel_fbl.hpp"

namespace harqfbl {

/// Geometry of the combined code after m rounds: l_(m) channel uses carrying K nats.
///
///   rate  R = K / l
///   theta = (e^R - 1) / P          gain at which ln(1+gP) = R
///   b     = sqrt(l P^2 / (e^{2R} - 1))   slope of W at theta
struct RoundGeometry {
  std::int64_t cumulative_length;
  double nats;
  double rate;
  double theta;
  double b;

  RoundGeometry(std::int64_t cumulative_length, double nats, const ChannelSpec& spec);
};

enum class OutageMethod { Oracle, HighSnrSeries, Linearized, LowerBound, UpperBound };

std::string_view to_string(OutageMethod method);
/// Accepts "oracle", "high-snr", "linearized", "lower", "upper".
OutageMethod parse_outage_method(std::string_view name);

struct OutageDiagnostics {
  /// Estimator output before clamping to [0, 1].
  double raw_value = 0.0;
  /// Oracle: quadrature error estimate including the tail interval.
  std::optional<double> error_estimate;
  std::optional<int> evaluations;
  /// High-SNR series: index of the last summed term and max |term| / |sum|.
  std::optional<int> truncation_index;
  std::optional<double> max_term_ratio;
  /// Upper bound: minimizing epsilon.
  std::optional<double> chosen_eps;
};

struct OutageEstimate {
  double value;
  OutageMethod method;
  OutageDiagnostics diagnostics;
};

struct OracleOptions {
  double tolerance = 1e-10;
  int max_subdivisions = 4000;
};

/// Omega_m = int_0^inf e^-x Q(W(x)) dx by adaptive Gauss-Kronrod, with the tail beyond the
/// truncation point bounded by e^-xmax Q(W(xmax)) and carried as half an interval.
/// Throws InvalidArgument unless tol is in (0, 1e-3], NonConvergence if the budget runs out.
OutageEstimate omega_oracle(const RoundGeometry& geom, const ChannelSpec& spec,
                            const OracleOptions& options = {});

/// High-SNR series (denominator of W dropped, then e^{-(t e^R - 1)/P} expanded in t):
///
///   Omega = erfc(-R sqrt(l/2)) / 2
///         - e^{1/P}/2 * sum_i (-e^R/P)^i / i! * e^{i^2/(2l)} * erfc(-(K+i)/sqrt(2l))
///
/// The series is asymptotic, so it is cut once 5 consecutive terms fall below
/// series_tol * |sum|. Throws SeriesUnstable when cancellation makes the result unreliable;
/// fall back to omega_oracle or omega_linearized.
OutageEstimate omega_high_snr(const RoundGeometry& geom, const ChannelSpec& spec,
                              double series_tol = 1e-8);

/// Closed form obtained by replacing Q(W(x)) with the linear ramp through (theta, 1/2) of
/// slope -b/sqrt(2 pi), saturating at 0 and 1. When the ramp would start below x = 0 the
/// integral is taken over [0, theta + w] only.
OutageEstimate omega_linearized(const RoundGeometry& geom, const ChannelSpec& spec);

/// Upper-bound value u_m(eps) for one epsilon, unclamped.
double omega_upper_bound_at(const RoundGeometry& geom, const ChannelSpec& spec, double eps);
/// Lower-bound value v_m, unclamped.
double omega_lower_bound_raw(const RoundGeometry& geom, const ChannelSpec& spec);

/// 32 log-spaced epsilons in [1e-6, 1].
std::vector<double> default_eps_grid();

/// Lower bound v_m (tangent of the concave W at theta) and upper bound min_eps u_m(eps).
/// Ties in the minimization go to the smaller epsilon. Throws GammaKernelFailure if no
/// epsilon in the grid could be evaluated.
std::pair<OutageEstimate, OutageEstimate> omega_bounds(const RoundGeometry& geom,
                                                       const ChannelSpec& spec,
                                                       std::span<const double> eps_grid);
std::pair<OutageEstimate, OutageEstimate> omega_bounds(const RoundGeometry& geom,
                                                       const ChannelSpec& spec);

/// Single-method dispatch used by the higher layers.
OutageEstimate estimate_omega(const RoundGeometry& geom, const ChannelSpec& spec,
                              OutageMethod method, const OracleOptions& oracle = {});

}  // namespace harqfbl
