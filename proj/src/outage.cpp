#include "harqfbl/outage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "harqfbl/errors.hpp"
#include "harqfbl/quadrature.hpp"
#include "harqfbl/special_functions.hpp"

namespace harqfbl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double clamp_unit(double x) { return std::clamp(x, 0.0, 1.0); }

OutageEstimate make_estimate(double raw, OutageMethod method) {
  OutageEstimate est{clamp_unit(raw), method, {}};
  est.diagnostics.raw_value = raw;
  return est;
}

// sinh(w)/w - 1 without cancellation for small w.
double sinhc_minus_one(double w) {
  if (w < 1e-3) {
    const double w2 = w * w;
    return w2 / 6.0 * (1.0 + w2 / 20.0);
  }
  return std::sinh(w) / w - 1.0;
}

// a - 1 + e^-a without cancellation for small a.
double ramp_integral(double a) {
  if (a < 1e-2) return a * a / 2.0 * (1.0 - a / 3.0 + a * a / 12.0);
  return a + std::expm1(-a);
}

}  // namespace

RoundGeometry::RoundGeometry(std::int64_t cumulative_length_, double nats_, const ChannelSpec& spec)
    : cumulative_length(cumulative_length_), nats(nats_) {
  if (cumulative_length < 1) throw InvalidArgument("RoundGeometry: cumulative length must be >= 1");
  if (!(nats > 0.0) || !std::isfinite(nats)) {
    throw InvalidArgument("RoundGeometry: nats must be positive and finite");
  }
  const double l = static_cast<double>(cumulative_length);
  rate = nats / l;
  theta = std::expm1(rate) / spec.snr();
  b = std::sqrt(l) * spec.snr() / std::sqrt(std::expm1(2.0 * rate));
  if (!std::isfinite(theta) || !(b > 0.0)) {
    throw InvalidArgument("RoundGeometry: rate " + std::to_string(rate) + " is out of range");
  }
}

std::string_view to_string(OutageMethod method) {
  switch (method) {
    case OutageMethod::Oracle:
      return "oracle";
    case OutageMethod::HighSnrSeries:
      return "high-snr";
    case OutageMethod::Linearized:
      return "linearized";
    case OutageMethod::LowerBound:
      return "lower";
    case OutageMethod::UpperBound:
      return "upper";
  }
  return "unknown";
}

OutageMethod parse_outage_method(std::string_view name) {
  for (auto m : {OutageMethod::Oracle, OutageMethod::HighSnrSeries, OutageMethod::Linearized,
                 OutageMethod::LowerBound, OutageMethod::UpperBound}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown outage method '" + std::string(name) + "'");
}

OutageEstimate omega_oracle(const RoundGeometry& geom, const ChannelSpec& spec,
                            const OracleOptions& options) {
  const double tol = options.tolerance;
  if (!(tol > 0.0) || tol > 1e-3) throw InvalidArgument("omega_oracle: tol must be in (0, 1e-3]");

  const CodeBlock block(geom.cumulative_length, geom.nats);
  const auto integrand = [&](double x) { return std::exp(-x) * conditional_error_prob(block, spec, x); };

  double x_max = -std::log(tol * 1e-3);
  int evaluations = 0;
  for (int attempt = 0; attempt < 6; ++attempt, x_max *= 2.0) {
    std::vector<double> edges{0.0};
    for (double c : {-10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0}) {
      const double x = geom.theta + c / geom.b;
      if (x > edges.back() && x < x_max) edges.push_back(x);
    }
    edges.push_back(x_max);

    QuadratureOptions quad;
    quad.relative_tolerance = 0.5 * tol;
    quad.absolute_tolerance = std::numeric_limits<double>::min();
    quad.max_subdivisions = options.max_subdivisions;
    const QuadratureResult r = integrate_adaptive(integrand, edges, quad);
    evaluations += r.evaluations;
    if (!r.converged) {
      throw NonConvergence("omega_oracle: no convergence within " +
                           std::to_string(options.max_subdivisions) + " subdivisions (l=" +
                           std::to_string(geom.cumulative_length) + ", K=" + std::to_string(geom.nats) +
                           ", P=" + std::to_string(spec.snr()) + ")");
    }

    // Q(W(x)) is non-increasing in x, so the tail lies in [0, e^-xmax Q(W(xmax))].
    const double tail = std::exp(-x_max) * conditional_error_prob(block, spec, x_max);
    const double value = r.value + 0.5 * tail;
    const double error = r.error + 0.5 * tail;
    if (error <= tol * std::abs(value) || error == 0.0) {
      OutageEstimate est = make_estimate(value, OutageMethod::Oracle);
      est.diagnostics.error_estimate = error;
      est.diagnostics.evaluations = evaluations;
      return est;
    }
  }
  throw NonConvergence("omega_oracle: tail bound never dropped below tolerance");
}

OutageEstimate omega_high_snr(const RoundGeometry& geom, const ChannelSpec& spec, double series_tol) {
  if (!(series_tol > 0.0)) throw InvalidArgument("omega_high_snr: series_tol must be positive");

  const double l = static_cast<double>(geom.cumulative_length);
  const double K = geom.nats;
  const double inv_p = 1.0 / spec.snr();
  const double log_c = geom.rate - std::log(spec.snr());
  const double root_2l = std::sqrt(2.0 * l);
  const double lead = 0.5 * std::erfc(-geom.rate * std::sqrt(0.5 * l));
  const int i_max = static_cast<int>(std::ceil(K + 20.0 * root_2l));

  CompensatedSum sum;
  double max_term = 0.0;
  double rounding = 0.0;
  int small_run = 0;
  int last = -1;
  for (int i = 0; i <= i_max; ++i) {
    const double di = static_cast<double>(i);
    const double log_erfc = std::log(std::erfc(-(K + di) / root_2l));
    const double parts[] = {inv_p, di * log_c, std::lgamma(di + 1.0), di * di / (2.0 * l), log_erfc};
    const double log_mag = parts[0] + parts[1] - parts[2] + parts[3] + parts[4];
    if (log_mag > 700.0) {
      throw SeriesUnstable("omega_high_snr: term magnitude overflow at i=" + std::to_string(i));
    }
    const double magnitude = std::exp(log_mag);
    sum.add(i % 2 == 0 ? magnitude : -magnitude);
    max_term = std::max(max_term, magnitude);
    double spread = 1.0;
    for (double p : parts) spread += std::abs(p);
    rounding += kEps * magnitude * spread;
    last = i;

    if (magnitude < series_tol * std::abs(sum.value())) {
      if (++small_run == 5) break;
    } else {
      small_run = 0;
    }
  }
  if (small_run < 5) {
    throw SeriesUnstable("omega_high_snr: series did not settle before i_max=" + std::to_string(i_max));
  }

  const double series = sum.value();
  const double raw = lead - 0.5 * series;
  const double ratio = max_term / std::abs(series);
  const double error = 0.5 * rounding + kEps * lead;
  if (!(ratio <= 1e12)) {
    throw SeriesUnstable("omega_high_snr: max term / sum = " + std::to_string(ratio));
  }
  if (!(raw > 0.0) || error > series_tol * raw) {
    throw SeriesUnstable("omega_high_snr: cancellation error " + std::to_string(error) +
                         " exceeds tolerance at value " + std::to_string(raw));
  }

  OutageEstimate est = make_estimate(raw, OutageMethod::HighSnrSeries);
  est.diagnostics.truncation_index = last;
  est.diagnostics.max_term_ratio = ratio;
  est.diagnostics.error_estimate = error;
  return est;
}

OutageEstimate omega_linearized(const RoundGeometry& geom, const ChannelSpec&) {
  const double half_width = std::sqrt(std::numbers::pi / 2.0) / geom.b;
  const double slope = geom.b / std::sqrt(2.0 * std::numbers::pi);
  double raw;
  if (geom.theta >= half_width) {
    raw = -std::expm1(-geom.theta) - std::exp(-geom.theta) * sinhc_minus_one(half_width);
  } else {
    raw = slope * ramp_integral(geom.theta + half_width);
  }
  return make_estimate(raw, OutageMethod::Linearized);
}

double omega_lower_bound_raw(const RoundGeometry& geom, const ChannelSpec&) {
  const double b = geom.b;
  const double theta = geom.theta;
  const double first = 0.5 * std::erfc(-theta * b / std::numbers::sqrt2);
  const double z = (1.0 - b * b * theta) / (std::numbers::sqrt2 * b);
  double second;
  if (z > 0.0) {
    // e^{1/(2b^2) - theta} erfc(z) = erfcx(z) e^{-b^2 theta^2 / 2}
    second = 0.5 * erfcx(z) * std::exp(-0.5 * b * b * theta * theta);
  } else {
    second = 0.5 * std::exp(1.0 / (2.0 * b * b) - theta) * std::erfc(z);
  }
  return first - second;
}

double omega_upper_bound_at(const RoundGeometry& geom, const ChannelSpec& spec, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("omega_upper_bound_at: eps must be positive");
  const double l = static_cast<double>(geom.cumulative_length);
  const double p = spec.snr();
  const double psi = std::expm1(geom.rate + 0.5 * eps) / p;
  const double alpha = 1.0 / p + geom.nats * eps + 0.5 * l * eps * eps;
  const LogSigned gamma = upper_incomplete_gamma(1.0 - eps * l, psi + 1.0 / p);
  const double base = -0.5 * (std::expm1(-geom.theta) + std::expm1(-psi));
  const double log_term = alpha - eps * l * std::log(p) + gamma.log_magnitude - std::numbers::ln2;
  return base + gamma.sign * std::exp(log_term);
}

std::vector<double> default_eps_grid() {
  std::vector<double> grid(32);
  for (int i = 0; i < 32; ++i) grid[i] = std::pow(10.0, -6.0 + 6.0 * i / 31.0);
  return grid;
}

std::pair<OutageEstimate, OutageEstimate> omega_bounds(const RoundGeometry& geom,
                                                       const ChannelSpec& spec,
                                                       std::span<const double> eps_grid) {
  if (eps_grid.empty()) throw InvalidArgument("omega_bounds: eps grid is empty");
  for (double e : eps_grid) {
    if (!(e > 0.0)) throw InvalidArgument("omega_bounds: eps entries must be positive");
  }

  OutageEstimate lower = make_estimate(omega_lower_bound_raw(geom, spec), OutageMethod::LowerBound);

  std::optional<double> best_u;
  double best_eps = 0.0;
  for (double eps : eps_grid) {
    double u;
    try {
      u = omega_upper_bound_at(geom, spec, eps);
    } catch (const NonConvergence&) {
      continue;
    }
    if (std::isnan(u)) continue;
    if (!best_u || u < *best_u || (u == *best_u && eps < best_eps)) {
      best_u = u;
      best_eps = eps;
    }
  }
  if (!best_u) throw GammaKernelFailure("omega_bounds: incomplete Gamma failed for every eps");

  OutageEstimate upper = make_estimate(*best_u, OutageMethod::UpperBound);
  upper.diagnostics.chosen_eps = best_eps;
  lower.value = std::min(lower.value, upper.value);
  return {lower, upper};
}

std::pair<OutageEstimate, OutageEstimate> omega_bounds(const RoundGeometry& geom, const ChannelSpec& spec) {
  const auto grid = default_eps_grid();
  return omega_bounds(geom, spec, grid);
}

OutageEstimate estimate_omega(const RoundGeometry& geom, const ChannelSpec& spec, OutageMethod method,
                              const OracleOptions& oracle) {
  switch (method) {
    case OutageMethod::Oracle:
      return omega_oracle(geom, spec, oracle);
    case OutageMethod::HighSnrSeries:
      return omega_high_snr(geom, spec);
    case OutageMethod::Linearized:
      return omega_linearized(geom, spec);
    case OutageMethod::LowerBound:
      return omega_bounds(geom, spec).first;
    case OutageMethod::UpperBound:
      return omega_bounds(geom, spec).second;
  }
  throw InvalidArgument("estimate_omega: unknown method");
}

}  // namespace harqfbl
