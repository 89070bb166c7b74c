#include "harqfbl/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "harqfbl/errors.hpp"

namespace harqfbl {

namespace {

constexpr double kTiny = 1e-300;

// Beyond this erfc(x) is close enough to underflow that exp(x^2) * erfc(x) loses digits.
constexpr double kErfcxSwitch = 20.0;

LogSigned gamma_lower_series(double a, double x, const GammaOptions& options) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < options.max_iterations; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * options.relative_tolerance) {
      const double log_lower = -x + a * std::log(x) + std::log(sum);
      const double ratio = std::exp(log_lower - std::lgamma(a));
      return {std::lgamma(a) + std::log1p(-ratio), 1};
    }
  }
  throw NonConvergence("upper_incomplete_gamma: lower series did not converge for a=" +
                       std::to_string(a) + ", x=" + std::to_string(x));
}

LogSigned gamma_continued_fraction(double a, double x, const GammaOptions& options) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= options.max_iterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < options.relative_tolerance) {
      return {-x + a * std::log(x) + std::log(std::abs(h)), h < 0.0 ? -1 : 1};
    }
  }
  throw NonConvergence("upper_incomplete_gamma: continued fraction did not converge for a=" +
                       std::to_string(a) + ", x=" + std::to_string(x));
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double erfcx(double x) {
  if (x < kErfcxSwitch) return std::exp(x * x) * std::erfc(x);
  // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
  double t = x;
  for (int n = 60; n >= 1; --n) t = x + 0.5 * n / t;
  return 1.0 / (std::sqrt(std::numbers::pi) * t);
}

double LogSigned::value() const { return sign * std::exp(log_magnitude); }

LogSigned upper_incomplete_gamma(double a, double x, const GammaOptions& options) {
  if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(a)) {
    throw InvalidArgument("upper_incomplete_gamma: requires finite a and x > 0");
  }
  if (a > 0.0 && x < a + 1.0) return gamma_lower_series(a, x, options);
  return gamma_continued_fraction(a, x, options);
}

void CompensatedSum::add(double term) {
  const double t = sum_ + term;
  if (std::abs(sum_) >= std::abs(term)) {
    compensation_ += (sum_ - t) + term;
  } else {
    compensation_ += (term - t) + sum_;
  }
  sum_ = t;
}

}  // namespace harqfbl
