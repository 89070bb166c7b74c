#pragma once

namespace harqfbl {

/// Gaussian tail probability Q(x) = P(N(0,1) > x) = erfc(x / sqrt(2)) / 2.
/// Saturates to 0 and 1 at +inf and -inf.
double q_function(double x);

/// Scaled complementary error function exp(x^2) erfc(x), finite for all x >= 0.
double erfcx(double x);

/// A real number stored as sign * exp(log_magnitude). Zero has log_magnitude -inf.
struct LogSigned {
  double log_magnitude;
  int sign;

  double value() const;
};

struct GammaOptions {
  int max_iterations = 100000;
  double relative_tolerance = 1e-14;
};

/// Upper incomplete Gamma function Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt for x > 0 and
/// any real a, returned in log domain. Large negative a is the intended use: the value
/// under- or overflows a double long before its logarithm does.
///
/// Uses the Legendre continued fraction (modified Lentz) except for a > 0 and x < a + 1,
/// where Gamma(a) minus the lower series is better conditioned.
/// Throws NonConvergence once max_iterations is reached, InvalidArgument for x <= 0.
LogSigned upper_incomplete_gamma(double a, double x, const GammaOptions& options = {});

/// Compensated (Kahan-Babuska) running sum.
class CompensatedSum {
 public:
  void add(double term);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace harqfbl
