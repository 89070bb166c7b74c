#include <doctest.h>

#include <cmath>
#include <vector>

#include "harqfbl/quadrature.hpp"

using namespace harqfbl;

TEST_CASE("polynomials are integrated exactly by a single Kronrod panel") {
  const std::vector<double> edges{-1.0, 2.0};
  const auto r = integrate_adaptive([](double x) { return 3 * x * x * x * x - x + 2; }, edges);
  CHECK(r.converged);
  CHECK(r.intervals == 1);
  CHECK(r.value == doctest::Approx(3.0 * 33.0 / 5.0 - 1.5 + 6.0).epsilon(1e-14));
}

TEST_CASE("smooth integrals reach the requested tolerance") {
  const std::vector<double> edges{0.0, 40.0};
  const auto r = integrate_adaptive([](double x) { return std::exp(-x) * std::cos(x); }, edges);
  CHECK(r.converged);
  const double want = 0.5 * (1.0 - std::exp(-40.0) * (std::cos(40.0) - std::sin(40.0)));
  CHECK(std::abs(r.value - want) < 1e-12);
  CHECK(r.error <= 1e-10 * std::abs(r.value));
}

TEST_CASE("breakpoints capture a narrow feature") {
  // Steep logistic step at x = 7.3: the integral is 10 - 7.3 up to e^-1000 terms.
  auto step = [](double x) { return 0.5 * std::erfc(-(x - 7.3) * 200.0); };
  const std::vector<double> edges{0.0, 7.2, 7.3, 7.4, 10.0};
  const auto r = integrate_adaptive(step, edges);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.7).epsilon(1e-11));
}

TEST_CASE("an integrable singularity exhausts the budget and says so") {
  QuadratureOptions opts;
  opts.relative_tolerance = 1e-15;
  opts.max_subdivisions = 20;
  const std::vector<double> edges{0.0, 1.0};
  const auto r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, edges, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(r.error > 0.0);
}

TEST_CASE("absolute tolerance stops refinement of a vanishing integral") {
  QuadratureOptions opts;
  opts.absolute_tolerance = 1e-12;
  const std::vector<double> edges{0.0, 2.0 * M_PI};
  const auto r = integrate_adaptive([](double x) { return std::sin(x); }, edges, opts);
  CHECK(r.converged);
  CHECK(std::abs(r.value) < 1e-12);
}
