#include <doctest.h>

#include <cmath>
#include <limits>

#include "harqfbl/channel_fbl.hpp"
#include "harqfbl/errors.hpp"

using namespace harqfbl;

TEST_CASE("db conversion and channel validation") {
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(db_to_linear(0.0) == 1.0);
  CHECK(ChannelSpec::from_db(15.0).snr() == doctest::Approx(31.6227766016838).epsilon(1e-13));
  CHECK_THROWS_AS(ChannelSpec(0.0), InvalidArgument);
  CHECK_THROWS_AS(ChannelSpec(-1.0), InvalidArgument);
  CHECK_THROWS_AS(ChannelSpec(std::numeric_limits<double>::infinity()), InvalidArgument);
  const ChannelSpec spec(3.0);
  CHECK(spec.gain_pdf(0.5) == doctest::Approx(std::exp(-0.5)));
  CHECK(spec.gain_pdf(-0.5) == 0.0);
}

TEST_CASE("code block") {
  const CodeBlock b(300, 600.0);
  CHECK(b.rate() == 2.0);
  CHECK(CodeBlock::from_rate(200, 1.5).nats() == doctest::Approx(300.0));
  CHECK_THROWS_AS(CodeBlock(0, 10.0), InvalidArgument);
  CHECK_THROWS_AS(CodeBlock(10, -1.0), InvalidArgument);
}

TEST_CASE("dispersion argument frozen references") {
  // mpmath, 40 digits
  const ChannelSpec spec(10.0);
  const double w = dispersion_argument(CodeBlock(300, 300.0), spec, 1.0);
  CHECK(std::abs(w - 24.312931458338982405) < 1e-12);
  const double e = conditional_error_prob(CodeBlock(300, 600.0), spec, 2.0);
  CHECK(std::abs(e / 1.2765386696379918957e-73 - 1.0) < 1e-10);
}

TEST_CASE("dispersion argument edge cases") {
  const ChannelSpec spec(10.0);
  CHECK(dispersion_argument(CodeBlock(100, 50.0), spec, 0.0) == -std::numeric_limits<double>::infinity());
  CHECK(dispersion_argument(CodeBlock(100, 0.0), spec, 0.0) == std::numeric_limits<double>::infinity());
  CHECK(conditional_error_prob(CodeBlock(100, 50.0), spec, 0.0) == 1.0);
  CHECK_THROWS_AS(dispersion_argument(CodeBlock(100, 50.0), spec, -1e-3), InvalidArgument);
  CHECK_THROWS_AS(dispersion_argument(CodeBlock(100, 50.0), spec, std::nan("")), InvalidArgument);
  // Zero crossing where ln(1 + gP) = R.
  const double theta = std::expm1(0.5) / 10.0;
  CHECK(std::abs(dispersion_argument(CodeBlock(100, 50.0), spec, theta)) < 1e-12);
  CHECK(conditional_error_prob(CodeBlock(100, 50.0), spec, theta) == doctest::Approx(0.5));
  // Very large gains must not overflow.
  CHECK(std::isfinite(dispersion_argument(CodeBlock(100, 50.0), spec, 1e300)));
}

TEST_CASE("error probability is monotone in gain, length and SNR") {
  const ChannelSpec lo(5.0), hi(50.0);
  double prev = 1.0;
  for (double g = 0.01; g < 20.0; g *= 1.3) {
    const double e = conditional_error_prob(CodeBlock(300, 300.0), lo, g);
    CHECK(e <= prev);
    prev = e;
    CHECK(conditional_error_prob(CodeBlock(300, 300.0), hi, g) <= e);
  }
  // Above the crossing, longer codes at the same K do better.
  CHECK(conditional_error_prob(CodeBlock(600, 300.0), lo, 1.0) <= conditional_error_prob(CodeBlock(300, 300.0), lo, 1.0));
}
