#include <doctest.h>

#include <cmath>

#include "jumpstop/errors.hpp"
#include "jumpstop/jumps.hpp"
#include "jumpstop/shape.hpp"

using namespace jumpstop;

TEST_CASE("deterministic jump moments") {
  const auto spec = JumpSizeSpec::deterministic(-0.3);
  CHECK(spec.is_deterministic());
  CHECK(*spec.deterministic_size() == doctest::Approx(-0.3));
  CHECK(mean_jump(spec) == doctest::Approx(-0.3).epsilon(1e-15));
  CHECK(power_moment(spec, 2.0) == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(power_moment(spec, 0.0) == 1.0);
  CHECK(power_moment_slope(spec, 1.0) == doctest::Approx(std::log(0.7) * 0.7).epsilon(1e-14));
  CHECK(power_moment_curvature(spec, 1.0) == doctest::Approx(std::pow(std::log(0.7), 2) * 0.7).epsilon(1e-14));
  std::string kind = spec.kind_name();
  CHECK(kind == "deterministic");
}

TEST_CASE("default spec is a zero jump") {
  JumpSizeSpec spec;
  CHECK(spec.is_deterministic());
  CHECK(mean_jump(spec) == 0.0);
  CHECK(power_moment(spec, 3.7) == 1.0);
}

TEST_CASE("discrete jump moments are probability-weighted") {
  const auto spec = JumpSizeSpec::discrete({{-0.5, 0.25}, {0.2, 0.75}});
  CHECK_FALSE(spec.is_deterministic());
  CHECK_FALSE(spec.deterministic_size().has_value());
  CHECK(mean_jump(spec) == doctest::Approx(0.25 * -0.5 + 0.75 * 0.2).epsilon(1e-14));
  CHECK(power_moment(spec, 1.5) ==
        doctest::Approx(0.25 * std::pow(0.5, 1.5) + 0.75 * std::pow(1.2, 1.5)).epsilon(1e-14));
  CHECK(power_moment_slope(spec, -0.5) ==
        doctest::Approx(0.25 * std::log(0.5) * std::pow(0.5, -0.5) + 0.75 * std::log(1.2) * std::pow(1.2, -0.5))
            .epsilon(1e-13));
}

TEST_CASE("lognormal jump moments") {
  const double a = -0.1;
  const double b = 0.3;
  const auto spec = JumpSizeSpec::log_normal(a, b);
  for (const double k : {-1.0, 0.5, 1.0, 2.0}) {
    CHECK(power_moment(spec, k) == doctest::Approx(std::exp(k * a + 0.5 * k * k * b * b)).epsilon(1e-14));
  }
  CHECK(mean_jump(spec) == doctest::Approx(std::exp(a + 0.5 * b * b) - 1.0).epsilon(1e-14));
  const double k = 1.3;
  const double eps = 1e-5;
  const double fd = (power_moment(spec, k + eps) - power_moment(spec, k - eps)) / (2 * eps);
  CHECK(power_moment_slope(spec, k) == doctest::Approx(fd).epsilon(1e-8));
  const double fd2 = (power_moment_slope(spec, k + eps) - power_moment_slope(spec, k - eps)) / (2 * eps);
  CHECK(power_moment_curvature(spec, k) == doctest::Approx(fd2).epsilon(1e-8));
}

TEST_CASE("jump law validation") {
  CHECK_THROWS_AS(JumpSizeSpec::deterministic(-1.0), StructuralError);
  CHECK_THROWS_AS(JumpSizeSpec::deterministic(-1.5), StructuralError);
  CHECK_THROWS_AS(JumpSizeSpec::discrete({}), StructuralError);
  CHECK_THROWS_AS(JumpSizeSpec::discrete({{0.1, 0.5}, {0.2, 0.4}}), StructuralError);
  CHECK_THROWS_AS(JumpSizeSpec::discrete({{-1.0, 1.0}}), StructuralError);
  CHECK_THROWS_AS(JumpSizeSpec::discrete({{0.1, -0.5}, {0.2, 1.5}}), StructuralError);
  CHECK_THROWS_AS(JumpSizeSpec::log_normal(0.0, -0.1), StructuralError);
  CHECK_NOTHROW(JumpSizeSpec::log_normal(0.0, 0.0));
}

TEST_CASE("sampling matches the law") {
  Rng rng(7);
  const auto det = JumpSizeSpec::deterministic(0.4);
  CHECK(sample_factor(det, rng) == doctest::Approx(1.4));

  const auto degenerate = JumpSizeSpec::log_normal(0.2, 0.0);
  CHECK(sample_factor(degenerate, rng) == doctest::Approx(std::exp(0.2)));

  const auto disc = JumpSizeSpec::discrete({{-0.5, 0.3}, {0.5, 0.7}});
  int low = 0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double f = sample_factor(disc, rng);
    CHECK((f == 0.5 || f == 1.5));
    low += f == 0.5;
  }
  CHECK(std::abs(low / double(n) - 0.3) < 4.0 * std::sqrt(0.3 * 0.7 / n));

  const auto ln = JumpSizeSpec::log_normal(-0.05, 0.2);
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += sample_factor(ln, rng);
  const double mean = 1.0 + mean_jump(ln);
  const double sd = std::sqrt(power_moment(ln, 2.0) - mean * mean);
  CHECK(std::abs(s / n - mean) < 4.0 * sd / std::sqrt(n));
}

TEST_CASE("shape functions") {
  CHECK(upsilon(2.0, 0.5) == doctest::Approx(0.25));
  CHECK(upsilon(0.5, 0.0) == 0.0);
  // Convex power for alpha > 1 sits above its tangent, concave below.
  CHECK(upsilon(1.5, -0.4) > 0.0);
  CHECK(upsilon(1.5, 2.0) > 0.0);
  CHECK(upsilon(0.5, -0.4) < 0.0);
  CHECK(upsilon(0.5, 2.0) < 0.0);
  CHECK(upsilon(1.0, 0.7) == doctest::Approx(0.0));
  CHECK(phi(2.0, 0.5) == doctest::Approx(-1.25));
  CHECK(phi(-1.0, 1.0) == doctest::Approx(0.5));
  CHECK(phi(0.0, 3.0) == 0.0);
  CHECK_THROWS_AS(upsilon(1.5, -1.0), DomainError);
  CHECK_THROWS_AS(upsilon(0.0, 0.2), DomainError);
  CHECK_THROWS_AS(phi(1.0, -1.2), DomainError);
}
