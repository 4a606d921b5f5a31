#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "agebayes/random.hpp"

using namespace agebayes;

TEST_CASE("same seed gives the same stream") {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    differs = differs || x != c.uniform();
  }
  CHECK(differs);
}

TEST_CASE("derived streams are reproducible and distinct") {
  Rng a = Rng::derive(7, 0), b = Rng::derive(7, 0), c = Rng::derive(7, 1);
  const double x = a.normal();
  CHECK(x == b.normal());
  CHECK(x != c.normal());
}

TEST_CASE("uniform stays inside the open unit interval") {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("log_gamma matches Gamma moments, including tiny shapes") {
  Rng rng(3);
  for (double shape : {0.03, 0.5, 1.0, 4.0, 250.0}) {
    const int n = 200000;
    double s = 0.0;
    bool finite = true;
    for (int i = 0; i < n; ++i) {
      const double lg = rng.log_gamma(shape);
      finite = finite && std::isfinite(lg);
      s += std::exp(lg);
    }
    CHECK(finite);
    // Mean of Gamma(shape, 1) is shape with variance shape.
    CHECK(std::abs(s / n - shape) < 5.0 * std::sqrt(shape / n));
  }
}

TEST_CASE("multinomial conserves trials and matches expected counts") {
  Rng rng(5);
  const std::vector<double> w{1.0, 0.0, 3.0, 6.0};
  std::vector<std::int64_t> out(4);
  std::vector<double> acc(4, 0.0);
  const int reps = 20000;
  for (int r = 0; r < reps; ++r) {
    multinomial(rng, 50, w, out);
    REQUIRE(std::accumulate(out.begin(), out.end(), std::int64_t{0}) == 50);
    REQUIRE(out[1] == 0);
    for (int i = 0; i < 4; ++i) acc[i] += static_cast<double>(out[i]);
  }
  for (int i = 0; i < 4; ++i) {
    const double p = w[i] / 10.0;
    const double se = std::sqrt(50 * p * (1 - p) / reps);
    CHECK(std::abs(acc[i] / reps - 50 * p) <= 4 * se + 1e-12);
  }
}

TEST_CASE("multinomial rejects a zero weight sum") {
  Rng rng(1);
  const std::vector<double> w{0.0, 0.0};
  std::vector<std::int64_t> out(2);
  CHECK_THROWS_AS(multinomial(rng, 3, w, out), std::invalid_argument);
  multinomial(rng, 0, w, out);
  CHECK(out[0] + out[1] == 0);
}

TEST_CASE("dirichlet draws lie on the simplex") {
  Rng rng(9);
  const std::vector<double> alpha(100, 0.03);
  for (int r = 0; r < 200; ++r) {
    const auto p = dirichlet(rng, alpha);
    double s = 0.0;
    for (double v : p) {
      REQUIRE(v >= 0.0);
      s += v;
    }
    REQUIRE(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}
