#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "teleport/errors.hpp"
#include "teleport/mode_register.hpp"

using namespace teleport;

namespace {

constexpr double kOmegaT = 200.0 * std::numbers::pi;

// Composite Simpson over [0, 1]; independent of the Kronrod path.
double simpson_overlap(TemporalModeId a, TemporalModeId b, double omega_t, int intervals = 400000) {
  const double h = 1.0 / intervals;
  double sum = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double u = i * h;
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * mode_profile(a, u, omega_t) * mode_profile(b, u, omega_t);
  }
  return sum * h / 3.0;
}

// Legendre polynomial on [-1, 1] from its explicit low-order forms.
double legendre_explicit(int n, double x) {
  switch (n) {
    case 0: return 1.0;
    case 1: return x;
    case 2: return 0.5 * (3 * x * x - 1);
    case 3: return 0.5 * (5 * x * x * x - 3 * x);
    case 4: return (35 * std::pow(x, 4) - 30 * x * x + 3) / 8.0;
    default: return (63 * std::pow(x, 5) - 70 * std::pow(x, 3) + 15 * x) / 8.0;
  }
}

}  // namespace

TEST_CASE("shifted_legendre anchors") {
  for (double u : {0.0, 0.3, 0.5, 1.0}) CHECK(shifted_legendre(0, u) == 1.0);
  CHECK(shifted_legendre(1, 0.5) == doctest::Approx(0.0));
  for (int n = 0; n <= 5; ++n) CHECK(shifted_legendre(n, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  for (int n = 0; n <= 5; ++n) CHECK(shifted_legendre(n, 0.0) == doctest::Approx(n % 2 ? -1.0 : 1.0));
}

TEST_CASE("shifted_legendre matches explicit polynomials") {
  for (int n = 0; n <= 5; ++n) {
    for (double u = 0.0; u <= 1.0; u += 0.0625) {
      CHECK(shifted_legendre(n, u) == doctest::Approx(legendre_explicit(n, 2 * u - 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("shifted_legendre rejects arguments outside the unit interval") {
  CHECK_THROWS_AS(shifted_legendre(2, -0.01), std::domain_error);
  CHECK_THROWS_AS(shifted_legendre(2, 1.01), std::domain_error);
  CHECK_THROWS_AS(shifted_legendre(-1, 0.5), std::domain_error);
}

TEST_CASE("recurrence residual stays below 1e-10") {
  for (int n = 1; n < 10; ++n) {
    for (int i = 0; i <= 200; ++i) {
      const double u = i / 200.0;
      const double x = 2 * u - 1;
      const double residual = (n + 1) * shifted_legendre(n + 1, u) - (2 * n + 1) * x * shifted_legendre(n, u) +
                              n * shifted_legendre(n - 1, u);
      CHECK(std::abs(residual) < 1e-10);
    }
  }
}

TEST_CASE("mode normalization") {
  CHECK(mode_normalization(0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(mode_normalization(1) == doctest::Approx(std::sqrt(6.0)));
  CHECK(mode_normalization(2) == doctest::Approx(std::sqrt(10.0)));
  CHECK_THROWS_AS(mode_normalization(-1), std::domain_error);
}

TEST_CASE("mode_overlap examples against Simpson oracle") {
  const TemporalModeId c0{Polarity::Cos, 0};
  const TemporalModeId s0{Polarity::Sin, 0};
  const TemporalModeId c1{Polarity::Cos, 1};
  const TemporalModeId c2{Polarity::Cos, 2};

  const double diag = mode_overlap(c0, c0, kOmegaT);
  CHECK(std::abs(diag - 1.0) < 0.01);
  CHECK(diag == doctest::Approx(simpson_overlap(c0, c0, kOmegaT)).epsilon(1e-9));

  const double cross = mode_overlap(c0, s0, kOmegaT);
  CHECK(std::abs(cross) < 0.01);
  CHECK(cross == doctest::Approx(simpson_overlap(c0, s0, kOmegaT)).epsilon(1e-9));

  const double orders = mode_overlap(c1, c2, kOmegaT);
  CHECK(std::abs(orders) < 0.01);
  CHECK(std::abs(orders - simpson_overlap(c1, c2, kOmegaT)) < 1e-9);
}

TEST_CASE("mode_overlap rejects non-positive Omega*T") {
  CHECK_THROWS_AS(mode_overlap({}, {}, 0.0), std::domain_error);
}

TEST_CASE("Gram matrix of the N = 2 register is within 5/OmegaT of identity") {
  const auto gram = mode_gram(3, kOmegaT);
  REQUIRE(gram.size() == 6);
  for (std::size_t i = 0; i < gram.size(); ++i) {
    for (std::size_t j = 0; j < gram.size(); ++j) {
      CHECK(std::abs(gram[i][j] - (i == j ? 1.0 : 0.0)) <= 5.0 / kOmegaT);
    }
  }
}

TEST_CASE("Gram deviation follows the endpoint term sqrt((4n+2)(4m+2)) / (2 OmegaT)") {
  // Cos n against Sin m with n + m odd picks up the boundary value of the
  // sin-cos product; everything else is O(1/OmegaT^2).
  const auto gram = mode_gram(4, kOmegaT);
  for (int n = 0; n < 4; ++n) {
    for (int m = 0; m < 4; ++m) {
      const double entry = gram[static_cast<std::size_t>(n)][static_cast<std::size_t>(4 + m)];
      const double leading =
          (n + m) % 2 == 1 ? mode_normalization(n) * mode_normalization(m) / (2.0 * kOmegaT) : 0.0;
      CHECK(std::abs(std::abs(entry) - leading) < 50.0 / (kOmegaT * kOmegaT));
    }
  }
  // Orders 2 and 3 exceed 5/OmegaT at this Omega*T.
  CHECK(std::abs(gram[2][7]) > 5.0 / kOmegaT);
}

TEST_CASE("Gram matrix approaches identity at the default Omega*T") {
  const auto gram = mode_gram(4, kDefaultOmegaT);
  for (std::size_t i = 0; i < gram.size(); ++i) {
    for (std::size_t j = 0; j < gram.size(); ++j) {
      CHECK(std::abs(gram[i][j] - (i == j ? 1.0 : 0.0)) < 6.0 / kDefaultOmegaT);
    }
  }
}

TEST_CASE("Envelope construction") {
  CHECK_NOTHROW(Envelope({0.6, 0.8}));
  CHECK_THROWS_AS(Envelope({0.6, 0.7}), std::invalid_argument);
  CHECK_THROWS_AS(Envelope(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(Envelope::normalized({0.0, 0.0}), std::invalid_argument);
  const Envelope e = Envelope::normalized({3.0, 4.0});
  CHECK(e.order() == 1);
  CHECK(e[0] == doctest::Approx(0.6));
  CHECK(e[1] == doctest::Approx(0.8));
  CHECK(e[2] == 0.0);
  CHECK(e[-1] == 0.0);
}

TEST_CASE("sample_envelope examples") {
  const std::vector<double> half{0.5};
  CHECK(sample_envelope(Envelope::flat(), half)[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(sample_envelope(Envelope({0.0, 1.0}), half)[0] == doctest::Approx(0.0));
  const std::vector<double> one{1.0};
  const double c = 1.0 / std::sqrt(2.0);
  CHECK(sample_envelope(Envelope::normalized({1.0, 1.0}), one)[0] ==
        doctest::Approx(c * std::sqrt(2.0) + c * std::sqrt(6.0)));
}

TEST_CASE("unit envelopes carry unit energy once the carrier is averaged") {
  // E^2 integrates to 2; the cos^2 carrier contributes the factor 1/2.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const int intervals = 20000;
  std::vector<double> grid(intervals + 1);
  for (int i = 0; i <= intervals; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / intervals;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> raw(1 + trial % 6);
    for (double& v : raw) v = normal(rng);
    const auto values = sample_envelope(Envelope::normalized(raw), grid);
    double sum = 0.0;
    for (int i = 0; i <= intervals; ++i) {
      const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      sum += w * values[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(i)];
    }
    CHECK(std::abs(0.5 * sum / (3.0 * intervals) - 1.0) < 1e-6);
  }
}

TEST_CASE("unit_grid spans the closed interval") {
  const auto grid = unit_grid(256);
  REQUIRE(grid.size() == 256);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);
}

TEST_CASE("TemporalModeId ordering is polarity first") {
  CHECK(TemporalModeId{Polarity::Cos, 5} < TemporalModeId{Polarity::Sin, 0});
  CHECK(TemporalModeId{Polarity::Cos, 1} < TemporalModeId{Polarity::Cos, 2});
}
