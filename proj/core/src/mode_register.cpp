#include "teleport/mode_register.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "teleport/errors.hpp"

namespace teleport {

Envelope::Envelope(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) {
    throw std::invalid_argument("envelope needs at least one coefficient");
  }
  const double norm2 =
      std::inner_product(coefficients_.begin(), coefficients_.end(), coefficients_.begin(), 0.0);
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-12) {
    throw std::invalid_argument("envelope coefficients must have unit norm, got |c|^2 = " +
                                std::to_string(norm2));
  }
}

Envelope Envelope::normalized(std::vector<double> coefficients) {
  const double norm =
      std::sqrt(std::inner_product(coefficients.begin(), coefficients.end(), coefficients.begin(), 0.0));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite envelope");
  }
  for (double& c : coefficients) c /= norm;
  return Envelope(std::move(coefficients));
}

double shifted_legendre(int n, double u) {
  if (n < 0) throw std::domain_error("Legendre order must be non-negative");
  if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error("shifted Legendre argument outside [0, 1]");
  const double x = 2.0 * u - 1.0;
  if (n == 0) return 1.0;
  double previous = 1.0;
  double current = x;
  for (int k = 1; k < n; ++k) {
    // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
    const double next = ((2.0 * k + 1.0) * x * current - k * previous) / (k + 1.0);
    previous = current;
    current = next;
  }
  return current;
}

double mode_normalization(int n) {
  if (n < 0) throw std::domain_error("mode order must be non-negative");
  return std::sqrt(4.0 * n + 2.0);
}

double mode_profile(TemporalModeId mode, double u, double omega_t) {
  const double phase = omega_t * u;
  const double carrier = mode.polarity == Polarity::Cos ? std::cos(phase) : std::sin(phase);
  return mode_normalization(mode.order) * carrier * shifted_legendre(mode.order, u);
}

double mode_overlap(TemporalModeId a, TemporalModeId b, double omega_t, double tolerance) {
  if (!(omega_t > 0.0)) throw std::domain_error("Omega*T must be positive");
  auto integrand = [&](double u) {
    u = std::clamp(u, 0.0, 1.0);
    return mode_profile(a, u, omega_t) * mode_profile(b, u, omega_t);
  };

  // One panel per half carrier period; recursion only where a panel needs it.
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(omega_t / std::numbers::pi)));
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = static_cast<double>(i) / panels;
    const double hi = static_cast<double>(i + 1) / panels;
    double panel_error = 0.0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, lo, hi, 4, 1e-10, &panel_error);
    error += panel_error;
  }
  if (!(error <= tolerance)) {
    throw NumericError("mode overlap quadrature did not converge", error);
  }
  return total;
}

std::vector<std::vector<double>> mode_gram(int orders, double omega_t) {
  std::vector<TemporalModeId> modes;
  for (Polarity pol : {Polarity::Cos, Polarity::Sin}) {
    for (int n = 0; n < orders; ++n) modes.push_back({pol, n});
  }
  std::vector<std::vector<double>> gram(modes.size(), std::vector<double>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    for (std::size_t j = i; j < modes.size(); ++j) {
      gram[i][j] = gram[j][i] = mode_overlap(modes[i], modes[j], omega_t);
    }
  }
  return gram;
}

std::vector<double> sample_envelope(const Envelope& envelope, std::span<const double> grid) {
  std::vector<double> samples;
  samples.reserve(grid.size());
  for (double u : grid) {
    double value = 0.0;
    for (int n = 0; n <= envelope.order(); ++n) {
      value += envelope[n] * mode_normalization(n) * shifted_legendre(n, u);
    }
    samples.push_back(value);
  }
  return samples;
}

std::vector<double> unit_grid(std::size_t count) {
  if (count < 2) throw std::invalid_argument("unit grid needs at least two points");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = static_cast<double>(i) / (count - 1);
  grid.back() = 1.0;
  return grid;
}

}  // namespace teleport
