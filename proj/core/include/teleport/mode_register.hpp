#pragma once

#include <compare>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace teleport {

/// Larmor carrier of a temporal scattering mode.
enum class Polarity : std::uint8_t { Cos = 0, Sin = 1 };

/// Label of a temporal scattering mode: carrier polarity and Legendre order.
/// Ordering is (polarity, order) and is used for every register index.
struct TemporalModeId {
  Polarity polarity = Polarity::Cos;
  int order = 0;

  friend auto operator<=>(const TemporalModeId&, const TemporalModeId&) = default;
};

/// Omega*T for a ~100 kHz Larmor frequency and a ~5 ms pulse.
inline constexpr double kDefaultOmegaT = 2.0 * std::numbers::pi * 100e3 * 5e-3;

/// Slowly varying envelope of the input pulse expressed in shifted Legendre
/// modes. Coefficients are real and of unit Euclidean norm.
class Envelope {
 public:
  /// Throws std::invalid_argument unless |c| = 1 within 1e-12.
  explicit Envelope(std::vector<double> coefficients);

  /// Rescales arbitrary nonzero coefficients to unit norm.
  static Envelope normalized(std::vector<double> coefficients);

  /// The single flat mode c = (1).
  static Envelope flat() { return Envelope({1.0}); }

  int order() const noexcept { return static_cast<int>(coefficients_.size()) - 1; }

  /// c_n, or 0 for n beyond the envelope order.
  double operator[](int n) const noexcept {
    return n >= 0 && n <= order() ? coefficients_[static_cast<std::size_t>(n)] : 0.0;
  }

  std::span<const double> coefficients() const noexcept { return coefficients_; }

 private:
  std::vector<double> coefficients_;
};

/// P_n(2u - 1) by the three-term recurrence. Throws std::domain_error for
/// u outside [0, 1] or n < 0.
double shifted_legendre(int n, double u);

/// sqrt(4n + 2); makes each temporal mode canonically normalized.
double mode_normalization(int n);

/// Defining envelope of a mode at normalized time u: normalization times
/// carrier times shifted Legendre polynomial.
double mode_profile(TemporalModeId mode, double u, double omega_t);

/// Gram entry of two temporal modes, integral over u in [0, 1] of the product
/// of their profiles. Adaptive Gauss-Kronrod; throws NumericError when the
/// error estimate stays above `tolerance`.
double mode_overlap(TemporalModeId a, TemporalModeId b, double omega_t,
                    double tolerance = 1e-9);

/// Gram matrix of the first `orders` cos modes followed by the first
/// `orders` sin modes.
std::vector<std::vector<double>> mode_gram(int orders, double omega_t);

/// E(u) = sum_n c_n sqrt(4n+2) P_n(2u-1) at each grid point.
std::vector<double> sample_envelope(const Envelope& envelope, std::span<const double> grid);

/// `count` equally spaced points covering [0, 1] inclusive.
std::vector<double> unit_grid(std::size_t count);

}  // namespace teleport
