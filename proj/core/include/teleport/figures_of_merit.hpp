#pragma once

#include <array>
#include <complex>

#include "teleport/gaussian_core.hpp"

namespace teleport {

/// Unit-gain coherent-state fidelity 2 / sqrt((2+excess_x)(2+excess_p)).
/// For gains other than one the fidelity depends on the amplitude and is
/// evaluated at `amplitude`.
double coherent_fidelity(const Moments& moments, std::complex<double> amplitude = {});

/// Coherent-state fidelity averaged over amplitudes drawn from the isotropic
/// Gaussian P(a) = exp(-|a|^2 / nbar) / (pi nbar). Closed form.
double average_coherent_fidelity(const Moments& moments, double nbar);

/// Coherent-state channel rho -> (1/(2 pi sigma2)) int d^2b
/// exp(-|b - g a|^2 / (2 sigma2)) |b><b|.
struct QubitChannelParams {
  double gain = 1.0;
  double sigma2 = 0.0;
};

/// sigma2 = (gain_x^2 + excess_x - 1) / 4 with vacuum-variance payload, shot
/// units. Throws RepresentationError when negative.
double qubit_sigma2(const Moments& moments);

/// Channel parameters for `moments`; throws RepresentationError as above.
QubitChannelParams qubit_channel(const Moments& moments);

/// Bloch-sphere average of <psi|E(|psi><psi|)|psi> for
/// |psi> = cos(t/2)|0> + e^{i phi} sin(t/2)|1>, in closed form.
double qubit_average_fidelity(const QubitChannelParams& p);

/// Matrix elements <k| E(|n><m|) |l> for k, l, n, m in {0, 1}; index with
/// `at(k, l, n, m)`.
struct FockBlock {
  std::array<std::complex<double>, 16> elements{};

  std::complex<double>& at(int k, int l, int n, int m) { return elements[static_cast<std::size_t>(8 * k + 4 * l + 2 * n + m)]; }
  const std::complex<double>& at(int k, int l, int n, int m) const {
    return elements[static_cast<std::size_t>(8 * k + 4 * l + 2 * n + m)];
  }
};

/// <k| E(|a><a|) |l> multiplied by exp(|a|^2), from the Gaussian integral
/// over the channel's coherent-state mixture.
std::complex<double> weighted_coherent_image(const QubitChannelParams& p, int k, int l, std::complex<double> a);

/// Fock block from |n><m| = d^n/da^n d^m/da*^m (e^{|a|^2} |a><a|) at a = 0,
/// derivatives taken analytically.
FockBlock qubit_channel_block(const QubitChannelParams& p);

/// Same block with Wirtinger derivatives taken by central differences of step
/// `h` and Richardson-checked against h/2. Throws NumericError when the two
/// estimates differ by more than `tolerance`.
FockBlock qubit_channel_block_finite_difference(const QubitChannelParams& p, double h = 1e-3,
                                                double tolerance = 1e-6);

/// <psi|E(|psi><psi|)|psi> for a pure qubit state given by Bloch angles.
double qubit_state_fidelity(const FockBlock& block, double theta, double phi);

enum class OracleDerivatives { Analytic, FiniteDifference };

struct BlochGrid {
  int azimuthal = 32;
  int polar = 16;
};

/// Bloch-sphere average by Gauss-Legendre quadrature in (phi, cos theta) of
/// the per-state fidelity built from the Fock block. Independent of the
/// closed form in qubit_average_fidelity. Throws std::domain_error for
/// negative sigma2.
double qubit_fidelity_oracle(const QubitChannelParams& p, BlochGrid grid = {},
                             OracleDerivatives derivatives = OracleDerivatives::Analytic);

}  // namespace teleport
