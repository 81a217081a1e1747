#include "teleport/figures_of_merit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "teleport/errors.hpp"

namespace teleport {

double coherent_fidelity(const Moments& moments, std::complex<double> amplitude) {
  return gaussian_coherent_fidelity(moments, amplitude);
}

double average_coherent_fidelity(const Moments& m, double nbar) {
  if (!(nbar >= 0.0)) throw std::domain_error("mean photon number must be >= 0");
  if (m.excess_x < 0.0 || m.excess_p < 0.0) throw std::domain_error("excess noise must be non-negative");
  // Amplitude mismatch (1-g) 2 Re a is Gaussian with variance 2 (1-g)^2 nbar
  // in shot units; it adds to the overlap width of each quadrature.
  const auto width = [nbar](double gain, double excess) {
    return 1.0 + gain * gain + excess + 2.0 * (1.0 - gain) * (1.0 - gain) * nbar;
  };
  return 2.0 / std::sqrt(width(m.gain_x, m.excess_x) * width(m.gain_p, m.excess_p));
}

double qubit_sigma2(const Moments& m) {
  const double sigma2 = (m.gain_x * m.gain_x + m.excess_x - 1.0) / 4.0;
  if (sigma2 < 0.0) {
    throw RepresentationError("channel has no coherent-state mixture form: sigma^2 = " + std::to_string(sigma2));
  }
  return sigma2;
}

QubitChannelParams qubit_channel(const Moments& m) { return {m.gain_x, qubit_sigma2(m)}; }

double qubit_average_fidelity(const QubitChannelParams& p) {
  const double g = p.gain;
  const double s = p.sigma2;
  const double numerator = 3.0 + 2.0 * g + g * g + 2.0 * (9.0 + 2.0 * g - 3.0 * g * g) * s + 24.0 * s * s;
  const double denominator = 6.0 * std::pow(1.0 + 2.0 * s, 3);
  return numerator / denominator;
}

namespace {

// Nodes and weights of a symmetric Jacobi matrix (Golub-Welsch).
std::pair<std::vector<double>, std::vector<double>> golub_welsch(const Eigen::VectorXd& off_diagonal,
                                                                 double total_weight) {
  const Eigen::Index n = off_diagonal.size() + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) jacobi(i, i + 1) = jacobi(i + 1, i) = off_diagonal[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  std::vector<double> nodes(static_cast<std::size_t>(n));
  std::vector<double> weights(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    const double v0 = solver.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = total_weight * v0 * v0;
  }
  return {nodes, weights};
}

// Gauss-Legendre on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  Eigen::VectorXd beta(n - 1);
  for (int k = 1; k < n; ++k) beta[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(beta, 2.0);
}

// Gauss-Hermite for weight exp(-x^2).
std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  Eigen::VectorXd beta(n - 1);
  for (int k = 1; k < n; ++k) beta[k - 1] = std::sqrt(k / 2.0);
  return golub_welsch(beta, std::sqrt(std::numbers::pi));
}

void require_channel(const QubitChannelParams& p) {
  if (!(p.sigma2 >= 0.0) || !std::isfinite(p.sigma2)) throw std::domain_error("sigma^2 must be >= 0");
}

}  // namespace

std::complex<double> weighted_coherent_image(const QubitChannelParams& p, int k, int l, std::complex<double> a) {
  require_channel(p);
  // e^{-|b|^2} b^k conj(b)^l = <k|b><b|l> for k, l in {0, 1}.
  const auto projected = [k, l](std::complex<double> b) {
    std::complex<double> v = std::exp(-std::norm(b));
    if (k == 1) v *= b;
    if (l == 1) v *= std::conj(b);
    return v;
  };
  const std::complex<double> centre = p.gain * a;
  if (p.sigma2 == 0.0) return std::exp(std::norm(a)) * projected(centre);

  // b = g a + sqrt(2 sigma2) z with z distributed as exp(-|z|^2) / pi.
  static const auto rule = gauss_hermite(48);
  const auto& [nodes, weights] = rule;
  const double spread = std::sqrt(2.0 * p.sigma2);
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      sum += weights[i] * weights[j] * projected(centre + spread * std::complex<double>(nodes[i], nodes[j]));
    }
  }
  return std::exp(std::norm(a)) * sum / std::numbers::pi;
}

FockBlock qubit_channel_block(const QubitChannelParams& p) {
  require_channel(p);
  // e^{|a|^2} <k|E(|a><a|)|l> = t e^{lambda a a*} m_kl(a, a*) with
  // m_00 = 1, m_10 = gamma a, m_01 = gamma a*, m_11 = gamma^2 a a* + r.
  const double t = 1.0 / (1.0 + 2.0 * p.sigma2);
  const double r = 2.0 * p.sigma2 * t;
  const double gamma = p.gain * t;
  const double lambda = 1.0 - p.gain * p.gain * t;

  FockBlock block;
  block.at(0, 0, 0, 0) = t;
  block.at(1, 1, 0, 0) = t * r;
  block.at(1, 0, 1, 0) = t * gamma;
  block.at(0, 1, 0, 1) = t * gamma;
  block.at(0, 0, 1, 1) = t * lambda;
  block.at(1, 1, 1, 1) = t * (lambda * r + gamma * gamma);
  return block;
}

namespace {

FockBlock finite_difference_block(const QubitChannelParams& p, double h) {
  FockBlock block;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      const auto f = [&](double x, double y) { return weighted_coherent_image(p, k, l, {x, y}); };
      const auto f0 = f(0.0, 0.0);
      const auto dx = (f(h, 0.0) - f(-h, 0.0)) / (2.0 * h);
      const auto dy = (f(0.0, h) - f(0.0, -h)) / (2.0 * h);
      const auto laplacian = (f(h, 0.0) + f(-h, 0.0) + f(0.0, h) + f(0.0, -h) - 4.0 * f0) / (h * h);
      const std::complex<double> i(0.0, 1.0);
      block.at(k, l, 0, 0) = f0;
      block.at(k, l, 1, 0) = 0.5 * (dx - i * dy);  // d/da
      block.at(k, l, 0, 1) = 0.5 * (dx + i * dy);  // d/da*
      block.at(k, l, 1, 1) = 0.25 * laplacian;
    }
  }
  return block;
}

}  // namespace

FockBlock qubit_channel_block_finite_difference(const QubitChannelParams& p, double h, double tolerance) {
  require_channel(p);
  const FockBlock coarse = finite_difference_block(p, h);
  const FockBlock fine = finite_difference_block(p, 0.5 * h);
  double residual = 0.0;
  for (std::size_t i = 0; i < fine.elements.size(); ++i) {
    residual = std::max(residual, std::abs(fine.elements[i] - coarse.elements[i]));
  }
  if (residual > tolerance) {
    throw NumericError("finite-difference Fock block unstable", residual);
  }
  return fine;
}

double qubit_state_fidelity(const FockBlock& block, double theta, double phi) {
  const std::array<std::complex<double>, 2> psi{std::cos(0.5 * theta),
                                                std::polar(std::sin(0.5 * theta), phi)};
  std::complex<double> total = 0.0;
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 2; ++l) {
      for (int n = 0; n < 2; ++n) {
        for (int m = 0; m < 2; ++m) {
          total += std::conj(psi[k]) * psi[n] * std::conj(psi[m]) * psi[l] * block.at(k, l, n, m);
        }
      }
    }
  }
  return total.real();
}

double qubit_fidelity_oracle(const QubitChannelParams& p, BlochGrid grid, OracleDerivatives derivatives) {
  require_channel(p);
  if (grid.azimuthal < 2 || grid.polar < 2) throw std::invalid_argument("Bloch grid too coarse");
  const FockBlock block = derivatives == OracleDerivatives::Analytic ? qubit_channel_block(p)
                                                                     : qubit_channel_block_finite_difference(p);
  const auto [phi_nodes, phi_weights] = gauss_legendre(grid.azimuthal);
  const auto [mu_nodes, mu_weights] = gauss_legendre(grid.polar);
  double total = 0.0;
  for (std::size_t i = 0; i < phi_nodes.size(); ++i) {
    const double phi = std::numbers::pi * (phi_nodes[i] + 1.0);
    for (std::size_t j = 0; j < mu_nodes.size(); ++j) {
      const double theta = std::acos(mu_nodes[j]);
      total += std::numbers::pi * phi_weights[i] * mu_weights[j] * qubit_state_fidelity(block, theta, phi);
    }
  }
  return total / (4.0 * std::numbers::pi);
}

}  // namespace teleport
