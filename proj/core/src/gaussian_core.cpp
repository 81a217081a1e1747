#include "teleport/gaussian_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "teleport/errors.hpp"

namespace teleport {

BasisLayout::BasisLayout(int light_orders) : orders_(light_orders) {
  if (light_orders < 1) throw std::invalid_argument("layout needs at least one light order");
}

std::size_t BasisLayout::light_slot(std::size_t base, TemporalModeId mode, Quadrature q) const {
  if (mode.order < 0 || mode.order >= orders_) {
    throw std::out_of_range("mode order " + std::to_string(mode.order) + " outside register of " +
                            std::to_string(orders_) + " orders");
  }
  const std::size_t pair = static_cast<std::size_t>(mode.polarity) * orders_ + mode.order;
  return base + 2 * pair + static_cast<std::size_t>(q);
}

std::size_t BasisLayout::scattered(TemporalModeId mode, Quadrature q) const {
  return light_slot(2, mode, q);
}

std::size_t BasisLayout::input(TemporalModeId mode, Quadrature q) const {
  return light_slot(2 + 4 * static_cast<std::size_t>(orders_), mode, q);
}

std::size_t BasisLayout::ancilla(std::size_t pair, Quadrature q) const {
  if (pair >= ancillas_) throw std::out_of_range("ancilla pair not allocated");
  return 2 + 8 * static_cast<std::size_t>(orders_) + 2 * pair + static_cast<std::size_t>(q);
}

SlotKind BasisLayout::kind(std::size_t slot) const {
  const auto light = 4 * static_cast<std::size_t>(orders_);
  if (slot < 2) return SlotKind::Atomic;
  if (slot < 2 + light) return SlotKind::Scattered;
  if (slot < 2 + 2 * light) return SlotKind::Input;
  if (slot < size()) return SlotKind::Ancilla;
  throw std::out_of_range("slot outside layout");
}

QuadExpansion QuadExpansion::zero(const BasisLayout& layout) {
  return QuadExpansion{Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()))};
}

QuadExpansion QuadExpansion::unit(const BasisLayout& layout, std::size_t slot) {
  if (slot >= layout.size()) throw StructuralError("unit expansion slot outside layout");
  QuadExpansion e = zero(layout);
  e.coeffs[static_cast<Eigen::Index>(slot)] = 1.0;
  return e;
}

void QuadExpansion::resize(std::size_t size) {
  const auto old = coeffs.size();
  const auto target = static_cast<Eigen::Index>(size);
  if (target <= old) return;
  coeffs.conservativeResize(target);
  coeffs.tail(target - old).setZero();
}

QuadExpansion& QuadExpansion::add_scaled(const QuadExpansion& other, double scale) {
  resize(static_cast<std::size_t>(other.coeffs.size()));
  coeffs.head(other.coeffs.size()) += scale * other.coeffs;
  signal_gain_y += scale * other.signal_gain_y;
  signal_gain_q += scale * other.signal_gain_q;
  return *this;
}

QuadExpansion& QuadExpansion::operator+=(const QuadExpansion& other) { return add_scaled(other, 1.0); }
QuadExpansion& QuadExpansion::operator-=(const QuadExpansion& other) { return add_scaled(other, -1.0); }

QuadExpansion& QuadExpansion::operator*=(double scale) {
  coeffs *= scale;
  signal_gain_y *= scale;
  signal_gain_q *= scale;
  return *this;
}

QuadExpansion operator+(QuadExpansion a, const QuadExpansion& b) { return a += b; }
QuadExpansion operator-(QuadExpansion a, const QuadExpansion& b) { return a -= b; }
QuadExpansion operator*(double scale, QuadExpansion a) { return a *= scale; }

DiagonalState DiagonalState::vacuum(const BasisLayout& layout) {
  return DiagonalState(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(layout.size()), 0.5));
}

void DiagonalState::set_mode(std::size_t x_slot, double var_x, double var_p) {
  if (x_slot % 2 != 0 || x_slot + 1 >= size()) throw StructuralError("not an x slot of this state");
  if (!(var_x > 0.0) || !(var_p > 0.0)) throw std::domain_error("variances must be positive");
  if (var_x * var_p < 0.25 * (1.0 - 1e-12)) {
    throw std::domain_error("mode variances violate the uncertainty relation");
  }
  variances_[static_cast<Eigen::Index>(x_slot)] = var_x;
  variances_[static_cast<Eigen::Index>(x_slot + 1)] = var_p;
}

double variance_of(const QuadExpansion& e, const DiagonalState& state) {
  const auto n = e.coeffs.size();
  if (static_cast<std::size_t>(n) > state.size()) {
    throw StructuralError("expansion has " + std::to_string(n) + " slots, state only " +
                          std::to_string(state.size()));
  }
  return e.coeffs.cwiseAbs2().dot(state.variances().head(n));
}

double symplectic_defect(const Eigen::MatrixXd& map) {
  if (map.rows() != map.cols()) throw StructuralError("symplectic check needs a square map");
  if (map.rows() % 2 != 0) throw StructuralError("symplectic check needs (x, p) pairs");
  const Eigen::Index n = map.rows();
  Eigen::MatrixXd form = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; i += 2) {
    form(i, i + 1) = 1.0;
    form(i + 1, i) = -1.0;
  }
  return (map * form * map.transpose() - form).cwiseAbs().maxCoeff();
}

double symplectic_defect(const Eigen::MatrixXd& map, const BasisLayout& layout) {
  if (static_cast<std::size_t>(map.rows()) != layout.scattering_size()) {
    throw StructuralError("map dimension does not match the layout's scattering register");
  }
  return symplectic_defect(map);
}

namespace {

double quadrature_fidelity_factor(double gain, double excess, double shot_mean) {
  const double output_variance = gain * gain + excess;
  const double offset = (1.0 - gain) * shot_mean;
  return std::exp(-0.5 * offset * offset / (1.0 + output_variance)) / std::sqrt(1.0 + output_variance);
}

}  // namespace

double gaussian_coherent_fidelity(const Moments& m, std::complex<double> amplitude) {
  if (m.excess_x < 0.0 || m.excess_p < 0.0) throw std::domain_error("excess noise must be non-negative");
  return 2.0 * quadrature_fidelity_factor(m.gain_x, m.excess_x, 2.0 * amplitude.real()) *
         quadrature_fidelity_factor(m.gain_p, m.excess_p, 2.0 * amplitude.imag());
}

double gaussian_coherent_fidelity(double gain, double excess_x, double excess_p,
                                  std::complex<double> amplitude) {
  return gaussian_coherent_fidelity(Moments{gain, gain, excess_x, excess_p}, amplitude);
}

}  // namespace teleport
