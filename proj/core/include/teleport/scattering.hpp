#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "teleport/gaussian_core.hpp"

namespace teleport {

/// 1 / sqrt(4n^2 - 1): coupling between neighbouring Legendre orders induced
/// by the light's back-action on itself. Defined for n >= 1.
double alpha_coupling(int n);

/// Input-output relation of one pass of the pulse through the atomic sample,
/// as a real matrix over the layout's scattering slots (atomic pair followed by
/// the scattered cos and sin modes of orders 0..M-1). Row i expresses the
/// output operator of slot i in terms of the input operators.
struct ScatteringMap {
  Eigen::MatrixXd matrix;
  double kappa = 0.0;
  int orders = 0;

  /// Output operator of `slot` as an expansion over `layout`.
  QuadExpansion output(const BasisLayout& layout, std::size_t slot) const;
};

/// Builds the map for coupling `kappa` on `orders` Legendre orders. All p
/// quadratures pass unchanged; the x quadratures pick up the atomic coupling
/// (order 0, linear in kappa) and the nearest-neighbour back-action terms
/// (quadratic in kappa). The top order keeps only its downward coupling.
ScatteringMap build_scattering_map(double kappa, int orders);

/// Variance of either atomic quadrature after scattering with vacuum inputs,
/// shot units.
double atomic_output_variance(double kappa);

/// Submatrix over the atomic pair and light orders 0..max_order.
Eigen::MatrixXd restrict_to_orders(const ScatteringMap& map, int max_order);

}  // namespace teleport
