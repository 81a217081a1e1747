#include "teleport/scattering.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace teleport {

double alpha_coupling(int n) {
  if (n < 1) throw std::domain_error("alpha coupling is defined for n >= 1");
  return 1.0 / std::sqrt(4.0 * n * n - 1.0);
}

ScatteringMap build_scattering_map(double kappa, int orders) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::domain_error("kappa must be finite and >= 0");
  if (orders < 2) throw std::invalid_argument("scattering map needs at least two light orders");

  const BasisLayout layout(orders);
  const auto dim = static_cast<Eigen::Index>(layout.scattering_size());
  ScatteringMap map{Eigen::MatrixXd::Identity(dim, dim), kappa, orders};
  auto& m = map.matrix;

  const double linear = kappa / std::numbers::sqrt2;
  const double backaction = 0.25 * kappa * kappa;
  const auto at = [&](std::size_t row, std::size_t col) -> double& {
    return m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  };
  const auto xa = layout.atomic(Quadrature::X);
  const auto pa = layout.atomic(Quadrature::P);
  const auto x = [&](Polarity pol, int n) { return layout.scattered({pol, n}, Quadrature::X); };
  const auto p = [&](Polarity pol, int n) { return layout.scattered({pol, n}, Quadrature::P); };
  constexpr auto cos = Polarity::Cos;
  constexpr auto sin = Polarity::Sin;

  at(xa, p(cos, 0)) += linear;
  at(pa, p(sin, 0)) += linear;

  at(x(cos, 0), pa) += linear;
  at(x(cos, 0), p(sin, 0)) += backaction;
  at(x(cos, 0), p(sin, 1)) -= backaction * alpha_coupling(1);

  at(x(sin, 0), xa) -= linear;
  at(x(sin, 0), p(cos, 0)) -= backaction;
  at(x(sin, 0), p(cos, 1)) += backaction * alpha_coupling(1);

  for (int n = 1; n < orders; ++n) {
    at(x(cos, n), p(sin, n - 1)) += backaction * alpha_coupling(n);
    at(x(sin, n), p(cos, n - 1)) -= backaction * alpha_coupling(n);
    if (n + 1 < orders) {
      at(x(cos, n), p(sin, n + 1)) -= backaction * alpha_coupling(n + 1);
      at(x(sin, n), p(cos, n + 1)) += backaction * alpha_coupling(n + 1);
    }
  }
  return map;
}

QuadExpansion ScatteringMap::output(const BasisLayout& layout, std::size_t slot) const {
  if (layout.light_orders() != orders) throw std::invalid_argument("layout and map disagree on orders");
  QuadExpansion e = QuadExpansion::zero(layout);
  e.coeffs.head(matrix.cols()) = matrix.row(static_cast<Eigen::Index>(slot)).transpose();
  return e;
}

double atomic_output_variance(double kappa) {
  if (!(kappa >= 0.0)) throw std::domain_error("kappa must be >= 0");
  return 1.0 + 0.5 * kappa * kappa;
}

Eigen::MatrixXd restrict_to_orders(const ScatteringMap& map, int max_order) {
  if (max_order < 0 || max_order >= map.orders) throw std::out_of_range("max_order outside register");
  const BasisLayout layout(map.orders);
  std::vector<Eigen::Index> keep{0, 1};
  for (Polarity pol : {Polarity::Cos, Polarity::Sin}) {
    for (int n = 0; n <= max_order; ++n) {
      keep.push_back(static_cast<Eigen::Index>(layout.scattered({pol, n}, Quadrature::X)));
      keep.push_back(static_cast<Eigen::Index>(layout.scattered({pol, n}, Quadrature::P)));
    }
  }
  return map.matrix(keep, keep);
}

}  // namespace teleport
