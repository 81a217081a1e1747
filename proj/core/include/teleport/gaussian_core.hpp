#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

#include "teleport/mode_register.hpp"

namespace teleport {

enum class Quadrature : std::uint8_t { X = 0, P = 1 };

enum class SlotKind : std::uint8_t { Atomic, Scattered, Input, Ancilla };

/// Register of initial-time canonical operators in Heisenberg-picture
/// expansions. Every mode occupies two adjacent slots (x then p):
///
///   [atomic] [scattered cos 0..M-1] [scattered sin 0..M-1]
///   [input cos 0..M-1] [input sin 0..M-1] [ancilla 0..]
///
/// "Scattered" modes are the y-polarized light copropagating with the pump;
/// "input" modes are the temporal modes of the pulse carrying the state to
/// be teleported. Ancilla pairs are vacuum modes that enter through losses and
/// are appended on demand.
class BasisLayout {
 public:
  explicit BasisLayout(int light_orders);

  int light_orders() const noexcept { return orders_; }
  std::size_t size() const noexcept { return 2 * mode_count(); }
  std::size_t mode_count() const noexcept { return 1 + 4 * static_cast<std::size_t>(orders_) + ancillas_; }
  std::size_t ancilla_pairs() const noexcept { return ancillas_; }

  /// Slots touched by the scattering interaction (atomic + scattered light).
  std::size_t scattering_size() const noexcept { return 2 + 4 * static_cast<std::size_t>(orders_); }

  std::size_t atomic(Quadrature q) const noexcept { return static_cast<std::size_t>(q); }
  std::size_t scattered(TemporalModeId mode, Quadrature q) const;
  std::size_t input(TemporalModeId mode, Quadrature q) const;
  std::size_t ancilla(std::size_t pair, Quadrature q) const;

  /// Appends a vacuum ancilla mode and returns its pair index.
  std::size_t add_ancilla_pair() noexcept { return ancillas_++; }

  SlotKind kind(std::size_t slot) const;
  static Quadrature quadrature(std::size_t slot) noexcept {
    return slot % 2 == 0 ? Quadrature::X : Quadrature::P;
  }

 private:
  std::size_t light_slot(std::size_t base, TemporalModeId mode, Quadrature q) const;

  int orders_;
  std::size_t ancillas_ = 0;
};

/// Linear expansion of a Heisenberg-picture quadrature over the noise slots
/// of a layout, plus the gains on the payload mode (y, q) once it has been
/// projected out. Vectors shorter than the layout are implicitly zero-padded.
struct QuadExpansion {
  Eigen::VectorXd coeffs;
  double signal_gain_y = 0.0;
  double signal_gain_q = 0.0;

  static QuadExpansion zero(const BasisLayout& layout);
  static QuadExpansion unit(const BasisLayout& layout, std::size_t slot);

  double coefficient(std::size_t slot) const noexcept {
    return slot < static_cast<std::size_t>(coeffs.size()) ? coeffs[static_cast<Eigen::Index>(slot)] : 0.0;
  }
  void resize(std::size_t size);

  QuadExpansion& operator+=(const QuadExpansion& other);
  QuadExpansion& operator-=(const QuadExpansion& other);
  QuadExpansion& operator*=(double scale);
  /// this += scale * other
  QuadExpansion& add_scaled(const QuadExpansion& other, double scale);
};

QuadExpansion operator+(QuadExpansion a, const QuadExpansion& b);
QuadExpansion operator-(QuadExpansion a, const QuadExpansion& b);
QuadExpansion operator*(double scale, QuadExpansion a);

/// Product initial state: independent per-slot variances in canonical units
/// (vacuum = 1/2).
class DiagonalState {
 public:
  static DiagonalState vacuum(const BasisLayout& layout);

  /// Throws std::domain_error on non-positive variances or on V_x V_p < 1/4.
  void set_mode(std::size_t x_slot, double var_x, double var_p);

  std::size_t size() const noexcept { return static_cast<std::size_t>(variances_.size()); }
  double variance(std::size_t slot) const { return variances_[static_cast<Eigen::Index>(slot)]; }
  const Eigen::VectorXd& variances() const noexcept { return variances_; }

 private:
  explicit DiagonalState(Eigen::VectorXd variances) : variances_(std::move(variances)) {}
  Eigen::VectorXd variances_;
};

/// Signal gains and excess variances of the final atomic quadratures, shot
/// units (vacuum = 1).
struct Moments {
  double gain_x = 0.0;
  double gain_p = 0.0;
  double excess_x = 0.0;
  double excess_p = 0.0;
};

/// Sum_i coeffs_i^2 V_i, canonical units. Throws StructuralError when the
/// expansion addresses slots the state does not have.
double variance_of(const QuadExpansion& e, const DiagonalState& state);

/// Canonical variance (vacuum 1/2) to shot-noise units (vacuum 1).
constexpr double to_shot_units(double canonical_variance) noexcept { return 2.0 * canonical_variance; }

/// Max-abs entry of S J S^T - J for J = diag([[0,1],[-1,0]], ...).
/// Throws StructuralError for non-square or odd-dimensional input.
double symplectic_defect(const Eigen::MatrixXd& map);

/// Same, after checking that the map spans the layout's scattering slots.
double symplectic_defect(const Eigen::MatrixXd& map, const BasisLayout& layout);

/// Overlap <a| rho_out |a> of a coherent state with the Gaussian output whose
/// quadrature means are gain times those of |a> and whose variances are
/// gain^2 + excess (shot units). Coherent amplitude a has canonical means
/// sqrt(2) (Re a, Im a), i.e. 2 (Re a, Im a) in shot units.
/// Throws std::domain_error on negative excess.
double gaussian_coherent_fidelity(double gain, double excess_x, double excess_p,
                                  std::complex<double> amplitude);

/// Per-quadrature gains taken from `moments`.
double gaussian_coherent_fidelity(const Moments& moments, std::complex<double> amplitude);

}  // namespace teleport
