#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "teleport/gaussian_core.hpp"
#include "teleport/imperfections.hpp"
#include "teleport/mode_register.hpp"
#include "teleport/protocol.hpp"

namespace teleport {

/// Sigma(c) = c^T A c + 2 b^T c + d: excess noise per quadrature, shot units,
/// as a function of the envelope coefficients.
struct QuadraticForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double d = 0.0;

  double evaluate(const Eigen::VectorXd& c) const { return c.dot(A * c) + 2.0 * b.dot(c) + d; }
};

/// Assembles the excess-noise form for fixed kappa, imperfections and feedback
/// gain. The noise coefficients of the final atomic quadratures are affine in
/// c, so the form is exact; A, b, d average the X and P forms.
QuadraticForm noise_quadratic_form(double kappa, int envelope_order, const ImperfectionConfig& cfg, double gain);

/// Same, reusing an existing measurement stage.
QuadraticForm noise_quadratic_form(const MeasurementStage& stage, const ImperfectionConfig& cfg, double gain);

struct SphereMinimum {
  Eigen::VectorXd c;
  double value = 0.0;
};

/// Global minimizer of c^T A c + 2 b^T c + d over |c| = 1. Eigendecomposition
/// of A plus a safeguarded Newton solve of the secular equation for the
/// Lagrange multiplier; handles the hard case (b orthogonal to the bottom
/// eigenspace). Throws NumericError if the eigensolver or root-finder fails.
SphereMinimum minimize_on_sphere(const QuadraticForm& q);

enum class ObjectiveKind { CoherentUnitGain, CoherentAverage, QubitAverage };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::CoherentUnitGain;
  /// Mean photon number of the input ensemble (CoherentAverage only).
  double nbar = 0.0;

  static Objective unit_gain() { return {ObjectiveKind::CoherentUnitGain, 0.0}; }
  static Objective coherent_average(double nbar) { return {ObjectiveKind::CoherentAverage, nbar}; }
  static Objective qubit() { return {ObjectiveKind::QubitAverage, 0.0}; }
};

std::string_view to_string(ObjectiveKind kind) noexcept;

/// Feedback-gain search. The unit-gain objective ignores it.
struct GainSearch {
  double lower = 0.0;
  double upper = 1.5;
  double tolerance = 1e-4;
  /// Skip the search and use this gain.
  std::optional<double> fixed;
};

struct OptimResult {
  Envelope c_star = Envelope::flat();
  double g_star = 1.0;
  double fidelity = 0.0;
  /// Mean of the X and P excess, shot units.
  double excess = 0.0;
  Objective objective;
  Moments moments;
};

/// Objective value for a fixed envelope and gain via the direct protocol
/// evaluation. Throws RepresentationError for infeasible qubit points.
double objective_value(const Moments& moments, const Objective& objective);

/// Best envelope and gain at one coupling. For the unit-gain objective the
/// feedback gain is fixed so that the signal gain is one; otherwise the gain
/// is searched over [lower, upper] (coarse grid then golden section), each
/// trial solving the envelope problem exactly. `warm_start` narrows the first
/// gain bracket around a previous optimum. Throws InfeasibleError when no gain
/// yields an admissible point.
OptimResult optimize_point(double kappa, int envelope_order, const ImperfectionConfig& cfg,
                           const Objective& objective, const GainSearch& search = {},
                           std::optional<double> warm_start = std::nullopt);

/// True when the closed-form qubit fidelity decreases in sigma^2 on a grid
/// over [g_lower, g_upper] x [0, 1]; the inner/outer split relies on it.
bool qubit_fidelity_decreasing_in_noise(double g_lower, double g_upper);

struct SweepPoint {
  double kappa = 0.0;
  std::optional<OptimResult> result;
  /// Why `result` is empty.
  std::string failure;
};

/// optimize_point over a sorted kappa grid, warm-starting each gain search at
/// the previous optimum. Point failures are recorded, not thrown.
std::vector<SweepPoint> kappa_sweep(std::span<const double> kappas, int envelope_order,
                                    const ImperfectionConfig& cfg, const Objective& objective,
                                    const GainSearch& search = {});

/// lo, lo+step, ..., up to hi inclusive (rounded to the nearest step count).
std::vector<double> kappa_grid(double lo, double hi, double step);

}  // namespace teleport
