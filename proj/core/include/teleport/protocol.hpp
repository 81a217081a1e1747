#pragma once

#include <vector>

#include "teleport/gaussian_core.hpp"
#include "teleport/imperfections.hpp"
#include "teleport/mode_register.hpp"

namespace teleport {

struct ProtocolParams {
  double kappa = 0.0;
  Envelope envelope = Envelope::flat();
  /// Feedback gain g multiplying every measurement outcome.
  double gain = 1.0;
  ImperfectionConfig imperfections;

  /// Light orders carried by the register: 0..N+2 for envelope order N.
  int register_orders() const noexcept { return envelope.order() + 3; }
  void validate() const;
};

/// Homodyne observables after the balanced beam splitter, indexed by order
/// 0..N+1. x_* are measured on the sum port, q_* on the difference port.
struct BellObservables {
  std::vector<QuadExpansion> x_cos;
  std::vector<QuadExpansion> x_sin;
  std::vector<QuadExpansion> q_cos;
  std::vector<QuadExpansion> q_sin;
};

/// Everything up to and including the Bell measurement. Depends on the
/// envelope only through its order, so one stage serves every envelope.
struct MeasurementStage {
  BasisLayout layout;
  /// Atomic quadratures after scattering and decay, before feedback.
  QuadExpansion atomic_x;
  QuadExpansion atomic_p;
  BellObservables bell;
  int envelope_order = 0;
};

MeasurementStage scatter_and_measure(double kappa, int envelope_order, const ImperfectionConfig& cfg);

/// Bell observables (with their layout and the pre-feedback atomic state)
/// for `params`.
MeasurementStage bell_observable_expansions(const ProtocolParams& params);

/// Displacements applied per unit of g c_n: X gets x~_{s,n} - q~_{c,n},
/// P gets -(x~_{c,n} + q~_{s,n}).
QuadExpansion feedback_increment_x(const MeasurementStage& stage, int n);
QuadExpansion feedback_increment_p(const MeasurementStage& stage, int n);

struct FinalState {
  BasisLayout layout;
  DiagonalState state;
  QuadExpansion x_fin;
  QuadExpansion p_fin;
  Moments moments;
};

/// Moves the payload-mode component of the input-pulse slots into the signal
/// gains. The payload mode is y = sum c_n (y_{s,n} + q_{c,n}) / sqrt 2,
/// q = sum c_n (q_{s,n} - y_{c,n}) / sqrt 2.
void extract_payload(QuadExpansion& e, const Envelope& envelope, const BasisLayout& layout);

/// Applies the feedback for `envelope` and `gain` to a measurement stage.
FinalState apply_feedback(const MeasurementStage& stage, const Envelope& envelope, double gain,
                          const ImperfectionConfig& cfg);

/// Final atomic quadratures after scattering, Bell measurement and
/// ensemble-averaged feedback.
FinalState final_atomic_state(const ProtocolParams& params);

/// Closed-form weight f_n of p_{c,n} (and p_{s,n}) in the lossless unit-gain
/// final state, n in [0, N+1], taking c_{N+1} = c_{N+2} = 0.
/// Throws std::domain_error for n outside that range.
double feedback_coefficient_f(int n, const Envelope& envelope, double kappa);

/// 2 / (2 + s/2 + beta + epsilon): unit-gain fidelity once every cancellable
/// noise term is cancelled.
double cancellation_bound_fidelity(double s, double beta, double epsilon);

/// Feedback gain that makes the overall signal gain exactly one.
double unit_signal_gain_feedback(const ImperfectionConfig& cfg) noexcept;

}  // namespace teleport
