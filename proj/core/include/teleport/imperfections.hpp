#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>

#include "teleport/gaussian_core.hpp"

namespace teleport {

/// Where passive light loss acts relative to the Bell-measurement beam
/// splitter.
enum class LossPlacement {
  /// On the scattered light before interference; the payload pulse is lossless.
  ScatteredOnly,
  /// On both beam-splitter output ports (propagation after interference plus
  /// detector inefficiency).
  Detection,
  /// Independently on the scattered light and on the payload pulse before
  /// interference.
  Both,
};

enum class LossStage { ScatteredLight, InputPulse, BeamSplitterOutput };

/// True when `placement` applies light loss at `stage`.
bool loss_acts_at(LossPlacement placement, LossStage stage) noexcept;

std::string_view to_string(LossPlacement placement) noexcept;
std::optional<LossPlacement> parse_loss_placement(std::string_view text) noexcept;

struct ImperfectionConfig {
  /// Squeezed x variance of the scattered light, shot units; 1 is vacuum.
  double s = 1.0;
  /// Fraction of transverse atomic spin replaced by vacuum.
  double beta = 0.0;
  /// Power-loss fraction of every light mode of interest.
  double epsilon = 0.0;
  LossPlacement loss_placement = LossPlacement::ScatteredOnly;

  /// Throws std::invalid_argument outside s in (0,1], beta, epsilon in [0,1).
  void validate() const;
};

/// Amplitude transmission of the payload through the light-loss channel.
double signal_transmission(const ImperfectionConfig& cfg) noexcept;

/// Product initial state for `layout`: vacuum atoms, pure squeezed scattered
/// light (x variance s/2, p variance 1/(2s), canonical), vacuum payload modes
/// and ancillas. Call after every ancilla has been allocated.
DiagonalState initial_state(const ImperfectionConfig& cfg, const BasisLayout& layout);

/// x -> sqrt(1-beta) x + sqrt(beta) f_X, and likewise for p, with a fresh
/// vacuum ancilla pair (f_X, f_P). No ancilla is allocated for beta = 0.
std::pair<QuadExpansion, QuadExpansion> apply_atomic_decay(QuadExpansion x, QuadExpansion p, double beta,
                                                           BasisLayout& layout);

/// Both quadratures of one optical mode.
struct OpticalMode {
  QuadExpansion x;
  QuadExpansion p;
};

/// Beam-splitter loss on each mode: x, p -> sqrt(1-epsilon) (x, p) +
/// sqrt(epsilon) (vacuum ancilla pair), one ancilla pair per mode. Signal gains
/// scale with the mode. No-op for epsilon = 0.
void apply_light_loss(std::span<OpticalMode> modes, double epsilon, BasisLayout& layout);

}  // namespace teleport
