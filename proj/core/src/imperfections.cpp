#include "teleport/imperfections.hpp"

#include <cmath>
#include <stdexcept>

namespace teleport {

bool loss_acts_at(LossPlacement placement, LossStage stage) noexcept {
  switch (placement) {
    case LossPlacement::ScatteredOnly:
      return stage == LossStage::ScatteredLight;
    case LossPlacement::Detection:
      return stage == LossStage::BeamSplitterOutput;
    case LossPlacement::Both:
      return stage == LossStage::ScatteredLight || stage == LossStage::InputPulse;
  }
  return false;
}

std::string_view to_string(LossPlacement placement) noexcept {
  switch (placement) {
    case LossPlacement::ScatteredOnly:
      return "scattered";
    case LossPlacement::Detection:
      return "detection";
    case LossPlacement::Both:
      return "both";
  }
  return "?";
}

std::optional<LossPlacement> parse_loss_placement(std::string_view text) noexcept {
  if (text == "scattered") return LossPlacement::ScatteredOnly;
  if (text == "detection") return LossPlacement::Detection;
  if (text == "both") return LossPlacement::Both;
  return std::nullopt;
}

void ImperfectionConfig::validate() const {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("squeezed variance s must lie in (0, 1]");
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("atomic decay beta must lie in [0, 1)");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("light loss epsilon must lie in [0, 1)");
}

double signal_transmission(const ImperfectionConfig& cfg) noexcept {
  const bool payload_lossy = loss_acts_at(cfg.loss_placement, LossStage::InputPulse) ||
                             loss_acts_at(cfg.loss_placement, LossStage::BeamSplitterOutput);
  return payload_lossy ? std::sqrt(1.0 - cfg.epsilon) : 1.0;
}

DiagonalState initial_state(const ImperfectionConfig& cfg, const BasisLayout& layout) {
  cfg.validate();
  DiagonalState state = DiagonalState::vacuum(layout);
  for (Polarity pol : {Polarity::Cos, Polarity::Sin}) {
    for (int n = 0; n < layout.light_orders(); ++n) {
      state.set_mode(layout.scattered({pol, n}, Quadrature::X), 0.5 * cfg.s, 0.5 / cfg.s);
    }
  }
  return state;
}

std::pair<QuadExpansion, QuadExpansion> apply_atomic_decay(QuadExpansion x, QuadExpansion p, double beta,
                                                           BasisLayout& layout) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::domain_error("beta must lie in [0, 1]");
  if (beta == 0.0) return {std::move(x), std::move(p)};
  const auto pair = layout.add_ancilla_pair();
  const double keep = std::sqrt(1.0 - beta);
  const double admix = std::sqrt(beta);
  x *= keep;
  p *= keep;
  x.add_scaled(QuadExpansion::unit(layout, layout.ancilla(pair, Quadrature::X)), admix);
  p.add_scaled(QuadExpansion::unit(layout, layout.ancilla(pair, Quadrature::P)), admix);
  return {std::move(x), std::move(p)};
}

void apply_light_loss(std::span<OpticalMode> modes, double epsilon, BasisLayout& layout) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::domain_error("epsilon must lie in [0, 1]");
  if (epsilon == 0.0) return;
  const double keep = std::sqrt(1.0 - epsilon);
  const double admix = std::sqrt(epsilon);
  for (OpticalMode& mode : modes) {
    const auto pair = layout.add_ancilla_pair();
    mode.x *= keep;
    mode.p *= keep;
    mode.x.add_scaled(QuadExpansion::unit(layout, layout.ancilla(pair, Quadrature::X)), admix);
    mode.p.add_scaled(QuadExpansion::unit(layout, layout.ancilla(pair, Quadrature::P)), admix);
  }
}

}  // namespace teleport
