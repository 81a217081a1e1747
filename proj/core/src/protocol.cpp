#include "teleport/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "teleport/scattering.hpp"

namespace teleport {

void ProtocolParams::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be finite and >= 0");
  if (!(gain >= 0.0) || !std::isfinite(gain)) throw std::invalid_argument("gain must be finite and >= 0");
  imperfections.validate();
}

MeasurementStage scatter_and_measure(double kappa, int envelope_order, const ImperfectionConfig& cfg) {
  if (envelope_order < 0) throw std::invalid_argument("envelope order must be >= 0");
  cfg.validate();

  const int orders = envelope_order + 3;
  const int measured = envelope_order + 2;  // orders 0..N+1
  BasisLayout layout(orders);
  const ScatteringMap map = build_scattering_map(kappa, orders);

  auto [atomic_x, atomic_p] =
      apply_atomic_decay(map.output(layout, layout.atomic(Quadrature::X)),
                         map.output(layout, layout.atomic(Quadrature::P)), cfg.beta, layout);

  // Per polarity, scattered and payload-pulse modes of the measured orders.
  std::vector<OpticalMode> scattered;
  std::vector<OpticalMode> input;
  for (Polarity pol : {Polarity::Cos, Polarity::Sin}) {
    for (int n = 0; n < measured; ++n) {
      const TemporalModeId id{pol, n};
      scattered.push_back({map.output(layout, layout.scattered(id, Quadrature::X)),
                           map.output(layout, layout.scattered(id, Quadrature::P))});
      input.push_back({QuadExpansion::unit(layout, layout.input(id, Quadrature::X)),
                       QuadExpansion::unit(layout, layout.input(id, Quadrature::P))});
    }
  }
  if (loss_acts_at(cfg.loss_placement, LossStage::ScatteredLight)) {
    apply_light_loss(scattered, cfg.epsilon, layout);
  }
  if (loss_acts_at(cfg.loss_placement, LossStage::InputPulse)) {
    apply_light_loss(input, cfg.epsilon, layout);
  }

  // Balanced beam splitter: sum port carries (x + y, p + q) / sqrt 2, the
  // difference port (x - y, p - q) / sqrt 2.
  constexpr double half = std::numbers::sqrt2 / 2.0;
  std::vector<OpticalMode> sum_port;
  std::vector<OpticalMode> diff_port;
  for (std::size_t i = 0; i < scattered.size(); ++i) {
    sum_port.push_back({half * (scattered[i].x + input[i].x), half * (scattered[i].p + input[i].p)});
    diff_port.push_back({half * (scattered[i].x - input[i].x), half * (scattered[i].p - input[i].p)});
  }
  if (loss_acts_at(cfg.loss_placement, LossStage::BeamSplitterOutput)) {
    apply_light_loss(sum_port, cfg.epsilon, layout);
    apply_light_loss(diff_port, cfg.epsilon, layout);
  }

  BellObservables bell;
  const auto sin_offset = static_cast<std::size_t>(measured);
  for (std::size_t n = 0; n < sin_offset; ++n) {
    bell.x_cos.push_back(sum_port[n].x);
    bell.q_cos.push_back(diff_port[n].p);
    bell.x_sin.push_back(sum_port[sin_offset + n].x);
    bell.q_sin.push_back(diff_port[sin_offset + n].p);
  }
  return MeasurementStage{std::move(layout), std::move(atomic_x), std::move(atomic_p), std::move(bell),
                          envelope_order};
}

MeasurementStage bell_observable_expansions(const ProtocolParams& params) {
  params.validate();
  return scatter_and_measure(params.kappa, params.envelope.order(), params.imperfections);
}

QuadExpansion feedback_increment_x(const MeasurementStage& stage, int n) {
  const auto i = static_cast<std::size_t>(n);
  return stage.bell.x_sin.at(i) - stage.bell.q_cos.at(i);
}

QuadExpansion feedback_increment_p(const MeasurementStage& stage, int n) {
  const auto i = static_cast<std::size_t>(n);
  return -1.0 * (stage.bell.x_cos.at(i) + stage.bell.q_sin.at(i));
}

void extract_payload(QuadExpansion& e, const Envelope& envelope, const BasisLayout& layout) {
  e.resize(layout.size());
  const double w = std::numbers::sqrt2 / 2.0;
  double along_y = 0.0;
  double along_q = 0.0;
  for (int n = 0; n <= envelope.order() && n < layout.light_orders(); ++n) {
    const double c = envelope[n] * w;
    along_y += c * (e.coefficient(layout.input({Polarity::Sin, n}, Quadrature::X)) +
                    e.coefficient(layout.input({Polarity::Cos, n}, Quadrature::P)));
    along_q += c * (e.coefficient(layout.input({Polarity::Sin, n}, Quadrature::P)) -
                    e.coefficient(layout.input({Polarity::Cos, n}, Quadrature::X)));
  }
  for (int n = 0; n <= envelope.order() && n < layout.light_orders(); ++n) {
    const double c = envelope[n] * w;
    const auto slot = [&](Polarity pol, Quadrature q) {
      return static_cast<Eigen::Index>(layout.input({pol, n}, q));
    };
    e.coeffs[slot(Polarity::Sin, Quadrature::X)] -= along_y * c;
    e.coeffs[slot(Polarity::Cos, Quadrature::P)] -= along_y * c;
    e.coeffs[slot(Polarity::Sin, Quadrature::P)] -= along_q * c;
    e.coeffs[slot(Polarity::Cos, Quadrature::X)] += along_q * c;
  }
  e.signal_gain_y += along_y;
  e.signal_gain_q += along_q;
}

FinalState apply_feedback(const MeasurementStage& stage, const Envelope& envelope, double gain,
                          const ImperfectionConfig& cfg) {
  if (envelope.order() != stage.envelope_order) {
    throw std::invalid_argument("envelope order does not match the measurement stage");
  }
  QuadExpansion x = stage.atomic_x;
  QuadExpansion p = stage.atomic_p;
  for (int n = 0; n <= envelope.order(); ++n) {
    x.add_scaled(feedback_increment_x(stage, n), gain * envelope[n]);
    p.add_scaled(feedback_increment_p(stage, n), gain * envelope[n]);
  }
  extract_payload(x, envelope, stage.layout);
  extract_payload(p, envelope, stage.layout);

  DiagonalState state = initial_state(cfg, stage.layout);
  Moments moments{x.signal_gain_y, p.signal_gain_q, to_shot_units(variance_of(x, state)),
                  to_shot_units(variance_of(p, state))};
  return FinalState{stage.layout, std::move(state), std::move(x), std::move(p), moments};
}

FinalState final_atomic_state(const ProtocolParams& params) {
  const MeasurementStage stage = bell_observable_expansions(params);
  return apply_feedback(stage, params.envelope, params.gain, params.imperfections);
}

double feedback_coefficient_f(int n, const Envelope& c, double kappa) {
  if (n < 0 || n > c.order() + 1) throw std::domain_error("f_n is defined for 0 <= n <= N+1");
  const double backaction = 0.25 * kappa * kappa;
  const double w = std::numbers::sqrt2 / 2.0;
  if (n == 0) return w * (c[0] - kappa + backaction * (c[0] + c[1] * alpha_coupling(1)));
  return w * (c[n] + backaction * (c[n + 1] * alpha_coupling(n + 1) - c[n - 1] * alpha_coupling(n)));
}

double cancellation_bound_fidelity(double s, double beta, double epsilon) {
  return 2.0 / (2.0 + 0.5 * s + beta + epsilon);
}

double unit_signal_gain_feedback(const ImperfectionConfig& cfg) noexcept {
  return 1.0 / signal_transmission(cfg);
}

}  // namespace teleport
