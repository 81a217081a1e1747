#include "teleport/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "teleport/errors.hpp"
#include "teleport/figures_of_merit.hpp"

namespace teleport {

namespace {

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

// Shot-unit variance weights of the noise slots; payload-pulse slots get zero
// weight because for unit envelopes their whole contribution is signal.
Eigen::VectorXd noise_weights(const MeasurementStage& stage, const ImperfectionConfig& cfg) {
  const DiagonalState state = initial_state(cfg, stage.layout);
  Eigen::VectorXd weights = 2.0 * state.variances();
  for (std::size_t slot = 0; slot < stage.layout.size(); ++slot) {
    if (stage.layout.kind(slot) == SlotKind::Input) weights[static_cast<Eigen::Index>(slot)] = 0.0;
  }
  return weights;
}

QuadraticForm form_for(const QuadExpansion& constant, const std::vector<QuadExpansion>& linear,
                       const Eigen::VectorXd& weights) {
  const Eigen::Index size = weights.size();
  const auto n = static_cast<Eigen::Index>(linear.size());
  auto padded = [size](QuadExpansion e) {
    e.resize(static_cast<std::size_t>(size));
    return e.coeffs;
  };
  const Eigen::VectorXd v0 = padded(constant);
  Eigen::MatrixXd basis(size, n);
  for (Eigen::Index i = 0; i < n; ++i) basis.col(i) = padded(linear[static_cast<std::size_t>(i)]);

  const Eigen::MatrixXd weighted = weights.asDiagonal() * basis;
  QuadraticForm q;
  q.A = basis.transpose() * weighted;
  q.b = weighted.transpose() * v0;
  q.d = v0.dot(weights.asDiagonal() * v0);
  return q;
}

}  // namespace

QuadraticForm noise_quadratic_form(const MeasurementStage& stage, const ImperfectionConfig& cfg, double gain) {
  const Eigen::VectorXd weights = noise_weights(stage, cfg);
  std::vector<QuadExpansion> dx;
  std::vector<QuadExpansion> dp;
  for (int n = 0; n <= stage.envelope_order; ++n) {
    dx.push_back(gain * feedback_increment_x(stage, n));
    dp.push_back(gain * feedback_increment_p(stage, n));
  }
  const QuadraticForm fx = form_for(stage.atomic_x, dx, weights);
  const QuadraticForm fp = form_for(stage.atomic_p, dp, weights);
  return QuadraticForm{0.5 * (fx.A + fp.A), 0.5 * (fx.b + fp.b), 0.5 * (fx.d + fp.d)};
}

QuadraticForm noise_quadratic_form(double kappa, int envelope_order, const ImperfectionConfig& cfg, double gain) {
  return noise_quadratic_form(scatter_and_measure(kappa, envelope_order, cfg), cfg, gain);
}

SphereMinimum minimize_on_sphere(const QuadraticForm& q) {
  const Eigen::Index n = q.A.rows();
  if (n == 0 || q.A.cols() != n || q.b.size() != n) throw StructuralError("quadratic form dimensions disagree");

  const Eigen::MatrixXd sym = 0.5 * (q.A + q.A.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("eigendecomposition failed", 0.0);
  const Eigen::VectorXd& w = solver.eigenvalues();
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  const Eigen::VectorXd bt = vecs.transpose() * q.b;

  const double scale = std::max({1.0, w.cwiseAbs().maxCoeff(), q.b.norm()});
  const double degenerate = 1e-12 * scale;
  const double w0 = w[0];

  // y(mu) = -bt_i / (w_i - w0 + mu), mu = w0 - lambda > 0.
  double bottom_weight = 0.0;
  double rest_at_w0 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double gap = w[i] - w0;
    if (gap <= degenerate) {
      bottom_weight += bt[i] * bt[i];
    } else {
      rest_at_w0 += bt[i] * bt[i] / (gap * gap);
    }
  }

  Eigen::VectorXd y(n);
  if (bottom_weight <= (1e-13 * scale) * (1e-13 * scale) && rest_at_w0 <= 1.0) {
    // Hard case: the multiplier sits at the bottom eigenvalue and the missing
    // norm goes into the bottom eigenspace.
    bool filled = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double gap = w[i] - w0;
      if (gap > degenerate) {
        y[i] = -bt[i] / gap;
      } else if (!filled) {
        y[i] = std::sqrt(std::max(0.0, 1.0 - rest_at_w0));
        filled = true;
      } else {
        y[i] = 0.0;
      }
    }
  } else {
    const auto norm_at = [&](double mu, double* slope) {
      double norm2 = 0.0;
      double dnorm2 = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double denom = w[i] - w0 + mu;
        const double t = bt[i] * bt[i] / (denom * denom);
        norm2 += t;
        dnorm2 -= 2.0 * t / denom;
      }
      const double norm = std::sqrt(norm2);
      if (slope) *slope = 0.5 * dnorm2 / norm;
      return norm;
    };
    // psi(mu) = 1/|y| - 1 increases from -1 (mu -> 0) to >= 0 (mu = |b|).
    double lo = 0.0;
    double hi = q.b.norm();
    double mu = hi;
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
      double slope = 0.0;
      const double norm = norm_at(mu, &slope);
      const double psi = 1.0 / norm - 1.0;
      if (std::abs(psi) < 1e-15) {
        converged = true;
        break;
      }
      (psi < 0.0 ? lo : hi) = mu;
      const double dpsi = -slope / (norm * norm);
      double next = mu - psi / dpsi;
      if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
      if (hi - lo <= 1e-16 * std::max(1.0, hi) || std::abs(next - mu) <= 1e-16 * mu) {
        converged = true;
        mu = next;
        break;
      }
      mu = next;
    }
    if (!converged) throw NumericError("secular equation did not converge", std::abs(1.0 / norm_at(mu, nullptr) - 1.0));
    for (Eigen::Index i = 0; i < n; ++i) y[i] = -bt[i] / (w[i] - w0 + mu);
  }

  SphereMinimum result;
  result.c = vecs * y;
  result.c.normalize();
  result.value = q.evaluate(result.c);
  return result;
}

std::string_view to_string(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::CoherentUnitGain:
      return "coherent";
    case ObjectiveKind::CoherentAverage:
      return "coherent-avg";
    case ObjectiveKind::QubitAverage:
      return "qubit";
  }
  return "?";
}

double objective_value(const Moments& moments, const Objective& objective) {
  switch (objective.kind) {
    case ObjectiveKind::CoherentUnitGain:
      return coherent_fidelity(moments);
    case ObjectiveKind::CoherentAverage:
      return average_coherent_fidelity(moments, objective.nbar);
    case ObjectiveKind::QubitAverage:
      return qubit_average_fidelity(qubit_channel(moments));
  }
  throw std::logic_error("unknown objective");
}

bool qubit_fidelity_decreasing_in_noise(double g_lower, double g_upper) {
  constexpr int gain_points = 13;
  constexpr int noise_points = 101;
  for (int i = 0; i < gain_points; ++i) {
    const double g = g_lower + (g_upper - g_lower) * i / (gain_points - 1);
    double previous = qubit_average_fidelity({g, 0.0});
    for (int j = 1; j < noise_points; ++j) {
      const double current = qubit_average_fidelity({g, static_cast<double>(j) / (noise_points - 1)});
      if (!(current < previous)) return false;
      previous = current;
    }
  }
  return true;
}

namespace {

struct Trial {
  double gain = 0.0;
  double value = kInfeasible;
  std::optional<OptimResult> result;
};

class PointOptimizer {
 public:
  PointOptimizer(double kappa, int order, const ImperfectionConfig& cfg, const Objective& objective,
                 bool joint_search)
      : stage_(scatter_and_measure(kappa, order, cfg)), cfg_(cfg), objective_(objective), joint_(joint_search) {}

  Trial evaluate(double gain) const {
    Trial trial{gain, kInfeasible, std::nullopt};
    const SphereMinimum inner = minimize_on_sphere(noise_quadratic_form(stage_, cfg_, gain));
    Eigen::VectorXd c = inner.c;
    if (joint_) c = refine_directly(c, gain);
    const auto envelope = Envelope::normalized({c.data(), c.data() + c.size()});
    const FinalState final_state = apply_feedback(stage_, envelope, gain, cfg_);
    try {
      trial.value = objective_value(final_state.moments, objective_);
    } catch (const RepresentationError&) {
      return trial;
    }
    const double excess = 0.5 * (final_state.moments.excess_x + final_state.moments.excess_p);
    trial.result = OptimResult{envelope, gain, trial.value, excess, objective_, final_state.moments};
    return trial;
  }

 private:
  double direct_value(const Eigen::VectorXd& c, double gain) const {
    const auto envelope = Envelope::normalized({c.data(), c.data() + c.size()});
    try {
      return objective_value(apply_feedback(stage_, envelope, gain, cfg_).moments, objective_);
    } catch (const RepresentationError&) {
      return kInfeasible;
    }
  }

  // Pattern search on the sphere maximizing the objective itself; used when
  // minimizing the excess is not known to maximize the objective.
  Eigen::VectorXd refine_directly(Eigen::VectorXd c, double gain) const {
    double best = direct_value(c, gain);
    for (double step = 0.1; step > 1e-7; step *= 0.5) {
      bool improved = true;
      while (improved) {
        improved = false;
        for (Eigen::Index i = 0; i < c.size(); ++i) {
          for (double sign : {1.0, -1.0}) {
            Eigen::VectorXd trial = c;
            trial[i] += sign * step;
            trial.normalize();
            const double value = direct_value(trial, gain);
            if (value > best) {
              best = value;
              c = trial;
              improved = true;
            }
          }
        }
      }
    }
    return c;
  }

  MeasurementStage stage_;
  ImperfectionConfig cfg_;
  Objective objective_;
  bool joint_;
};

Trial better(Trial a, Trial b) { return b.value > a.value ? b : a; }

Trial golden_section(const PointOptimizer& opt, double lo, double hi, double tolerance, Trial best) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  Trial t1 = opt.evaluate(x1);
  Trial t2 = opt.evaluate(x2);
  while (hi - lo > tolerance) {
    if (t1.value >= t2.value) {
      hi = x2;
      x2 = x1;
      t2 = t1;
      x1 = hi - ratio * (hi - lo);
      t1 = opt.evaluate(x1);
    } else {
      lo = x1;
      x1 = x2;
      t1 = t2;
      x2 = lo + ratio * (hi - lo);
      t2 = opt.evaluate(x2);
    }
  }
  return better(best, better(t1, t2));
}

struct BracketOutcome {
  Trial best;
  bool at_lower_edge = false;
  bool at_upper_edge = false;
};

BracketOutcome search_bracket(const PointOptimizer& opt, double lo, double hi, double tolerance) {
  constexpr int intervals = 16;
  std::vector<Trial> grid;
  for (int i = 0; i <= intervals; ++i) grid.push_back(opt.evaluate(lo + (hi - lo) * i / intervals));
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i].value > grid[best].value) best = i;
  }
  BracketOutcome outcome{grid[best], best == 0, best + 1 == grid.size()};
  if (grid[best].value == kInfeasible) return outcome;
  const double a = grid[best == 0 ? 0 : best - 1].gain;
  const double b = grid[std::min(best + 1, grid.size() - 1)].gain;
  outcome.best = golden_section(opt, a, b, tolerance, grid[best]);
  return outcome;
}

}  // namespace

OptimResult optimize_point(double kappa, int envelope_order, const ImperfectionConfig& cfg,
                           const Objective& objective, const GainSearch& search,
                           std::optional<double> warm_start) {
  cfg.validate();
  if (!(search.lower >= 0.0 && search.upper > search.lower && search.tolerance > 0.0)) {
    throw std::invalid_argument("invalid gain search bracket");
  }
  const bool joint = objective.kind == ObjectiveKind::QubitAverage &&
                     !qubit_fidelity_decreasing_in_noise(search.lower, search.upper);
  const PointOptimizer opt(kappa, envelope_order, cfg, objective, joint);

  auto finish = [](const Trial& trial) {
    if (!trial.result) throw InfeasibleError("no admissible gain for this objective");
    return *trial.result;
  };

  if (objective.kind == ObjectiveKind::CoherentUnitGain) return finish(opt.evaluate(unit_signal_gain_feedback(cfg)));
  if (search.fixed) return finish(opt.evaluate(*search.fixed));

  if (warm_start) {
    constexpr double half_width = 0.15;
    const double lo = std::max(search.lower, *warm_start - half_width);
    const double hi = std::min(search.upper, *warm_start + half_width);
    if (hi - lo > search.tolerance) {
      const BracketOutcome local = search_bracket(opt, lo, hi, search.tolerance);
      const bool interior = !(local.at_lower_edge && lo > search.lower) && !(local.at_upper_edge && hi < search.upper);
      if (local.best.result && interior) return *local.best.result;
    }
  }
  return finish(search_bracket(opt, search.lower, search.upper, search.tolerance).best);
}

std::vector<SweepPoint> kappa_sweep(std::span<const double> kappas, int envelope_order,
                                    const ImperfectionConfig& cfg, const Objective& objective,
                                    const GainSearch& search) {
  if (!std::is_sorted(kappas.begin(), kappas.end())) throw std::invalid_argument("kappa grid must be sorted");
  std::vector<SweepPoint> curve;
  curve.reserve(kappas.size());
  std::optional<double> warm;
  for (double kappa : kappas) {
    SweepPoint point{kappa, std::nullopt, {}};
    try {
      point.result = optimize_point(kappa, envelope_order, cfg, objective, search, warm);
      warm = point.result->g_star;
    } catch (const std::exception& e) {
      point.failure = e.what();
    }
    curve.push_back(std::move(point));
  }
  return curve;
}

std::vector<double> kappa_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo) || !(lo >= 0.0)) throw std::invalid_argument("invalid kappa grid");
  const auto count = static_cast<long>(std::llround((hi - lo) / step));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count + 1));
  for (long i = 0; i <= count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  return grid;
}

}  // namespace teleport
