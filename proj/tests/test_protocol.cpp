#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "doctest.h"

#include "teleport/gaussian_core.hpp"
#include "teleport/protocol.hpp"

using namespace teleport;

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Dense covariance propagation with its own register: atoms, then per order
// (x_c, p_c, x_s, p_s) of scattered light, then the same for the input pulse,
// then ancillas. Scattered-only loss. Returns shot-unit total variances of
// (X_fin, P_fin).
struct BruteForce {
  int orders;
  int measured;
  int dim;
  int next_ancilla;

  BruteForce(int envelope_order)
      : orders(envelope_order + 3),
        measured(envelope_order + 2),
        dim(2 + 8 * orders + 2 + 8 * measured),
        next_ancilla(2 + 8 * orders) {}

  int xc(int n) const { return 2 + 4 * n; }
  int pc(int n) const { return 3 + 4 * n; }
  int xs(int n) const { return 4 + 4 * n; }
  int ps(int n) const { return 5 + 4 * n; }
  int yc(int n) const { return 2 + 4 * orders + 4 * n; }
  int qc(int n) const { return 3 + 4 * orders + 4 * n; }
  int ys(int n) const { return 4 + 4 * orders + 4 * n; }
  int qs(int n) const { return 5 + 4 * orders + 4 * n; }

  Eigen::VectorXd e(int i) const { return Eigen::VectorXd::Unit(dim, i); }

  static double alpha(int n) { return 1.0 / std::sqrt(4.0 * n * n - 1.0); }

  std::pair<double, double> run(double kappa, const std::vector<double>& c, double g, double s, double beta,
                                double eps) {
    const double lin = kappa / kSqrt2;
    const double back = kappa * kappa / 4.0;
    const auto cn = [&](int n) { return n < static_cast<int>(c.size()) ? c[static_cast<std::size_t>(n)] : 0.0; };

    Eigen::VectorXd xa = e(0) + lin * e(pc(0));
    Eigen::VectorXd pa = e(1) + lin * e(ps(0));
    const int fa = next_ancilla;
    next_ancilla += 2;
    xa = std::sqrt(1 - beta) * xa + std::sqrt(beta) * e(fa);
    pa = std::sqrt(1 - beta) * pa + std::sqrt(beta) * e(fa + 1);

    Eigen::VectorXd x_fin = xa;
    Eigen::VectorXd p_fin = pa;
    for (int n = 0; n < measured; ++n) {
      Eigen::VectorXd xcn = e(xc(n));
      Eigen::VectorXd xsn = e(xs(n));
      if (n == 0) {
        xcn += lin * e(1) + back * (e(ps(0)) - alpha(1) * e(ps(1)));
        xsn += -lin * e(0) - back * (e(pc(0)) - alpha(1) * e(pc(1)));
      } else {
        xcn += back * (alpha(n) * e(ps(n - 1)) - alpha(n + 1) * e(ps(n + 1)));
        xsn += -back * (alpha(n) * e(pc(n - 1)) - alpha(n + 1) * e(pc(n + 1)));
      }
      Eigen::VectorXd pcn = e(pc(n));
      Eigen::VectorXd psn = e(ps(n));
      const auto lose = [&](Eigen::VectorXd& x, Eigen::VectorXd& p) {
        const int a = next_ancilla;
        next_ancilla += 2;
        x = std::sqrt(1 - eps) * x + std::sqrt(eps) * e(a);
        p = std::sqrt(1 - eps) * p + std::sqrt(eps) * e(a + 1);
      };
      lose(xcn, pcn);
      lose(xsn, psn);

      const Eigen::VectorXd x_tilde_s = (xsn + e(ys(n))) / kSqrt2;
      const Eigen::VectorXd q_tilde_c = (pcn - e(qc(n))) / kSqrt2;
      const Eigen::VectorXd x_tilde_c = (xcn + e(yc(n))) / kSqrt2;
      const Eigen::VectorXd q_tilde_s = (psn - e(qs(n))) / kSqrt2;
      x_fin += g * cn(n) * (x_tilde_s - q_tilde_c);
      p_fin -= g * cn(n) * (x_tilde_c + q_tilde_s);
    }

    Eigen::VectorXd var = Eigen::VectorXd::Constant(dim, 0.5);
    for (int n = 0; n < orders; ++n) {
      var[xc(n)] = var[xs(n)] = s / 2;
      var[pc(n)] = var[ps(n)] = 1 / (2 * s);
    }
    return {2 * x_fin.cwiseAbs2().dot(var), 2 * p_fin.cwiseAbs2().dot(var)};
  }
};

Envelope random_envelope(std::mt19937_64& rng, int order) {
  std::normal_distribution<double> normal;
  std::vector<double> raw(static_cast<std::size_t>(order + 1));
  for (double& v : raw) v = normal(rng);
  return Envelope::normalized(raw);
}

}  // namespace

TEST_CASE("feedback_coefficient_f examples") {
  CHECK(feedback_coefficient_f(0, Envelope::flat(), 2.0) == doctest::Approx(0.0));
  CHECK(feedback_coefficient_f(1, Envelope::flat(), 2.0) == doctest::Approx(-0.40824829));
  CHECK(feedback_coefficient_f(0, Envelope::flat(), 0.0) == doctest::Approx(1 / kSqrt2));
  CHECK_THROWS_AS(feedback_coefficient_f(2, Envelope::flat(), 1.0), std::domain_error);
  CHECK_THROWS_AS(feedback_coefficient_f(-1, Envelope::flat(), 1.0), std::domain_error);
}

TEST_CASE("Bell observables") {
  ProtocolParams params;
  params.kappa = 0.0;
  const MeasurementStage zero = bell_observable_expansions(params);
  const BasisLayout& layout = zero.layout;
  const TemporalModeId c0{Polarity::Cos, 0};
  const TemporalModeId s0{Polarity::Sin, 0};

  SUBCASE("kappa = 0 is a bare beam splitter") {
    QuadExpansion expected = QuadExpansion::zero(layout);
    expected.coeffs[static_cast<Eigen::Index>(layout.scattered(c0, Quadrature::X))] = 1 / kSqrt2;
    expected.coeffs[static_cast<Eigen::Index>(layout.input(c0, Quadrature::X))] = 1 / kSqrt2;
    CHECK((zero.bell.x_cos[0].coeffs - expected.coeffs).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("difference ports carry no x-type slots") {
    params.kappa = 1.7;
    params.envelope = Envelope::normalized({1, 0.5, 0.2});
    const MeasurementStage stage = bell_observable_expansions(params);
    REQUIRE(stage.bell.q_cos.size() == 4);
    for (const auto* ports : {&stage.bell.q_cos, &stage.bell.q_sin}) {
      for (const QuadExpansion& q : *ports) {
        for (std::size_t slot = 0; slot < stage.layout.size(); slot += 2) CHECK(q.coefficient(slot) == 0.0);
      }
    }
  }
  SUBCASE("kappa = 2 puts -1 on X_A in the sin sum port") {
    params.kappa = 2.0;
    const MeasurementStage stage = bell_observable_expansions(params);
    CHECK(stage.bell.x_sin[0].coefficient(stage.layout.atomic(Quadrature::X)) == doctest::Approx(-1.0));
    CHECK(stage.bell.x_sin[0].coefficient(stage.layout.scattered(s0, Quadrature::X)) ==
          doctest::Approx(1 / kSqrt2));
  }
}

TEST_CASE("final_atomic_state examples") {
  ProtocolParams params;
  params.kappa = 2.0;
  const Moments m = final_atomic_state(params).moments;
  CHECK(m.excess_x == doctest::Approx(2.0 / 3.0));
  CHECK(m.excess_p == doctest::Approx(2.0 / 3.0));
  CHECK(m.gain_x == doctest::Approx(1.0));

  params.kappa = 0.0;
  const Moments idle = final_atomic_state(params).moments;
  CHECK(idle.gain_x == doctest::Approx(1.0));
  CHECK(idle.excess_x == doctest::Approx(2.0));

  params.kappa = 1.2;
  params.gain = 0.0;
  params.imperfections.beta = 0.3;
  const Moments off = final_atomic_state(params).moments;
  CHECK(off.gain_x == 0.0);
  CHECK(off.gain_p == 0.0);
  // Decayed atomic variance: 0.7 (1 + kappa^2 / 2) + 0.3.
  CHECK(off.excess_x == doctest::Approx(0.7 * (1 + 0.72) + 0.3));
}

TEST_CASE("composed feedback reproduces the closed-form final quadratures") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    ProtocolParams params;
    params.kappa = 0.25 * trial;
    params.envelope = random_envelope(rng, trial % 5);
    const FinalState final_state = final_atomic_state(params);
    const BasisLayout& layout = final_state.layout;
    const double c0 = params.envelope[0];

    CHECK(final_state.x_fin.coefficient(layout.atomic(Quadrature::X)) ==
          doctest::Approx(1 - c0 * params.kappa / 2));
    CHECK(final_state.p_fin.coefficient(layout.atomic(Quadrature::P)) ==
          doctest::Approx(1 - c0 * params.kappa / 2));
    CHECK(final_state.x_fin.signal_gain_y == doctest::Approx(1.0));
    CHECK(final_state.p_fin.signal_gain_q == doctest::Approx(1.0));
    for (int n = 0; n <= params.envelope.order() + 1; ++n) {
      const double f = feedback_coefficient_f(n, params.envelope, params.kappa);
      const double cn = params.envelope[n];
      CHECK(std::abs(final_state.x_fin.coefficient(layout.scattered({Polarity::Cos, n}, Quadrature::P)) + f) < 1e-12);
      CHECK(std::abs(final_state.p_fin.coefficient(layout.scattered({Polarity::Sin, n}, Quadrature::P)) + f) < 1e-12);
      CHECK(final_state.x_fin.coefficient(layout.scattered({Polarity::Sin, n}, Quadrature::X)) ==
            doctest::Approx(cn / kSqrt2));
      CHECK(final_state.p_fin.coefficient(layout.scattered({Polarity::Cos, n}, Quadrature::X)) ==
            doctest::Approx(-cn / kSqrt2));
    }
  }
}

TEST_CASE("moments agree with brute-force covariance propagation") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const int order = trial % 4;
    ProtocolParams params;
    params.kappa = 3.0 * uniform(rng);
    params.envelope = random_envelope(rng, order);
    params.gain = 1.4 * uniform(rng);
    params.imperfections = {0.05 + 0.95 * uniform(rng), 0.3 * uniform(rng), 0.3 * uniform(rng),
                            LossPlacement::ScatteredOnly};
    const Moments m = final_atomic_state(params).moments;

    BruteForce oracle(order);
    const auto coefficients = params.envelope.coefficients();
    const auto [vx, vp] = oracle.run(params.kappa, {coefficients.begin(), coefficients.end()}, params.gain,
                                     params.imperfections.s, params.imperfections.beta,
                                     params.imperfections.epsilon);
    CHECK(m.gain_x * m.gain_x + m.excess_x == doctest::Approx(vx).epsilon(1e-12));
    CHECK(m.gain_p * m.gain_p + m.excess_p == doctest::Approx(vp).epsilon(1e-12));
    CHECK(m.gain_x == doctest::Approx(params.gain));
  }
}

TEST_CASE("excess is symmetric between X and P for every placement") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (auto placement : {LossPlacement::ScatteredOnly, LossPlacement::Detection, LossPlacement::Both}) {
    for (int trial = 0; trial < 10; ++trial) {
      ProtocolParams params;
      params.kappa = 3.0 * uniform(rng);
      params.envelope = random_envelope(rng, trial % 4);
      params.gain = 1.5 * uniform(rng);
      params.imperfections = {0.05 + 0.95 * uniform(rng), 0.5 * uniform(rng), 0.5 * uniform(rng), placement};
      const Moments m = final_atomic_state(params).moments;
      CHECK(std::abs(m.excess_x - m.excess_p) < 1e-10);
      CHECK(m.gain_x == doctest::Approx(m.gain_p));
      CHECK(m.excess_x >= 0.0);
    }
  }
}

TEST_CASE("signal gain follows the feedback gain and the placement") {
  ProtocolParams params;
  params.kappa = 1.5;
  params.envelope = Envelope::normalized({1, 0.4});
  params.gain = 0.8;
  CHECK(final_atomic_state(params).moments.gain_x == doctest::Approx(0.8));
  params.imperfections = {1.0, 0.0, 0.19, LossPlacement::Detection};
  CHECK(final_atomic_state(params).moments.gain_x == doctest::Approx(0.8 * 0.9));
  params.imperfections.loss_placement = LossPlacement::Both;
  CHECK(final_atomic_state(params).moments.gain_x == doctest::Approx(0.8 * 0.9));
  params.imperfections = {1.0, 0.19, 0.0, LossPlacement::ScatteredOnly};
  CHECK(final_atomic_state(params).moments.gain_x == doctest::Approx(0.8));
}

TEST_CASE("uncancellable noise is (1 - eps) s/2 + eps + beta") {
  // At unit gain the atomic and p-quadrature terms can in principle be
  // cancelled; the x noise of the measured light and the ancillas cannot.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    ProtocolParams params;
    params.kappa = 3.0 * uniform(rng);
    params.envelope = random_envelope(rng, 3);
    const double s = 0.05 + 0.95 * uniform(rng);
    const double beta = 0.3 * uniform(rng);
    const double eps = 0.3 * uniform(rng);
    params.imperfections = {s, beta, eps, LossPlacement::ScatteredOnly};
    const FinalState final_state = final_atomic_state(params);
    for (const QuadExpansion* quadrature : {&final_state.x_fin, &final_state.p_fin}) {
      QuadExpansion residual = *quadrature;
      for (std::size_t slot = 0; slot < final_state.layout.size(); ++slot) {
        const SlotKind kind = final_state.layout.kind(slot);
        const bool uncancellable = kind == SlotKind::Ancilla ||
                                   (kind == SlotKind::Scattered && BasisLayout::quadrature(slot) == Quadrature::X);
        if (!uncancellable) residual.coeffs[static_cast<Eigen::Index>(slot)] = 0.0;
      }
      CHECK(to_shot_units(variance_of(residual, final_state.state)) ==
            doctest::Approx((1 - eps) * s / 2 + eps + beta).epsilon(1e-12));
    }
  }
}

TEST_CASE("cancellation bound") {
  CHECK(cancellation_bound_fidelity(1, 0, 0) == doctest::Approx(0.8));
  CHECK(cancellation_bound_fidelity(0.1, 0, 0) == doctest::Approx(2 / 2.05));
  CHECK(cancellation_bound_fidelity(0.1, 0.1, 0.1) == doctest::Approx(2 / 2.25));
}

TEST_CASE("ProtocolParams validation") {
  ProtocolParams params;
  params.kappa = -1.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.kappa = 1.0;
  params.gain = -0.5;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.gain = 1.0;
  CHECK(params.register_orders() == 3);
}
