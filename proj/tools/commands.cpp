#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "teleport/errors.hpp"
#include "teleport/figures_of_merit.hpp"
#include "teleport/mode_register.hpp"
#include "teleport/protocol.hpp"
#include "teleport/scattering.hpp"

namespace teleport::cli {

void RunConfig::validate() const {
  if (envelope_order < 0 || envelope_order > 7) throw std::invalid_argument("--N must lie in [0, 7]");
  imperfections.validate();
  if (!(nbar >= 0.0)) throw std::invalid_argument("--nbar must be >= 0");
  if (!(kappa_min >= 0.0) || !(kappa_max >= kappa_min) || !(kappa_step > 0.0)) {
    throw std::invalid_argument("--kappa needs 0 <= lo <= hi and step > 0");
  }
  if (fixed_gain && !(*fixed_gain >= 0.0 && *fixed_gain <= 10.0)) {
    throw std::invalid_argument("--gain must be 'optimize' or a number in [0, 10]");
  }
}

GainSearch RunConfig::gain_search() const {
  GainSearch search;
  search.fixed = fixed_gain;
  return search;
}

namespace {

double parse_double(std::string_view text, const char* what) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::invalid_argument(std::string("cannot parse ") + what + " from '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void parse_kappa_range(std::string_view text, RunConfig& cfg) {
  const auto first = text.find(':');
  if (first == std::string_view::npos) {
    cfg.kappa_min = cfg.kappa_max = parse_double(text, "kappa");
    return;
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string_view::npos) throw std::invalid_argument("--kappa expects lo:hi:step");
  cfg.kappa_min = parse_double(text.substr(0, first), "kappa lo");
  cfg.kappa_max = parse_double(text.substr(first + 1, second - first - 1), "kappa hi");
  cfg.kappa_step = parse_double(text.substr(second + 1), "kappa step");
}

std::optional<ObjectiveKind> parse_objective(std::string_view text) {
  for (auto kind : {ObjectiveKind::CoherentUnitGain, ObjectiveKind::CoherentAverage, ObjectiveKind::QubitAverage}) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 9);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buffer, end);
}

std::string sweep_csv(std::span<const SweepPoint> curve, int envelope_order) {
  std::string csv = "kappa,fidelity,excess_shot,g_star";
  for (int n = 0; n <= envelope_order; ++n) csv += ",c_" + std::to_string(n);
  csv += '\n';
  for (const SweepPoint& point : curve) {
    csv += format_number(point.kappa);
    if (point.result) {
      const OptimResult& r = *point.result;
      csv += ',' + format_number(r.fidelity) + ',' + format_number(r.excess) + ',' + format_number(r.g_star);
      for (int n = 0; n <= envelope_order; ++n) csv += ',' + format_number(r.c_star[n]);
    } else {
      csv += ",,,";
      for (int n = 0; n <= envelope_order; ++n) csv += ',';
    }
    csv += '\n';
  }
  return csv;
}

std::string envelope_csv(const Envelope& envelope, std::size_t samples) {
  const auto grid = unit_grid(samples);
  const auto values = sample_envelope(envelope, grid);
  std::string csv = "u,envelope\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv += format_number(grid[i]) + ',' + format_number(values[i]) + '\n';
  }
  return csv;
}

namespace {

bool write_file(const std::string& path, const std::string& contents, std::ostream& log) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) {
    log << "error: cannot open '" << path << "' for writing\n";
    return false;
  }
  file << contents;
  file.close();
  if (!file) {
    log << "error: failed writing '" << path << "'\n";
    return false;
  }
  return true;
}

std::vector<SweepPoint> run_sweep(const RunConfig& cfg) {
  const auto kappas = kappa_grid(cfg.kappa_min, cfg.kappa_max, cfg.kappa_step);
  Objective objective = cfg.objective;
  if (objective.kind == ObjectiveKind::CoherentAverage) objective.nbar = cfg.nbar;
  return kappa_sweep(kappas, cfg.envelope_order, cfg.imperfections, objective, cfg.gain_search());
}

std::size_t count_failures(std::span<const SweepPoint> curve) {
  return static_cast<std::size_t>(std::count_if(curve.begin(), curve.end(), [](const auto& p) { return !p.result; }));
}

}  // namespace

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (cfg.output.empty()) {
    log << "error: --out is required\n";
    return kExitUsage;
  }
  const auto curve = run_sweep(cfg);
  if (!write_file(cfg.output, sweep_csv(curve, cfg.envelope_order), log)) return kExitUsage;
  const auto failures = count_failures(curve);
  if (failures > 0) {
    log << failures << " infeasible point(s) in " << cfg.output << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_envelope(const RunConfig& cfg, double kappa, std::ostream& log) {
  try {
    cfg.validate();
    if (!(kappa >= 0.0)) throw std::invalid_argument("--kappa must be >= 0");
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (cfg.output.empty()) {
    log << "error: --out is required\n";
    return kExitUsage;
  }
  Objective objective = cfg.objective;
  if (objective.kind == ObjectiveKind::CoherentAverage) objective.nbar = cfg.nbar;
  OptimResult result;
  try {
    result = optimize_point(kappa, cfg.envelope_order, cfg.imperfections, objective, cfg.gain_search());
  } catch (const InfeasibleError& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return write_file(cfg.output, envelope_csv(result.c_star), log) ? kExitOk : kExitUsage;
}

// ---------------------------------------------------------------------------
// Oracle cross-checks

namespace {

CheckLine bounded(std::string name, double residual, double threshold, std::string detail = {}) {
  return CheckLine{std::move(name), residual <= threshold, residual, threshold, std::move(detail)};
}

std::vector<CheckLine> symplectic_checks(double perturbation) {
  std::vector<CheckLine> lines;
  constexpr int order = 3;
  for (double kappa : {0.5, 1.0, 2.0}) {
    ScatteringMap map = build_scattering_map(kappa, order + 3);
    if (perturbation != 0.0) {
      const BasisLayout layout(map.orders);
      map.matrix(static_cast<Eigen::Index>(layout.scattered({Polarity::Cos, 0}, Quadrature::X)),
                 static_cast<Eigen::Index>(layout.scattered({Polarity::Sin, 1}, Quadrature::P))) += perturbation;
    }
    const double defect = symplectic_defect(restrict_to_orders(map, order + 1));
    lines.push_back(bounded("symplectic defect, kappa=" + format_number(kappa), defect, 1e-12));
  }
  return lines;
}

CheckLine feedback_coefficient_check() {
  ProtocolParams params;
  params.kappa = 2.0;
  params.envelope = Envelope::normalized({0.7, 0.5, 0.4, 0.3});
  const FinalState state = final_atomic_state(params);
  double residual = 0.0;
  for (int n = 0; n <= params.envelope.order() + 1; ++n) {
    const double f = feedback_coefficient_f(n, params.envelope, params.kappa);
    residual = std::max(residual, std::abs(state.x_fin.coefficient(state.layout.scattered({Polarity::Cos, n}, Quadrature::P)) + f));
    residual = std::max(residual, std::abs(state.p_fin.coefficient(state.layout.scattered({Polarity::Sin, n}, Quadrature::P)) + f));
  }
  return bounded("composed feedback vs closed-form f_n", residual, 1e-12);
}

CheckLine quadratic_form_check() {
  const ImperfectionConfig cfg{0.1, 0.1, 0.1, LossPlacement::ScatteredOnly};
  constexpr double kappa = 2.0;
  constexpr double gain = 0.9;
  constexpr int order = 3;
  const MeasurementStage stage = scatter_and_measure(kappa, order, cfg);
  const QuadraticForm form = noise_quadratic_form(stage, cfg, gain);
  std::mt19937_64 rng(20061);
  std::normal_distribution<double> normal;
  double residual = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> raw(order + 1);
    for (double& v : raw) v = normal(rng);
    const Envelope envelope = Envelope::normalized(raw);
    const Eigen::Map<const Eigen::VectorXd> c(envelope.coefficients().data(), order + 1);
    const Moments m = apply_feedback(stage, envelope, gain, cfg).moments;
    residual = std::max(residual, std::abs(form.evaluate(c) - 0.5 * (m.excess_x + m.excess_p)));
  }
  return bounded("quadratic form vs direct excess, 20 envelopes", residual, 1e-10);
}

CheckLine qubit_oracle_check() {
  double residual = 0.0;
  for (double g : {0.0, 0.3, 0.6, 0.9, 1.2}) {
    for (double s2 : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const QubitChannelParams p{g, s2};
      residual = std::max(residual, std::abs(qubit_fidelity_oracle(p) - qubit_average_fidelity(p)));
    }
  }
  return bounded("qubit closed form vs Fock oracle, 5x5 grid", residual, 1e-4);
}

std::vector<CheckLine> bound_checks() {
  std::vector<CheckLine> lines;
  const std::array<ImperfectionConfig, 3> configs{ImperfectionConfig{1.0, 0.0, 0.0},
                                                  ImperfectionConfig{0.1, 0.0, 0.0},
                                                  ImperfectionConfig{0.1, 0.1, 0.1}};
  for (const auto& cfg : configs) {
    const double bound = cancellation_bound_fidelity(cfg.s, cfg.beta, cfg.epsilon);
    double worst = -1.0;
    for (double kappa : {1.0, 2.0, 3.0}) {
      const double f = optimize_point(kappa, 3, cfg, Objective::unit_gain()).fidelity;
      worst = std::max(worst, f - bound);
    }
    lines.push_back(bounded("unit-gain fidelity <= bound + 0.01 (s=" + format_number(cfg.s) +
                                ", beta=" + format_number(cfg.beta) + ", eps=" + format_number(cfg.epsilon) + ")",
                            worst, 0.01));
  }
  return lines;
}

CheckLine representation_guard_check() {
  try {
    (void)qubit_sigma2(Moments{0.5, 0.5, 0.0, 0.0});
  } catch (const RepresentationError& e) {
    return CheckLine{"qubit point with sigma^2 < 0 rejected", true, 0.0, 0.0, "infeasible: " + std::string(e.what())};
  }
  return CheckLine{"qubit point with sigma^2 < 0 rejected", false, 0.0, 0.0, "accepted a non-representable channel"};
}

}  // namespace

std::vector<CheckLine> run_checks(const CheckOptions& options) {
  std::vector<CheckLine> lines = symplectic_checks(options.map_perturbation);
  lines.push_back(feedback_coefficient_check());
  lines.push_back(quadratic_form_check());
  lines.push_back(qubit_oracle_check());
  for (auto& line : bound_checks()) lines.push_back(std::move(line));
  lines.push_back(representation_guard_check());
  return lines;
}

int cmd_check(const CheckOptions& options, std::ostream& out) {
  bool all = true;
  for (const CheckLine& line : run_checks(options)) {
    all = all && line.pass;
    out << (line.pass ? "PASS " : "FAIL ") << line.name << "  residual=" << format_number(line.residual)
        << " threshold=" << format_number(line.threshold);
    if (!line.detail.empty()) out << "  (" << line.detail << ')';
    out << '\n';
  }
  out << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// Figure presets

namespace {

RunConfig preset_config(ObjectiveKind kind, int order, double s, double loss) {
  RunConfig cfg;
  cfg.objective = {kind, 0.0};
  cfg.envelope_order = order;
  cfg.imperfections = ImperfectionConfig{s, loss, loss, LossPlacement::ScatteredOnly};
  return cfg;
}

std::vector<FigureCurve> squeezing_family(ObjectiveKind kind, double loss) {
  std::vector<FigureCurve> curves;
  for (double s : {1.0, 0.5, 0.25, 0.1}) curves.push_back({"s" + format_number(s), preset_config(kind, 3, s, loss)});
  return curves;
}

}  // namespace

std::vector<std::string> figure_names() { return {"fig1", "fig2a", "fig2b", "fig3a", "fig3b"}; }

std::optional<FigurePreset> figure_preset(std::string_view name) {
  using K = ObjectiveKind;
  if (name == "fig1") {
    FigurePreset preset{"fig1", {}, FigureCurve{"envelope", preset_config(K::CoherentUnitGain, 3, 1.0, 0.0)}};
    for (int n = 0; n <= 3; ++n) {
      preset.curves.push_back({"N" + std::to_string(n), preset_config(K::CoherentUnitGain, n, 1.0, 0.0)});
    }
    return preset;
  }
  if (name == "fig2a") {
    return FigurePreset{"fig2a", squeezing_family(K::CoherentUnitGain, 0.0),
                        FigureCurve{"envelope", preset_config(K::CoherentUnitGain, 3, 0.1, 0.0)}};
  }
  if (name == "fig2b") return FigurePreset{"fig2b", squeezing_family(K::CoherentUnitGain, 0.1), std::nullopt};
  if (name == "fig3a") {
    return FigurePreset{"fig3a", squeezing_family(K::QubitAverage, 0.0),
                        FigureCurve{"envelope", preset_config(K::QubitAverage, 3, 0.1, 0.0)}};
  }
  if (name == "fig3b") return FigurePreset{"fig3b", squeezing_family(K::QubitAverage, 0.1), std::nullopt};
  return std::nullopt;
}

int cmd_figure(std::string_view name, const std::string& out_dir, std::ostream& log) {
  const auto preset = figure_preset(name);
  if (!preset) {
    log << "error: unknown figure '" << name << "'\n";
    return kExitUsage;
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    log << "error: cannot create '" << out_dir << "': " << ec.message() << '\n';
    return kExitUsage;
  }
  const std::filesystem::path dir(out_dir);
  std::size_t failures = 0;
  for (const FigureCurve& curve : preset->curves) {
    const auto points = run_sweep(curve.config);
    failures += count_failures(points);
    const auto path = (dir / (preset->name + "_" + curve.label + ".csv")).string();
    if (!write_file(path, sweep_csv(points, curve.config.envelope_order), log)) return kExitUsage;
    log << "wrote " << path << '\n';
  }
  if (preset->inset) {
    const RunConfig& cfg = preset->inset->config;
    const auto result = optimize_point(preset->inset_kappa, cfg.envelope_order, cfg.imperfections, cfg.objective);
    const auto path = (dir / (preset->name + "_envelope.csv")).string();
    if (!write_file(path, envelope_csv(result.c_star), log)) return kExitUsage;
    log << "wrote " << path << '\n';
  }
  return failures == 0 ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// Command line

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multimode light-to-atom teleportation: fidelity sweeps and optimal pulse envelopes", "teleport"};
  app.set_config("--config", "", "key=value configuration file (command-line flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string objective = "coherent";
  std::string placement = "scattered";
  std::string gain = "optimize";

  app.add_option("--objective", objective, "coherent | coherent-avg | qubit")->capture_default_str();
  app.add_option("--N", cfg.envelope_order, "Envelope order N (N+1 Legendre modes)")->capture_default_str();
  app.add_option("--s", cfg.imperfections.s, "Squeezed variance of the scattered light, shot units (1 = vacuum)")
      ->capture_default_str();
  app.add_option("--beta", cfg.imperfections.beta, "Atomic decay fraction")->capture_default_str();
  app.add_option("--epsilon", cfg.imperfections.epsilon, "Light power-loss fraction")->capture_default_str();
  app.add_option("--placement", placement, "Light loss placement: scattered | detection | both")
      ->capture_default_str();
  app.add_option("--nbar", cfg.nbar, "Mean photon number of the coherent-state ensemble (coherent-avg)")
      ->capture_default_str();
  app.add_option("--gain", gain, "'optimize' or a fixed feedback gain (ignored by the unit-gain objective)")
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Optimized fidelity versus coupling kappa, written as CSV");
  std::string kappa_range = "0.1:3.0:0.05";
  sweep->add_option("--kappa", kappa_range, "Coupling grid lo:hi:step")->capture_default_str();
  sweep->add_option("--out", cfg.output, "Output CSV path")->required();

  auto* envelope = app.add_subcommand("envelope", "Optimal input-pulse envelope at one coupling, as CSV");
  double envelope_kappa = 2.0;
  envelope->add_option("--kappa", envelope_kappa, "Coupling kappa")->capture_default_str();
  envelope->add_option("--out", cfg.output, "Output CSV path")->required();

  auto* check = app.add_subcommand("check", "Run the oracle cross-checks; exit 0 iff all pass");
  CheckOptions check_options;
  check->add_option("--perturb-map", check_options.map_perturbation,
                    "Perturb one scattering-map entry (negative control)");

  auto* figure = app.add_subcommand("figure", "Write every curve of a figure preset");
  std::string figure_name;
  std::string out_dir = ".";
  figure->add_option("preset", figure_name, "fig1 | fig2a | fig2b | fig3a | fig3b")->required();
  figure->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const auto kind = parse_objective(objective);
    if (!kind) throw std::invalid_argument("unknown objective '" + objective + "'");
    cfg.objective = {*kind, 0.0};
    const auto where = parse_loss_placement(placement);
    if (!where) throw std::invalid_argument("unknown loss placement '" + placement + "'");
    cfg.imperfections.loss_placement = *where;
    if (gain != "optimize") cfg.fixed_gain = parse_double(gain, "gain");
    if (*sweep) parse_kappa_range(kappa_range, cfg);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (*sweep) return cmd_sweep(cfg, err);
  if (*envelope) return cmd_envelope(cfg, envelope_kappa, err);
  if (*check) return cmd_check(check_options, out);
  if (*figure) return cmd_figure(figure_name, out_dir, err);
  return kExitUsage;
}

}  // namespace teleport::cli
