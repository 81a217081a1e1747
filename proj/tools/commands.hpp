#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "teleport/imperfections.hpp"
#include "teleport/optimizer.hpp"

namespace teleport::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  Objective objective = Objective::unit_gain();
  int envelope_order = 3;
  ImperfectionConfig imperfections;
  double nbar = 2.0;
  double kappa_min = 0.1;
  double kappa_max = 3.0;
  double kappa_step = 0.05;
  /// Empty means the gain is optimized.
  std::optional<double> fixed_gain;
  std::string output;

  /// Throws std::invalid_argument on any out-of-range field.
  void validate() const;
  GainSearch gain_search() const;
};

/// Parses "lo:hi:step" or a single value.
void parse_kappa_range(std::string_view text, RunConfig& cfg);
std::optional<ObjectiveKind> parse_objective(std::string_view text);

/// Shortest round-trip-stable text with 9 significant digits, '.' decimal.
std::string format_number(double value);

/// kappa,fidelity,excess_shot,g_star,c_0..c_N; empty fields for failed points.
std::string sweep_csv(std::span<const SweepPoint> curve, int envelope_order);

/// u,envelope over `samples` equally spaced points of [0, 1].
std::string envelope_csv(const Envelope& envelope, std::size_t samples = 256);

struct CheckLine {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CheckOptions {
  /// Added to one back-action entry of the scattering map (negative control).
  double map_perturbation = 0.0;
};

std::vector<CheckLine> run_checks(const CheckOptions& options = {});

struct FigureCurve {
  std::string label;
  RunConfig config;
};

struct FigurePreset {
  std::string name;
  std::vector<FigureCurve> curves;
  /// Optimal-envelope inset at `inset_kappa`, when the figure has one.
  std::optional<FigureCurve> inset;
  double inset_kappa = 2.0;
};

std::optional<FigurePreset> figure_preset(std::string_view name);
std::vector<std::string> figure_names();

int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_envelope(const RunConfig& cfg, double kappa, std::ostream& log);
int cmd_check(const CheckOptions& options, std::ostream& out);
int cmd_figure(std::string_view name, const std::string& out_dir, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace teleport::cli
