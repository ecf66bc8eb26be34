#pragma once

// Temperature sweeps driven by an experiment config, and their CSV form.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qtherm/csv.hpp"
#include "qtherm/derivative.hpp"
#include "qtherm/models.hpp"
#include "qtherm/thermometry.hpp"

namespace qtherm {

enum class Spacing { linear, log };

struct TemperatureGrid {
  double min = 0.1;
  double max = 100.0;
  int count = 200;
  Spacing spacing = Spacing::log;

  void validate() const;
  /// Endpoints included exactly.
  std::vector<double> values() const;
};

struct ExperimentConfig {
  ModelSpec model = TwoQubitXYZParams{};
  TemperatureGrid grid;
  /// Empty means the identity order 1..N.
  std::vector<GreedyPath> paths;
  MeasurementMode mode = MeasurementMode::sld_eigenbasis;
  DerivativePolicy derivative;
  std::string output;  // empty: stdout

  void validate() const;
  std::vector<GreedyPath> resolved_paths() const;
};

/// TOML layout:
///   [model]        kind = "two_qubit" | "chain" | "anisotropic", plus parameters
///   [temperature]  min, max, count, spacing = "log" | "linear"
///   [measurement]  mode = "sld" | "reduced_state", paths = ["123", ...]
///   [derivative]   relative_step, richardson
///   [output]       path
/// Throws UsageError with a diagnostic on malformed input.
ExperimentConfig parse_config(std::string_view toml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct PathColumns {
  std::optional<double> F_locc;
  std::optional<double> delta_F;
  std::optional<double> diag_discord;
  std::optional<double> minus_dD_over_T;
  std::optional<double> relative_metric;
};

struct SweepRecord {
  std::vector<std::pair<std::string, double>> parameters;
  double temperature = 0.0;
  std::optional<double> F_global;
  std::vector<std::optional<double>> F_local;  // per subsystem
  std::vector<PathColumns> paths;
  /// Bipartition with A = the first subsystem of the first path.
  std::optional<double> I_AB;
  std::optional<double> J_BA;
  std::optional<double> D;
  std::optional<double> diag_discord_symmetric;
  bool high_temperature = false;
  std::string status = "ok";
};

/// One grid point. Numerical failures are caught and recorded in `status`.
SweepRecord compute_point(const ExperimentConfig& config, std::shared_ptr<const ThermalModel> model,
                          double T);

/// All grid points, in grid order regardless of `jobs`.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, int jobs = 1);

std::vector<std::string> sweep_header(const ExperimentConfig& config);
std::vector<std::string> sweep_row(const SweepRecord& record);

/// Header comment (unless reproducible), header row, one row per record.
void write_sweep_csv(std::ostream& out, const ExperimentConfig& config,
                     const std::vector<SweepRecord>& records, bool reproducible);

/// Runs `work(i)` for i in [0, n) on up to `jobs` threads.
void parallel_for(int n, int jobs, const std::function<void(int)>& work);

}  // namespace qtherm
