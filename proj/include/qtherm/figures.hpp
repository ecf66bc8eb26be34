#pragma once

// Figure presets and their CSV renderings.

#include <optional>
#include <string>
#include <vector>

#include "qtherm/sweep.hpp"

namespace qtherm {

/// fig2a, fig2b, fig3a, fig3b, fig4a, fig4b.
const std::vector<std::string>& figure_names();

/// Sweep config behind a temperature-curve figure (fig2*, fig3*).
ExperimentConfig figure_config(const std::string& name);

struct AnisotropyPoint {
  double lambda = 0.0;  // in units of J
  double Jz = 0.0;      // in units of J
  double temperature = 0.0;
  double delta_F = 0.0;
  double minus_dD_over_T = 0.0;
  std::optional<double> relative_metric;
  bool flagged = false;
  std::string status = "ok";
};

struct AnisotropyGridOptions {
  double temperature = 2.0;  // in units of J
  int points = 21;           // per axis
  double extent = 2.0;       // lambda/J and Jz/J in [-extent, extent]
};

/// A point is flagged when some coupling exceeds the temperature,
/// T < max(|J + lambda|, |J - lambda|, |Jz|), or when the metric is not
/// defined. Flagged points are outside the high-temperature picture.
bool anisotropy_flagged(double J, double lambda, double Jz, double T,
                        const std::optional<double>& metric);

std::vector<AnisotropyPoint> anisotropy_grid(const AnisotropyGridOptions& options, int jobs = 1);

void write_anisotropy_csv(std::ostream& out, const std::vector<AnisotropyPoint>& points);

/// CSV text of a figure; identical on every call. Throws UsageError for an
/// unknown name.
std::string render_figure(const std::string& name, int jobs = 1);

}  // namespace qtherm
