#include "qtherm/figures.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "qtherm/errors.hpp"
#include "qtherm/high_temperature.hpp"

namespace qtherm {

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names{"fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b"};
  return names;
}

ExperimentConfig figure_config(const std::string& name) {
  ExperimentConfig config;
  config.grid = TemperatureGrid{0.1, 100.0, 200, Spacing::log};
  if (name == "fig2a") {
    config.model = TwoQubitXYZParams{3.0, 1.0, 1.0, 1.0, 2.0};
  } else if (name == "fig2b") {
    config.model = TwoQubitXYZParams{0.0, 0.0, 1.0, 0.0, 2.0};
  } else if (name == "fig3a" || name == "fig3b") {
    ChainParams chain;
    chain.N = 3;
    chain.J = 1.0;
    chain.alpha = 0.3;
    chain.B = name == "fig3a" ? 1.0 : 2.0;
    config.model = chain;
    config.paths = {GreedyPath::parse("123"), GreedyPath::parse("132"), GreedyPath::parse("213")};
  } else {
    throw UsageError("no sweep preset for figure '" + name + "'");
  }
  return config;
}

bool anisotropy_flagged(double J, double lambda, double Jz, double T,
                        const std::optional<double>& metric) {
  const double coupling = std::max({std::abs(J + lambda), std::abs(J - lambda), std::abs(Jz)});
  return !metric || T < coupling;
}

std::vector<AnisotropyPoint> anisotropy_grid(const AnisotropyGridOptions& options, int jobs) {
  if (options.points < 2) throw UsageError("anisotropy grid needs at least two points per axis");
  if (!(options.temperature > 0.0)) throw DomainError("temperature must be positive");
  const int n = options.points;
  const double J = 1.0;
  std::vector<AnisotropyPoint> points(static_cast<std::size_t>(n * n));
  const GreedyPath path = GreedyPath::identity(2);
  parallel_for(n * n, jobs, [&](int idx) {
    const int i = idx / n;
    const int j = idx % n;
    AnisotropyPoint& pt = points[static_cast<std::size_t>(idx)];
    pt.lambda = -options.extent + 2.0 * options.extent * i / (n - 1);
    pt.Jz = -options.extent + 2.0 * options.extent * j / (n - 1);
    pt.temperature = options.temperature;
    try {
      const auto model = std::make_shared<const ThermalModel>(build_anisotropic(J, pt.lambda, pt.Jz));
      const IdentityComparison c = identity_comparison(model, path, options.temperature);
      pt.delta_F = c.delta_F;
      pt.minus_dD_over_T = c.minus_dD_over_T;
      pt.relative_metric = c.relative_metric;
    } catch (const Error& e) {
      pt.status = std::string("failed: ") + e.what();
      std::replace(pt.status.begin(), pt.status.end(), ',', ';');
    }
    pt.flagged = anisotropy_flagged(J, pt.lambda, pt.Jz, options.temperature, pt.relative_metric) ||
                 pt.status != "ok";
  });
  return points;
}

void write_anisotropy_csv(std::ostream& out, const std::vector<AnisotropyPoint>& points) {
  write_csv_row(out, {"lambda", "Jz", "T", "delta_F", "minus_dD_over_T", "relative_metric", "flagged",
                      "status"});
  for (const auto& p : points) {
    write_csv_row(out, {format_double(p.lambda), format_double(p.Jz), format_double(p.temperature),
                        format_double(p.delta_F), format_double(p.minus_dD_over_T),
                        format_cell(p.relative_metric), p.flagged ? "1" : "0", p.status});
  }
}

std::string render_figure(const std::string& name, int jobs) {
  std::ostringstream out;
  if (name == "fig4a" || name == "fig4b") {
    AnisotropyGridOptions options;
    options.temperature = name == "fig4a" ? 0.4 : 2.0;
    write_anisotropy_csv(out, anisotropy_grid(options, jobs));
    return out.str();
  }
  if (std::find(figure_names().begin(), figure_names().end(), name) == figure_names().end()) {
    throw UsageError("unknown figure '" + name + "'; expected one of fig2a fig2b fig3a fig3b fig4a fig4b");
  }
  const ExperimentConfig config = figure_config(name);
  write_sweep_csv(out, config, run_sweep(config, jobs), /*reproducible=*/true);
  return out.str();
}

}  // namespace qtherm
