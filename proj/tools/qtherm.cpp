// qtherm: temperature-estimation sweeps, figure presets and the acceptance suite.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qtherm/acceptance.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/figures.hpp"
#include "qtherm/sweep.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qtherm::UsageError("cannot write " + path.string());
  out << text;
}

int run_compute(const std::string& config_path, const std::string& out_path, int jobs,
                bool reproducible, const std::string& mode) {
  qtherm::ExperimentConfig config = qtherm::load_config(config_path);
  if (!out_path.empty()) config.output = out_path;
  if (!mode.empty()) config.mode = qtherm::parse_measurement_mode(mode);

  const auto records = qtherm::run_sweep(config, jobs);
  std::ostringstream csv;
  qtherm::write_sweep_csv(csv, config, records, reproducible);
  if (config.output.empty()) {
    std::cout << csv.str();
  } else {
    write_file(config.output, csv.str());
  }

  const auto failed = std::count_if(records.begin(), records.end(),
                                    [](const qtherm::SweepRecord& r) { return r.status != "ok"; });
  if (failed > 0) std::cerr << "qtherm: " << failed << " of " << records.size() << " grid points failed\n";
  return failed == static_cast<long>(records.size()) ? kExitNumerical : 0;
}

int run_figure(const std::string& name, const std::string& out_dir, int jobs) {
  const std::string csv = qtherm::render_figure(name, jobs);
  const std::filesystem::path path = std::filesystem::path(out_dir) / (name + ".csv");
  write_file(path, csv);
  std::cout << path.string() << '\n';
  return 0;
}

int run_verify(const std::string& report, int jobs, const std::vector<int>& only) {
  qtherm::AcceptanceOptions options;
  options.jobs = jobs;
  options.only = only;
  options.on_result = [](const qtherm::CriterionResult& r) {
    std::cout << qtherm::summary_line(r) << std::endl;
  };
  const auto results = qtherm::run_acceptance(options);
  if (!report.empty()) {
    std::ostringstream csv;
    qtherm::write_acceptance_csv(csv, results);
    write_file(report, csv.str());
  }
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  std::cout << (ok ? "all checks passed" : "some checks FAILED") << '\n';
  return ok ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temperature-estimation precision and diagonal discord for Gibbs states"};
  app.require_subcommand(1);
  const int hardware = std::max(1u, std::thread::hardware_concurrency());

  std::string config_path, out_path, mode;
  int jobs = 1;
  bool reproducible = false;
  auto* compute = app.add_subcommand("compute", "Sweep temperatures for one model config");
  compute->add_option("--config", config_path, "TOML experiment config")->required()->check(CLI::ExistingFile);
  compute->add_option("--out", out_path, "CSV output path (overrides the config)");
  compute->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  compute->add_flag("--reproducible", reproducible, "Omit the timestamp comment");
  compute->add_option("--mode", mode, "Measurement mode: sld or reduced_state");

  std::string figure_name, out_dir = ".";
  int figure_jobs = hardware;
  auto* figure = app.add_subcommand("figure", "Write the CSV for a figure preset");
  figure->add_option("name", figure_name, "fig2a fig2b fig3a fig3b fig4a fig4b")->required();
  figure->add_option("--out-dir", out_dir, "Output directory");
  figure->add_option("--jobs", figure_jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string report;
  int verify_jobs = 1;
  std::vector<int> only;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_option("--report", report, "Also write a CSV report here");
  verify->add_option("--jobs", verify_jobs, "Worker threads for figure renders")->check(CLI::PositiveNumber);
  verify->add_option("--only", only, "Run only these criterion ids")->check(CLI::Range(1, 10));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*compute) return run_compute(config_path, out_path, jobs, reproducible, mode);
    if (*figure) return run_figure(figure_name, out_dir, figure_jobs);
    if (*verify) return run_verify(report, verify_jobs, only);
  } catch (const qtherm::UsageError& e) {
    std::cerr << "qtherm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "qtherm: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
