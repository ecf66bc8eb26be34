#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtherm/acceptance.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/figures.hpp"
#include "qtherm/sweep.hpp"
#include "support.hpp"

using namespace qtherm;

namespace {

const std::filesystem::path kData = QTHERM_TEST_DATA;

std::string render(const ExperimentConfig& config, int jobs) {
  std::ostringstream out;
  write_sweep_csv(out, config, run_sweep(config, jobs), true);
  return out.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(QTHERM_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = load_config(kData / "golden.toml");
  const auto& p = std::get<TwoQubitXYZParams>(c.model);
  CHECK(p.B1 == 3.0);
  CHECK(p.Jz == 2.0);
  CHECK(c.grid.count == 12);
  CHECK(c.grid.spacing == Spacing::log);
  REQUIRE(c.paths.size() == 2);
  CHECK(c.paths[1].to_string() == "21");
  CHECK(c.mode == MeasurementMode::sld_eigenbasis);

  const ExperimentConfig chain = parse_config(
      "[model]\nkind = \"chain\"\nN = 4\nB = 1.5\n[measurement]\nmode = \"reduced_state\"\n"
      "[derivative]\nrelative_step = 1e-3\nrichardson = false\n");
  CHECK(std::get<ChainParams>(chain.model).N == 4);
  CHECK(chain.mode == MeasurementMode::reduced_state_eigenbasis);
  CHECK(chain.derivative.relative_step == 1e-3);
  CHECK_FALSE(chain.derivative.richardson);
  CHECK(chain.resolved_paths().front().to_string() == "1234");
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(load_config(kData / "bad_key.toml"), UsageError);
  CHECK_THROWS_AS(load_config(kData / "missing.toml"), UsageError);
  CHECK_THROWS_AS(parse_config("[temperature]\nmin = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[model]\nkind = \"ladder\"\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[model]\nkind = \"two_qubit\"\n[temperature]\nmin = -1\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[model]\nkind = \"two_qubit\"\n[temperature]\nmin = 2\nmax = 1\n"),
                  UsageError);
  CHECK_THROWS_AS(parse_config("[model]\nkind = \"two_qubit\"\n[measurement]\npaths = [\"123\"]\n"),
                  UsageError);
  CHECK_THROWS_AS(parse_config("[model]\nkind = \"two_qubit\"\nJx = \"one\"\n"), UsageError);
  CHECK_THROWS_AS(parse_config("[model\nkind = 1"), UsageError);
  CHECK_THROWS_AS(parse_config("[model]\nkind = \"chain\"\nN = 1\n"), UsageError);
}

TEST_CASE("temperature grid") {
  TemperatureGrid g;
  g.min = 0.5;
  g.max = 50.0;
  g.count = 5;
  const auto v = g.values();
  CHECK(v.front() == 0.5);
  CHECK(v.back() == 50.0);
  CHECK(v[2] == doctest::Approx(5.0));
  g.spacing = Spacing::linear;
  CHECK(g.values()[1] == doctest::Approx(12.875));
}

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 1e-17}) {
    const std::string s = format_double(x);
    CHECK(parse_cell(s).value() == x);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_double(-0.0) == "0");
  CHECK(format_cell(std::nullopt) == "NA");
  CHECK(format_cell(std::numeric_limits<double>::quiet_NaN()) == "NA");
  CHECK_FALSE(parse_cell("NA").has_value());
  CHECK_THROWS_AS(parse_cell("1.5x"), UsageError);
}

TEST_CASE("csv round-trip") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"1", "NA"}, {"2.5", "-3"}};
  std::ostringstream out;
  out << "# comment\n";
  write_csv(out, t);
  const CsvTable back = parse_csv(out.str() + "\r\n");
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("b") == 1);
  CHECK_THROWS_AS(back.column("c"), UsageError);
}

TEST_CASE("sweeps are deterministic and independent of thread count") {
  ExperimentConfig c = load_config(kData / "golden.toml");
  c.grid.count = 6;
  const std::string one = render(c, 1);
  CHECK(one == render(c, 1));
  CHECK(one == render(c, 4));
  CHECK(one.find("generated_at") == std::string::npos);
}

TEST_CASE("sweep columns") {
  const ExperimentConfig c = load_config(kData / "golden.toml");
  const auto h = sweep_header(c);
  CHECK(h.front() == "B1");
  CHECK(std::find(h.begin(), h.end(), "F_local_2") != h.end());
  CHECK(std::find(h.begin(), h.end(), "relative_metric_21") != h.end());
  CHECK(h.back() == "status");
}

TEST_CASE("Ising sweep has no precision loss and no discord") {
  const ExperimentConfig c = load_config(kData / "ising.toml");
  std::ostringstream out;
  write_sweep_csv(out, c, run_sweep(c, 2), true);
  const CsvTable t = parse_csv(out.str());
  REQUIRE(t.rows.size() == 8);
  for (const auto& row : t.rows) {
    CHECK(row[t.column("status")] == "ok");
    for (const char* col : {"delta_F_12", "diag_discord_12", "minus_dD_over_T_12", "D"}) {
      CHECK(std::abs(parse_cell(row[t.column(col)]).value()) < 1e-10);
    }
    CHECK(row[t.column("relative_metric_12")] == "NA");
    const double F = parse_cell(row[t.column("F_global")]).value();
    const double Fl = parse_cell(row[t.column("F_locc_12")]).value();
    CHECK(testing::rel(F, Fl) < 1e-9);
  }
}

TEST_CASE("sweep matches the stored reference output") {
  const ExperimentConfig c = load_config(kData / "golden.toml");
  const CsvTable now = parse_csv(render(c, 2));
  std::ifstream in(kData / "golden.csv");
  REQUIRE(in.good());
  const CsvTable ref = read_csv(in);
  REQUIRE(now.header == ref.header);
  REQUIRE(now.rows.size() == ref.rows.size());
  for (std::size_t i = 0; i < ref.rows.size(); ++i) {
    for (std::size_t k = 0; k < ref.header.size(); ++k) {
      const std::string& a = now.rows[i][k];
      const std::string& b = ref.rows[i][k];
      if (ref.header[k] == "regime" || ref.header[k] == "status" || b == "NA") {
        CHECK(a == b);
        continue;
      }
      const double x = parse_cell(a).value(), y = parse_cell(b).value();
      CHECK_MESSAGE(std::abs(x - y) <= 1e-9 * std::max(std::abs(y), 1e-6), ref.header[k], " row ", i);
    }
  }
}

TEST_CASE("figure presets") {
  CHECK(figure_names().size() == 6);
  CHECK_THROWS_AS(render_figure("fig9"), UsageError);
  const ExperimentConfig c = figure_config("fig3a");
  CHECK(std::get<ChainParams>(c.model).N == 3);
  CHECK(anisotropy_flagged(1.0, 0.0, 0.5, 0.5, 0.1));
  CHECK_FALSE(anisotropy_flagged(1.0, 0.0, 0.5, 2.0, 0.1));
  CHECK(anisotropy_flagged(1.0, 0.0, 0.5, 2.0, std::nullopt));
}

TEST_CASE("command line exit codes") {
  const auto out = std::filesystem::temp_directory_path() / "qtherm_cli_test";
  std::filesystem::create_directories(out);
  CHECK(cli("--help") == 0);
  CHECK(cli("figure fig9 --out-dir " + out.string()) == 2);
  CHECK(cli("compute --config " + (kData / "bad_key.toml").string()) == 2);
  CHECK(cli("compute --config " + (kData / "ising.toml").string() + " --reproducible --out " +
            (out / "ising.csv").string()) == 0);
  CHECK(std::filesystem::exists(out / "ising.csv"));
  CHECK(cli("compute") == 2);
  CHECK(cli("frobnicate") == 2);
  std::filesystem::remove_all(out);
}

TEST_CASE("acceptance suite rejects a greedy scheme that drops the feed-forward") {
  // F_A + F_{B|A} replaced by F_A - F_{B|A}: the suite must notice
  AcceptanceOptions options;
  options.only = {2, 3, 5};
  options.hooks.greedy_qfi = [](const GibbsEnsemble& ens, const GreedyPath& path, MeasurementMode mode) {
    const GreedyResult g = greedy_locc(ens, path, mode);
    double out = g.step_terms.front();
    for (std::size_t k = 1; k < g.step_terms.size(); ++k) out -= g.step_terms[k];
    return out;
  };
  const auto results = run_acceptance(options);
  REQUIRE(results.size() == 3);
  for (const auto& r : results) CHECK_MESSAGE(!r.pass, "criterion ", r.id);
}

TEST_CASE("acceptance suite passes its cheap criteria unmodified") {
  AcceptanceOptions options;
  options.only = {3, 5, 6};
  for (const auto& r : run_acceptance(options)) CHECK_MESSAGE(r.pass, r.detail);
}
