#include "qtherm/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <toml.hpp>

#include "qtherm/correlations.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/high_temperature.hpp"

namespace qtherm {

void TemperatureGrid::validate() const {
  if (count < 2) throw UsageError("temperature grid needs count >= 2");
  if (!std::isfinite(min) || !std::isfinite(max)) throw UsageError("temperature bounds must be finite");
  if (!(min > 0.0)) throw UsageError("temperature minimum must be positive");
  if (!(max > min)) throw UsageError("temperature maximum must exceed the minimum");
}

std::vector<double> TemperatureGrid::values() const {
  validate();
  std::vector<double> t(static_cast<std::size_t>(count));
  const double last = count - 1;
  for (int k = 0; k < count; ++k) {
    const double u = k / last;
    t[static_cast<std::size_t>(k)] = spacing == Spacing::log
                                         ? std::exp(std::log(min) + u * (std::log(max) - std::log(min)))
                                         : min + u * (max - min);
  }
  t.front() = min;
  t.back() = max;
  return t;
}

namespace {

int subsystem_count(const ModelSpec& spec) {
  if (const auto* chain = std::get_if<ChainParams>(&spec)) return chain->N;
  return 2;
}

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return text;
}

double number(const toml::table& table, std::string_view key, double fallback) {
  const toml::node* node = table.get(key);
  if (!node) return fallback;
  if (auto v = node->value<double>()) return *v;
  throw UsageError("'" + std::string(key) + "' must be a number");
}

long long integer(const toml::table& table, std::string_view key, long long fallback) {
  const toml::node* node = table.get(key);
  if (!node) return fallback;
  if (auto v = node->value_exact<int64_t>()) return *v;
  throw UsageError("'" + std::string(key) + "' must be an integer");
}

std::string text(const toml::table& table, std::string_view key, std::string fallback) {
  const toml::node* node = table.get(key);
  if (!node) return fallback;
  if (auto v = node->value_exact<std::string>()) return *v;
  throw UsageError("'" + std::string(key) + "' must be a string");
}

void reject_unknown(const toml::table& table, std::string_view section,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, node] : table) {
    bool ok = false;
    for (auto k : known) ok = ok || key.str() == k;
    if (!ok) {
      throw UsageError("unknown key '" + std::string(key.str()) + "' in [" + std::string(section) + "]");
    }
  }
}

const toml::table* section(const toml::table& root, std::string_view name) {
  const toml::node* node = root.get(name);
  if (!node) return nullptr;
  if (const auto* t = node->as_table()) return t;
  throw UsageError("[" + std::string(name) + "] must be a table");
}

ModelSpec parse_model(const toml::table& t) {
  const std::string kind = text(t, "kind", "");
  if (kind == "two_qubit") {
    reject_unknown(t, "model", {"kind", "B1", "B2", "Jx", "Jy", "Jz"});
    return TwoQubitXYZParams{number(t, "B1", 0), number(t, "B2", 0), number(t, "Jx", 0),
                             number(t, "Jy", 0), number(t, "Jz", 0)};
  }
  if (kind == "chain") {
    reject_unknown(t, "model", {"kind", "N", "B", "J", "alpha", "max_dimension"});
    ChainParams p;
    p.N = static_cast<int>(integer(t, "N", p.N));
    p.B = number(t, "B", p.B);
    p.J = number(t, "J", p.J);
    p.alpha = number(t, "alpha", p.alpha);
    p.max_dimension = static_cast<int>(integer(t, "max_dimension", p.max_dimension));
    return p;
  }
  if (kind == "anisotropic") {
    reject_unknown(t, "model", {"kind", "J", "lambda", "Jz"});
    return AnisotropicParams{number(t, "J", 1), number(t, "lambda", 0), number(t, "Jz", 0)};
  }
  throw UsageError("[model] kind must be two_qubit, chain or anisotropic (got '" + kind + "')");
}

}  // namespace

void ExperimentConfig::validate() const {
  grid.validate();
  for (const auto& [name, value] : model_parameters(model)) {
    if (!std::isfinite(value)) throw UsageError("model parameter " + name + " is not finite");
  }
  if (const auto* chain = std::get_if<ChainParams>(&model); chain && chain->N < 2) {
    throw UsageError("chain needs N >= 2");
  }
  if (!(derivative.relative_step > 0.0 && derivative.relative_step < 0.5)) {
    throw UsageError("derivative relative_step must be in (0, 0.5)");
  }
  const int n = subsystem_count(model);
  for (const auto& p : paths) {
    if (p.size() != n) throw UsageError("path " + p.to_string() + " does not cover every subsystem");
  }
}

std::vector<GreedyPath> ExperimentConfig::resolved_paths() const {
  if (!paths.empty()) return paths;
  return {GreedyPath::identity(subsystem_count(model))};
}

ExperimentConfig parse_config(std::string_view toml_text) {
  toml::table root;
  try {
    root = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config parse error: " << e.description() << " (line " << e.source().begin.line << ")";
    throw UsageError(msg.str());
  }
  reject_unknown(root, "root", {"model", "temperature", "measurement", "derivative", "output"});

  ExperimentConfig config;
  const toml::table* model = section(root, "model");
  if (!model) throw UsageError("config needs a [model] table");
  config.model = parse_model(*model);

  if (const auto* t = section(root, "temperature")) {
    reject_unknown(*t, "temperature", {"min", "max", "count", "spacing"});
    config.grid.min = number(*t, "min", config.grid.min);
    config.grid.max = number(*t, "max", config.grid.max);
    config.grid.count = static_cast<int>(integer(*t, "count", config.grid.count));
    const std::string spacing = text(*t, "spacing", "log");
    if (spacing == "log") {
      config.grid.spacing = Spacing::log;
    } else if (spacing == "linear") {
      config.grid.spacing = Spacing::linear;
    } else {
      throw UsageError("[temperature] spacing must be log or linear");
    }
  }
  if (const auto* t = section(root, "measurement")) {
    reject_unknown(*t, "measurement", {"mode", "paths"});
    config.mode = parse_measurement_mode(text(*t, "mode", to_string(config.mode)));
    if (const toml::node* paths = t->get("paths")) {
      const auto* array = paths->as_array();
      if (!array) throw UsageError("[measurement] paths must be an array of strings");
      for (const auto& item : *array) {
        auto s = item.value_exact<std::string>();
        if (!s) throw UsageError("[measurement] paths must be an array of strings");
        config.paths.push_back(GreedyPath::parse(*s));
      }
    }
  }
  if (const auto* t = section(root, "derivative")) {
    reject_unknown(*t, "derivative", {"relative_step", "richardson"});
    config.derivative.relative_step = number(*t, "relative_step", config.derivative.relative_step);
    if (const toml::node* r = t->get("richardson")) {
      auto b = r->value_exact<bool>();
      if (!b) throw UsageError("[derivative] richardson must be a boolean");
      config.derivative.richardson = *b;
    }
  }
  if (const auto* t = section(root, "output")) {
    reject_unknown(*t, "output", {"path"});
    config.output = text(*t, "path", "");
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

SweepRecord compute_point(const ExperimentConfig& config, std::shared_ptr<const ThermalModel> model,
                          double T) {
  SweepRecord blank;
  blank.parameters = model_parameters(config.model);
  blank.temperature = T;
  const auto paths = config.resolved_paths();
  const int n = model->layout().size();
  blank.F_local.assign(static_cast<std::size_t>(n), std::nullopt);
  blank.paths.assign(paths.size(), PathColumns{});

  SweepRecord r = blank;
  try {
    const GibbsEnsemble ens = gibbs(model, T);
    const double global = qfi_gibbs(ens);
    r.F_global = global;
    for (int k = 0; k < n; ++k) r.F_local[static_cast<std::size_t>(k)] = local_qfi(ens, k, config.derivative);

    for (std::size_t p = 0; p < paths.size(); ++p) {
      PathColumns& c = r.paths[p];
      const double locc = greedy_locc_qfi(ens, paths[p], config.mode, config.derivative);
      const double m = discord_temperature_derivative(model, paths[p], T, config.derivative);
      c.F_locc = locc;
      c.delta_F = global - locc;
      c.diag_discord = multipartite_diagonal_discord(ens, paths[p]);
      c.minus_dD_over_T = m;
      const double denominator = *c.delta_F + m;
      if (std::abs(denominator) >= identity_denominator_floor(global)) {
        c.relative_metric = std::abs((*c.delta_F - m) / denominator);
      }
    }

    const Bipartition split{{paths.front().order().front()}};
    const DiscordReport report = discord_report(ens.state, split);
    r.I_AB = report.mutual_information;
    r.J_BA = report.classical_correlation;
    r.D = report.quantum_discord;
    r.diag_discord_symmetric = symmetric_diagonal_discord(ens.state);
    r.high_temperature = in_high_temperature_regime(*model, T);
  } catch (const Error& e) {
    r = blank;
    r.status = "failed: " + sanitize(e.what());
  }
  return r;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& work) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  const int count = std::min(jobs, n);
  threads.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    threads.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          work(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, int jobs) {
  config.validate();
  const auto model = std::make_shared<const ThermalModel>(build(config.model));
  const std::vector<double> temps = config.grid.values();
  std::vector<SweepRecord> records(temps.size());
  parallel_for(static_cast<int>(temps.size()), jobs, [&](int i) {
    records[static_cast<std::size_t>(i)] = compute_point(config, model, temps[static_cast<std::size_t>(i)]);
  });
  return records;
}

std::vector<std::string> sweep_header(const ExperimentConfig& config) {
  std::vector<std::string> h;
  for (const auto& [name, value] : model_parameters(config.model)) h.push_back(name);
  h.push_back("T");
  h.push_back("F_global");
  for (int k = 0; k < subsystem_count(config.model); ++k) h.push_back("F_local_" + std::to_string(k + 1));
  for (const auto& path : config.resolved_paths()) {
    const std::string p = path.to_string();
    for (const char* col : {"F_locc_", "delta_F_", "diag_discord_", "minus_dD_over_T_", "relative_metric_"}) {
      h.push_back(col + p);
    }
  }
  for (const char* col : {"I_AB", "J_BA", "D", "diag_discord_symmetric", "regime", "status"}) h.push_back(col);
  return h;
}

std::vector<std::string> sweep_row(const SweepRecord& r) {
  std::vector<std::string> row;
  for (const auto& [name, value] : r.parameters) row.push_back(format_double(value));
  row.push_back(format_double(r.temperature));
  row.push_back(format_cell(r.F_global));
  for (const auto& f : r.F_local) row.push_back(format_cell(f));
  for (const auto& c : r.paths) {
    for (const auto* v : {&c.F_locc, &c.delta_F, &c.diag_discord, &c.minus_dD_over_T, &c.relative_metric}) {
      row.push_back(format_cell(*v));
    }
  }
  for (const auto* v : {&r.I_AB, &r.J_BA, &r.D, &r.diag_discord_symmetric}) row.push_back(format_cell(*v));
  row.push_back(r.high_temperature ? "high" : "low");
  row.push_back(r.status);
  return row;
}

void write_sweep_csv(std::ostream& out, const ExperimentConfig& config,
                     const std::vector<SweepRecord>& records, bool reproducible) {
  if (!reproducible) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    out << "# generated_at " << stamp << '\n';
  }
  out << "# model " << model_kind(config.model) << " mode " << to_string(config.mode) << '\n';
  write_csv_row(out, sweep_header(config));
  for (const auto& r : records) write_csv_row(out, sweep_row(r));
}

}  // namespace qtherm
