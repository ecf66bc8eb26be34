#include "qtherm/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "qtherm/correlations.hpp"
#include "qtherm/csv.hpp"
#include "qtherm/errors.hpp"
#include "qtherm/figures.hpp"
#include "qtherm/high_temperature.hpp"

namespace qtherm {

namespace oracle {

double fidelity_qfi(const StateFamily& family, double T, double step) {
  const DensityMatrix rho = family(T);
  const double self = fidelity(rho, rho);
  auto second = [&](double e) {
    const double up = fidelity(rho, family(T + e));
    const double down = fidelity(rho, family(T - e));
    return (up - 2.0 * self + down) / (e * e);
  };
  const double e = step * T;
  const double coarse = second(e);
  const double fine = second(0.5 * e);
  return -2.0 * (4.0 * fine - coarse) / 3.0;
}

double joint_distribution_fisher(std::shared_ptr<const ThermalModel> model, double T,
                                 const MeasurementScheme& scheme, double step) {
  const SubsystemLayout& layout = model->layout();
  const int n = layout.size();
  std::map<std::vector<int>, const MeasurementBranch*> by_prefix;
  for (const auto& b : scheme.branches) by_prefix[b.outcomes] = &b;

  // Every complete outcome record corresponds to one product vector.
  std::vector<CVector> records;
  std::vector<CVector> chosen(static_cast<std::size_t>(n));
  std::function<void(std::vector<int>)> walk = [&](std::vector<int> prefix) {
    if (static_cast<int>(prefix.size()) == n) {
      CVector psi = chosen[0];
      for (int s = 1; s < n; ++s) {
        const CVector prev = psi;
        psi = CVector(prev.size() * chosen[static_cast<std::size_t>(s)].size());
        for (Eigen::Index a = 0; a < prev.size(); ++a) {
          psi.segment(a * chosen[static_cast<std::size_t>(s)].size(),
                      chosen[static_cast<std::size_t>(s)].size()) =
              prev(a) * chosen[static_cast<std::size_t>(s)];
        }
      }
      records.push_back(psi);
      return;
    }
    const auto it = by_prefix.find(prefix);
    if (it == by_prefix.end()) return;  // branch skipped as improbable
    const ProjectorSet& proj = it->second->projectors;
    for (int j = 0; j < proj.size(); ++j) {
      chosen[static_cast<std::size_t>(proj.subsystem())] = proj.vector(j);
      auto next = prefix;
      next.push_back(j);
      walk(next);
    }
  };
  walk({});

  auto probabilities = [&](double t) {
    const CMatrix rho = gibbs(model, t).state.matrix();
    std::vector<double> p;
    for (const auto& psi : records) p.push_back((psi.adjoint() * rho * psi)(0, 0).real());
    return p;
  };
  const double h = step * T;
  const auto p0 = probabilities(T);
  const auto p1 = probabilities(T + h);
  const auto m1 = probabilities(T - h);
  const auto p2 = probabilities(T + 2.0 * h);
  const auto m2 = probabilities(T - 2.0 * h);
  double fisher = 0.0;
  for (std::size_t i = 0; i < p0.size(); ++i) {
    if (p0[i] < 1e-14) continue;
    const double dp = (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h);
    fisher += dp * dp / p0[i];
  }
  return fisher;
}

HermitianOperator random_hermitian(int qubits, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const SubsystemLayout layout = SubsystemLayout::qubits(qubits);
  const int d = layout.total();
  CMatrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  }
  return {0.5 * (a + a.adjoint()), layout};
}

}  // namespace oracle

namespace {

using Clock = std::chrono::steady_clock;

double rel(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

std::shared_ptr<const ThermalModel> make_model(const PartitionedHamiltonian& h) {
  return std::make_shared<const ThermalModel>(h);
}

std::shared_ptr<const ThermalModel> make_model(const TwoQubitXYZParams& p) {
  return make_model(build_two_qubit(p));
}

const TwoQubitXYZParams kFig2a{3.0, 1.0, 1.0, 1.0, 2.0};
const TwoQubitXYZParams kFig2b{0.0, 0.0, 1.0, 0.0, 2.0};

struct Worst {
  double value = 0.0;
  std::string where;
  void update(double v, const std::string& at) {
    if (!(v <= value)) {  // NaN wins
      value = v;
      where = at;
    }
  }
};

CriterionResult begin(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

class Suite {
 public:
  explicit Suite(const AcceptanceOptions& options) : options_(options) {}

  double greedy(const GibbsEnsemble& ens, const GreedyPath& path,
                MeasurementMode mode = MeasurementMode::sld_eigenbasis) const {
    if (options_.hooks.greedy_qfi) return options_.hooks.greedy_qfi(ens, path, mode);
    return greedy_locc_qfi(ens, path, mode);
  }

  double delta_F(const std::shared_ptr<const ThermalModel>& model, const GreedyPath& path,
                 double T) const {
    const GibbsEnsemble ens = gibbs(model, T);
    return qfi_gibbs(ens) - greedy(ens, path);
  }

  CriterionResult gibbs_qfi_consistency() const {
    CriterionResult r = begin(1, "gibbs_qfi_consistency");
    Worst worst;
    for (int i = 0; i < 20; ++i) {
      const int qubits = 1 + i % 3;
      const HermitianOperator h = oracle::random_hermitian(qubits, 1000 + static_cast<unsigned>(i));
      const auto model = make_model(unsplit(h));
      const double norm = spectral_norm(h);
      const StateFamily family = [model](double t) { return gibbs(model, t).state; };
      for (double factor : {0.5, 2.0, 10.0}) {
        const double T = factor * norm;
        const double a = qfi_gibbs(gibbs(model, T));
        const double b = qfi_general(family, T);
        const double c = oracle::fidelity_qfi(family, T);
        const std::string at = "H#" + std::to_string(i) + " d=" + std::to_string(1 << qubits) +
                               " T=" + fmt(factor) + "|H|";
        worst.update(std::max({rel(a, b), rel(a, c), rel(b, c)}), at);
      }
    }
    r.pass = worst.value <= 1e-6;
    r.detail = "max pairwise rel diff " + fmt(worst.value) + " at " + worst.where + " (tol 1e-6)";
    return r;
  }

  CriterionResult greedy_additivity() const {
    CriterionResult r = begin(2, "greedy_additivity");
    const auto model = make_model(kFig2a);
    const GreedyPath path = GreedyPath::identity(2);
    Worst worst;
    for (MeasurementMode mode : {MeasurementMode::sld_eigenbasis, MeasurementMode::reduced_state_eigenbasis}) {
      for (double T : {1.0, 2.0, 10.0}) {
        const GibbsEnsemble ens = gibbs(model, T);
        const GreedyResult g = greedy_locc(ens, path, mode);
        const double value = greedy(ens, path, mode);
        const double joint = oracle::joint_distribution_fisher(model, T, g.scheme);
        worst.update(rel(value, joint), to_string(mode) + " T=" + fmt(T));
      }
    }
    r.pass = worst.value <= 1e-8;
    r.detail = "max rel diff vs joint-outcome Fisher " + fmt(worst.value) + " at " + worst.where +
               " (tol 1e-8)";
    return r;
  }

  CriterionResult xstate_leading_order() const {
    CriterionResult r = begin(3, "xstate_leading_order");
    const auto model = make_model(kFig2a);
    const GreedyPath path = GreedyPath::identity(2);
    const double T = 100.0;
    const double c = xstate_leading_terms(kFig2a).delta_F;
    const double t4 = std::pow(T, 4);
    const double dF = delta_F(model, path, T);
    const double m = discord_temperature_derivative(model, path, T);
    const double e1 = std::abs(t4 * dF - c) / c;
    const double e2 = std::abs(t4 * m - c) / c;
    const double e3 = std::abs(dF - m) / std::min(std::abs(dF), std::abs(m));
    r.pass = e1 <= 0.05 && e2 <= 0.05 && e3 <= 0.05;
    r.detail = "T^4 dF=" + fmt(t4 * dF) + " T^4 m=" + fmt(t4 * m) + " vs " + fmt(c) +
               "; |dF-m|/min=" + fmt(e3) + " (tol 5%)";
    return r;
  }

  CriterionResult correlation_asymptotics() const {
    CriterionResult r = begin(4, "correlation_asymptotics");
    const auto model = make_model(kFig2a);
    const double T = 100.0;
    const double t4 = std::pow(T, 4);
    const XStateCoefficients c = xstate_leading_terms(kFig2a);
    const double dI = t4 * mutual_information_temperature_derivative(model, {}, T);
    const double dJ = t4 * classical_correlation_temperature_derivative(model, {}, T);
    const double eI = std::abs(dI - c.mutual_information) / c.mutual_information;
    const double eJ = std::abs(dJ - c.classical_correlation) / c.classical_correlation;
    r.pass = eI <= 0.05 && eJ <= 0.05;
    r.detail = "T^4(-dI/T dT)=" + fmt(dI) + " vs " + fmt(c.mutual_information) +
               "; T^4(-dJ/T dT)=" + fmt(dJ) + " vs " + fmt(c.classical_correlation) + " (tol 5%)";
    return r;
  }

  CriterionResult sech_exact_case() const {
    CriterionResult r = begin(5, "sech_exact_case");
    const auto model = make_model(kFig2b);
    const GreedyPath path = GreedyPath::identity(2);
    Worst worst;
    for (double T : {0.5, 2.0, 10.0}) {
      const double exact = sech_exact(kFig2b.Jx, T);
      worst.update(rel(delta_F(model, path, T), exact), "dF T=" + fmt(T));
      worst.update(rel(discord_temperature_derivative(model, path, T), exact), "m T=" + fmt(T));
    }
    r.pass = worst.value <= 1e-5;
    r.detail = "max rel diff vs closed form " + fmt(worst.value) + " at " + worst.where + " (tol 1e-5)";
    return r;
  }

  CriterionResult ising_exactness() const {
    CriterionResult r = begin(6, "ising_exactness");
    const GreedyPath path = GreedyPath::identity(2);
    Worst worst;
    const std::vector<TwoQubitXYZParams> battery{
        {1.0, 0.5, 0.0, 0.0, 2.0}, {0.0, 0.0, 0.0, 0.0, 1.0}, {-0.7, 1.3, 0.0, 0.0, -1.5}};
    for (std::size_t b = 0; b < battery.size(); ++b) {
      const auto model = make_model(battery[b]);
      for (double T : {0.5, 2.0, 10.0}) {
        const std::string at = "#" + std::to_string(b) + " T=" + fmt(T);
        const GibbsEnsemble ens = gibbs(model, T);
        worst.update(std::abs(delta_F(model, path, T)), "dF " + at);
        worst.update(std::abs(quantum_discord(ens.state)), "D " + at);
        worst.update(std::abs(diagonal_discord(ens.state)), "diagD " + at);
        worst.update(std::abs(discord_temperature_derivative(model, path, T)), "m " + at);
      }
    }
    r.pass = worst.value <= 1e-10;
    r.detail = "max |value| " + fmt(worst.value) + " at " + worst.where + " (tol 1e-10)";
    return r;
  }

  CriterionResult three_qubit_chain() const {
    CriterionResult r = begin(7, "three_qubit_chain");
    ChainParams p;
    p.N = 3;
    p.B = 1.0;
    p.J = 1.0;
    p.alpha = 0.3;
    const auto model = make_model(build_chain(p));
    const double T = 100.0;
    const double t4 = std::pow(T, 4);
    const GreedyPath p123 = GreedyPath::parse("123");
    const double dF = t4 * delta_F(model, p123, T);
    const double m = t4 * discord_temperature_derivative(model, p123, T);
    const double j2 = p.J * p.J;
    const bool lead = std::abs(dF - j2) <= 0.05 * j2 && std::abs(m - j2) <= 0.05 * j2;

    Worst worst;
    const GreedyPath p132 = GreedyPath::parse("132");
    const GreedyPath p213 = GreedyPath::parse("213");
    for (double t : {0.5, 1.0, 2.0, 10.0, 100.0}) {
      const GibbsEnsemble ens = gibbs(model, t);
      worst.update(rel(delta_F(model, p132, t), delta_F(model, p213, t)), "dF T=" + fmt(t));
      worst.update(rel(multipartite_diagonal_discord(ens, p132), multipartite_diagonal_discord(ens, p213)),
                   "diagD T=" + fmt(t));
      worst.update(rel(discord_temperature_derivative(model, p132, t),
                       discord_temperature_derivative(model, p213, t)),
                   "m T=" + fmt(t));
    }
    r.pass = lead && worst.value <= 1e-8;
    r.detail = "T^4 dF_123=" + fmt(dF) + " T^4 m_123=" + fmt(m) + " vs J^2=" + fmt(j2) +
               " (tol 5%); paths 132/213 max rel diff " + fmt(worst.value) + " at " + worst.where +
               " (tol 1e-8)";
    return r;
  }

  CriterionResult order_checks() const {
    CriterionResult r = begin(8, "order_checks");
    std::vector<std::pair<std::string, PartitionedHamiltonian>> models{
        {"fig2a", build_two_qubit(kFig2a)},
        {"fig2b", build_two_qubit(kFig2b)},
        {"ising", build_two_qubit({1.0, 0.5, 0.0, 0.0, 2.0})},
        {"anisotropic", build_anisotropic(1.0, 0.5, 1.0)},
    };
    for (double B : {1.0, 2.0}) {
      ChainParams p;
      p.N = 3;
      p.B = B;
      p.alpha = 0.3;
      models.push_back({"chain B=" + fmt(B), build_chain(p)});
    }
    ChainParams four;
    four.N = 4;
    four.B = 0.5;
    models.push_back({"chain N=4", build_chain(four)});

    bool pass = true;
    Worst qfi;
    for (const auto& [name, h] : models) {
      const auto model = make_model(h);
      const AsymptoticCheck c = order_check_qfi(model, 100.0 * spectral_norm(h.total));
      qfi.update(c.residual, name);
      pass = pass && c.pass;
    }

    const auto fig2a = make_model(kFig2a);
    std::vector<double> prob_ratios;
    for (double T : {50.0, 100.0}) {
      const AsymptoticCheck c = order_check_probability_term(fig2a, T);
      pass = pass && c.pass && !c.vacuous;
      prob_ratios.insert(prob_ratios.end(), c.doubling_ratios.begin(), c.doubling_ratios.end());
    }
    const AsymptoticCheck id =
        order_check_identity(fig2a, GreedyPath::identity(2), {25.0, 50.0, 100.0, 200.0});
    pass = pass && id.pass && !id.vacuous;

    std::string ratios;
    for (double v : prob_ratios) ratios += " " + fmt(v);
    std::string id_ratios;
    for (double v : id.doubling_ratios) id_ratios += " " + fmt(v);
    r.pass = pass;
    r.detail = "T^4 F vs spectral variance worst " + fmt(qfi.value) + " (" + qfi.where +
               ", tol 5%); probability-term ratios" + ratios + "; identity ratios" + id_ratios +
               (id.regime_warning ? " (includes T below 10|H|)" : "") + " (range [0.3, 3])";
    return r;
  }

  CriterionResult bounds_battery() const {
    CriterionResult r = begin(9, "monotonicity_and_bounds");
    std::mt19937_64 rng(20240917);
    std::uniform_real_distribution<double> coupling(-2.0, 2.0);
    std::uniform_real_distribution<double> exponent(-0.7, 1.0);
    int violations = 0;
    std::string first;
    double slack_used = 0.0;
    for (int i = 0; i < 50; ++i) {
      PartitionedHamiltonian h;
      switch (i % 3) {
        case 0:
          h = build_two_qubit({coupling(rng), coupling(rng), coupling(rng), coupling(rng), coupling(rng)});
          break;
        case 1:
          h = build_anisotropic(1.0, coupling(rng), coupling(rng));
          break;
        default: {
          ChainParams p;
          p.N = 3;
          p.B = std::abs(coupling(rng));
          p.alpha = 0.5 * coupling(rng);
          h = build_chain(p);
        }
      }
      const auto model = make_model(h);
      const double T = spectral_norm(h.total) * std::pow(10.0, exponent(rng));
      const GibbsEnsemble ens = gibbs(model, T);
      const double fa = local_qfi(ens, 0);
      const double flocc = greedy(ens, GreedyPath::identity(h.layout().size()));
      const double fab = qfi_gibbs(ens);
      const DiscordReport d = discord_report(ens.state);
      const double checks[] = {fa - flocc, flocc - fab, -d.quantum_discord,
                               d.quantum_discord - d.diagonal_discord,
                               d.diagonal_discord - d.mutual_information};
      for (double excess : checks) {
        slack_used = std::max(slack_used, excess);
        if (excess > 1e-8) {
          ++violations;
          if (first.empty()) first = "case " + std::to_string(i) + " excess " + fmt(excess);
        }
      }
    }
    r.pass = violations == 0;
    r.detail = std::to_string(violations) + " violations over 50 cases x 5 inequalities; largest excess " +
               fmt(slack_used) + " (slack 1e-8)" + (first.empty() ? "" : "; first: " + first);
    return r;
  }

  CriterionResult figure_reproduction() const {
    CriterionResult r = begin(10, "figure_reproduction");
    const int parallel = std::max(2, options_.jobs);
    bool deterministic = true;
    std::map<std::string, CsvTable> tables;
    for (const auto& name : figure_names()) {
      const std::string serial = render_figure(name, 1);
      const std::string threaded = render_figure(name, parallel);
      deterministic = deterministic && serial == threaded && render_figure(name, 1) == serial;
      tables[name] = parse_csv(serial);
    }

    // Sech^2 columns of fig2b, path equality in fig3a, small metric in fig4b.
    Worst sech;
    {
      const CsvTable& t = tables["fig2b"];
      const auto cT = t.column("T"), cdF = t.column("delta_F_12"), cm = t.column("minus_dD_over_T_12");
      for (const auto& row : t.rows) {
        const double T = *parse_cell(row[cT]);
        const double exact = sech_exact(kFig2b.Jx, T);
        sech.update(std::max(rel(*parse_cell(row[cdF]), exact), rel(*parse_cell(row[cm]), exact)),
                    "T=" + fmt(T));
      }
    }
    Worst paths;
    {
      const CsvTable& t = tables["fig3a"];
      for (const char* col : {"delta_F_", "minus_dD_over_T_", "diag_discord_"}) {
        const auto a = t.column(std::string(col) + "132"), b = t.column(std::string(col) + "213");
        for (const auto& row : t.rows) {
          paths.update(rel(*parse_cell(row[a]), *parse_cell(row[b])), col + row[t.column("T")]);
        }
      }
    }
    double worst_metric = 0.0;
    int flagged = 0;
    std::size_t total = 0;
    {
      const CsvTable& t = tables["fig4b"];
      const auto cm = t.column("relative_metric"), cf = t.column("flagged");
      total = t.rows.size();
      for (const auto& row : t.rows) {
        if (row[cf] == "1") {
          ++flagged;
          continue;
        }
        worst_metric = std::max(worst_metric, parse_cell(row[cm]).value_or(INFINITY));
      }
    }
    r.pass = deterministic && sech.value <= 1e-5 && paths.value <= 1e-8 && worst_metric <= 0.2;
    r.detail = std::string(deterministic ? "six CSVs deterministic (jobs 1 vs " + std::to_string(parallel) + ")"
                                         : "NON-DETERMINISTIC output") +
               "; fig2b sech^2 max rel " + fmt(sech.value) + "; fig3a 132 vs 213 max rel " +
               fmt(paths.value) + "; fig4b metric max " + fmt(worst_metric) + " outside " +
               std::to_string(flagged) + "/" + std::to_string(total) + " flagged points (tol 0.2)";
    return r;
  }

 private:
  const AcceptanceOptions& options_;
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const Suite suite(options);
  using Member = CriterionResult (Suite::*)() const;
  const std::vector<std::pair<int, Member>> criteria{
      {1, &Suite::gibbs_qfi_consistency}, {2, &Suite::greedy_additivity},
      {3, &Suite::xstate_leading_order},  {4, &Suite::correlation_asymptotics},
      {5, &Suite::sech_exact_case},       {6, &Suite::ising_exactness},
      {7, &Suite::three_qubit_chain},     {8, &Suite::order_checks},
      {9, &Suite::bounds_battery},        {10, &Suite::figure_reproduction},
  };
  static const char* const names[] = {"",
                                      "gibbs_qfi_consistency",
                                      "greedy_additivity",
                                      "xstate_leading_order",
                                      "correlation_asymptotics",
                                      "sech_exact_case",
                                      "ising_exactness",
                                      "three_qubit_chain",
                                      "order_checks",
                                      "monotonicity_and_bounds",
                                      "figure_reproduction"};
  std::vector<CriterionResult> results;
  for (const auto& [id, member] : criteria) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    const auto start = Clock::now();
    CriterionResult r;
    try {
      r = (suite.*member)();
    } catch (const std::exception& e) {
      r = begin(id, names[id]);
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (options.on_result) options.on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

std::string summary_line(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS" : "FAIL") << "  " << std::setw(2) << r.id << " " << std::left << std::setw(26)
    << r.name << std::right << " (" << std::fixed << std::setprecision(1) << r.seconds << " s)  "
    << r.detail;
  return s.str();
}

void write_acceptance_csv(std::ostream& out, const std::vector<CriterionResult>& results) {
  write_csv_row(out, {"id", "name", "pass", "seconds", "detail"});
  for (const auto& r : results) {
    std::string detail = r.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    write_csv_row(out, {std::to_string(r.id), r.name, r.pass ? "1" : "0", format_double(r.seconds), detail});
  }
}

}  // namespace qtherm
