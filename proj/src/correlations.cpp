#include "qtherm/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>

#include "qtherm/errors.hpp"

namespace qtherm {

namespace {

double sum_conditional_entropy(const CMatrix& rho, const SubsystemLayout& layout, int s,
                               const CMatrix& basis) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    CMatrix rest = contract_subsystem(rho, layout, s, basis.col(j));
    const double p = rest.trace().real();
    if (p < kMinOutcomeProbability) continue;
    rest /= p;
    total += p * von_neumann_entropy(rest);
  }
  return total;
}

// Bloch angles of the qubit state proportional to v.
BlochMeasurement angles_of(const CVector& v) {
  const double a = std::abs(v(0));
  const double b = std::abs(v(1));
  const double theta = 2.0 * std::atan2(b, a);
  const double phi = (a == 0.0 || b == 0.0) ? 0.0 : std::arg(v(1)) - std::arg(v(0));
  return BlochMeasurement{theta, phi}.canonical();
}

// ln d - S for a Gibbs state, from the cached spectrum. Near infinite
// temperature the populations are formed relative to uniform with expm1 so
// the deficit keeps its relative accuracy.
double gibbs_entropy_deficit(const GibbsEnsemble& ens) {
  const RVector& E = ens.model->spectrum().eigenvalues;
  const Eigen::Index d = E.size();
  const double mean = E.mean();
  const double spread = (E.maxCoeff() - E.minCoeff()) / ens.temperature;
  if (spread < 1.0) {
    RVector w(d);
    for (Eigen::Index i = 0; i < d; ++i) w(i) = std::expm1(-(E(i) - mean) / ens.temperature);
    const double w_bar = w.mean();
    return deficit_from_offsets((w.array() - w_bar) / (1.0 + w_bar));
  }
  return deficit_from_probabilities(ens.populations);
}

struct MeasuredBranches {
  std::vector<double> probabilities;
  std::vector<std::optional<CMatrix>> states;  // empty below kMinOutcomeProbability
};

MeasuredBranches measure(const CMatrix& rho, const SubsystemLayout& layout, int pos,
                         const ProjectorSet& basis) {
  MeasuredBranches out;
  for (int j = 0; j < basis.size(); ++j) {
    CMatrix rest = contract_subsystem(rho, layout, pos, basis.vector(j));
    const double p = rest.trace().real();
    out.probabilities.push_back(std::max(p, 0.0));
    if (p < kMinOutcomeProbability) {
      out.states.emplace_back();
      continue;
    }
    rest /= p;
    out.states.emplace_back(0.5 * (rest + rest.adjoint()));
  }
  return out;
}

// Sequential discord minus the entropy deficit of the state it acts on.
// With S(pi(s)) = H(p) + sum_j p_j S(s_j) each step's dephased entropy
// cancels against the next step's, leaving
//   G(s) = -(ln d_k - H(p)) + sum_j p_j G(s_j),   G(leaf) = -(ln d - S(leaf)),
// so no dephased state of the full system is ever diagonalised.
double sequential_remainder(const CMatrix& rho, const SubsystemLayout& layout,
                            std::vector<int> labels, std::span<const int> order) {
  if (order.size() < 2) return -entropy_deficit(rho);
  const int label = order.front();
  const int pos = static_cast<int>(std::find(labels.begin(), labels.end(), label) - labels.begin());
  const ProjectorSet basis = reduced_state_eigenbasis(DensityMatrix::from_trusted(rho, layout), pos);
  const MeasuredBranches b = measure(rho, layout, pos, basis);

  double total = -shannon_deficit(b.probabilities);
  const SubsystemLayout rest_layout = layout.without(pos);
  labels.erase(labels.begin() + pos);
  for (std::size_t j = 0; j < b.states.size(); ++j) {
    if (!b.states[j]) continue;
    total += b.probabilities[j] * sequential_remainder(*b.states[j], rest_layout, labels, order.subspan(1));
  }
  return total;
}

std::vector<int> checked_labels(const SubsystemLayout& layout, const GreedyPath& path) {
  if (path.size() != layout.size()) throw UsageError("path does not cover every subsystem");
  if (path.size() < 2) throw UsageError("multipartite discord needs at least two subsystems");
  std::vector<int> labels(layout.size());
  std::iota(labels.begin(), labels.end(), 0);
  return labels;
}

}  // namespace

std::vector<int> Bipartition::complement(const SubsystemLayout& layout) const {
  std::vector<int> b;
  for (int k = 0; k < layout.size(); ++k) {
    if (std::find(part_a.begin(), part_a.end(), k) == part_a.end()) b.push_back(k);
  }
  if (b.empty() || part_a.empty()) throw UsageError("bipartition must have two nonempty parts");
  for (int a : part_a) layout.dim(a);
  return b;
}

int Bipartition::measured() const {
  if (part_a.size() != 1) throw UsageError("measured part of the bipartition must be one subsystem");
  return part_a.front();
}

double mutual_information(const DensityMatrix& rho, const Bipartition& split) {
  const std::vector<int> b = split.complement(rho.layout());
  const double sa = von_neumann_entropy(partial_trace(rho, split.part_a));
  const double sb = von_neumann_entropy(partial_trace(rho, b));
  return sa + sb - von_neumann_entropy(rho);
}

double conditional_entropy(const DensityMatrix& rho, const Bipartition& split,
                           const BlochMeasurement& measurement) {
  const int s = split.measured();
  if (rho.layout().dim(s) != 2) throw UnsupportedOptimization("measured subsystem is not a qubit");
  return sum_conditional_entropy(rho.matrix(), rho.layout(), s, measurement.basis());
}

MeasurementOptimum optimize_measurement(const DensityMatrix& rho, const Bipartition& split,
                                        const BlochOptimizerOptions& options) {
  const int s = split.measured();
  split.complement(rho.layout());
  if (rho.layout().dim(s) != 2) {
    throw UnsupportedOptimization("measurement optimisation supports qubit subsystems only");
  }
  auto objective = [&](double theta, double phi) {
    return sum_conditional_entropy(rho.matrix(), rho.layout(), s,
                                   BlochMeasurement{theta, phi}.basis());
  };
  // The reduced-state eigenbasis is always a candidate, so D <= diagonal D.
  const std::vector<int> keep{s};
  const EigenDecomposition eig = eigh(partial_trace(rho.matrix(), rho.layout(), keep));
  const std::vector<BlochMeasurement> seeds{angles_of(eig.eigenvectors.col(1))};

  MeasurementOptimum out;
  out.diagnostics = minimize_bloch(objective, options, seeds);
  out.measurement = out.diagnostics.best;
  out.min_conditional_entropy = out.diagnostics.value;
  return out;
}

double classical_correlation(const DensityMatrix& rho, const Bipartition& split) {
  const std::vector<int> b = split.complement(rho.layout());
  const double sb = von_neumann_entropy(partial_trace(rho, b));
  return sb - optimize_measurement(rho, split).min_conditional_entropy;
}

double quantum_discord(const DensityMatrix& rho, const Bipartition& split) {
  return discord_report(rho, split).quantum_discord;
}

double diagonal_discord(const DensityMatrix& rho, const Bipartition& split) {
  const int s = split.measured();
  split.complement(rho.layout());
  const ProjectorSet basis = reduced_state_eigenbasis(rho, s);
  const MeasuredBranches b = measure(rho.matrix(), rho.layout(), s, basis);
  double out = entropy_deficit(rho.matrix()) - shannon_deficit(b.probabilities);
  for (std::size_t j = 0; j < b.states.size(); ++j) {
    if (b.states[j]) out -= b.probabilities[j] * entropy_deficit(*b.states[j]);
  }
  return out;
}

DiscordReport discord_report(const DensityMatrix& rho, const Bipartition& split,
                             const BlochOptimizerOptions& options) {
  const std::vector<int> b = split.complement(rho.layout());
  const double sa = von_neumann_entropy(partial_trace(rho, split.part_a));
  const double sb = von_neumann_entropy(partial_trace(rho, b));
  const double sab = von_neumann_entropy(rho);
  const MeasurementOptimum opt = optimize_measurement(rho, split, options);

  DiscordReport r;
  r.mutual_information = sa + sb - sab;
  r.classical_correlation = sb - opt.min_conditional_entropy;
  r.quantum_discord = r.mutual_information - r.classical_correlation;
  r.diagonal_discord = diagonal_discord(rho, split);
  r.optimizer = opt.diagnostics;
  return r;
}

double multipartite_diagonal_discord(const DensityMatrix& rho, const GreedyPath& path) {
  return entropy_deficit(rho.matrix()) +
         sequential_remainder(rho.matrix(), rho.layout(), checked_labels(rho.layout(), path), path.order());
}

double multipartite_diagonal_discord(const GibbsEnsemble& ens, const GreedyPath& path) {
  const CMatrix& rho = ens.state.matrix();
  return gibbs_entropy_deficit(ens) +
         sequential_remainder(rho, ens.layout(), checked_labels(ens.layout(), path), path.order());
}

double symmetric_diagonal_discord(const DensityMatrix& rho) {
  double sum = 0.0;
  for (int k = 0; k < rho.layout().size(); ++k) {
    sum += von_neumann_entropy(partial_trace(rho, {k}));
  }
  return sum - von_neumann_entropy(rho);
}

double minus_scaled_derivative(const std::function<double(double)>& f, double T,
                               const DerivativePolicy& policy) {
  return -central_derivative(f, T, policy) / T;
}

double discord_temperature_derivative(std::shared_ptr<const ThermalModel> model,
                                      const GreedyPath& path, double T,
                                      const DerivativePolicy& policy) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  return minus_scaled_derivative(
      [&](double t) { return multipartite_diagonal_discord(gibbs(model, t), path); }, T, policy);
}

double discord_temperature_derivative(const PartitionedHamiltonian& model, const GreedyPath& path,
                                      double T, const DerivativePolicy& policy) {
  return discord_temperature_derivative(std::make_shared<const ThermalModel>(model), path, T,
                                        policy);
}

double mutual_information_temperature_derivative(std::shared_ptr<const ThermalModel> model,
                                                 const Bipartition& split, double T,
                                                 const DerivativePolicy& policy) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  return minus_scaled_derivative(
      [&](double t) { return mutual_information(gibbs(model, t).state, split); }, T, policy);
}

double classical_correlation_temperature_derivative(std::shared_ptr<const ThermalModel> model,
                                                    const Bipartition& split, double T,
                                                    const DerivativePolicy& policy) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  const DensityMatrix rho = gibbs(model, T).state;
  const BlochMeasurement best = optimize_measurement(rho, split).measurement;
  const std::vector<int> b = split.complement(rho.layout());
  return minus_scaled_derivative(
      [&](double t) {
        const DensityMatrix state = gibbs(model, t).state;
        return von_neumann_entropy(partial_trace(state, b)) - conditional_entropy(state, split, best);
      },
      T, policy);
}

}  // namespace qtherm
