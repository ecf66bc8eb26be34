#include "qtherm/high_temperature.hpp"

#include <algorithm>
#include <cmath>

#include "qtherm/errors.hpp"

namespace qtherm {

namespace {

CMatrix traceless(CMatrix m) {
  const double shift = m.trace().real() / static_cast<double>(m.rows());
  m.diagonal().array() -= shift;
  return 0.5 * (m + m.adjoint());
}

bool ratio_in_range(double r) { return r >= 0.3 && r <= 3.0; }

void finish_boundedness(AsymptoticCheck& check, const std::vector<double>& scaled,
                        double vacuous_floor) {
  double largest = 0.0;
  for (double s : scaled) largest = std::max(largest, std::abs(s));
  check.value = scaled.front();
  check.predicted = scaled.back();
  if (largest <= vacuous_floor) {
    check.vacuous = true;
    check.pass = true;
    return;
  }
  check.pass = true;
  for (std::size_t k = 1; k < scaled.size(); ++k) {
    const double r = scaled[k] / scaled[k - 1];
    check.doubling_ratios.push_back(r);
    check.residual = std::max(check.residual, std::isfinite(r) ? std::abs(r - 1.0) : INFINITY);
    check.pass = check.pass && ratio_in_range(r);
  }
}

}  // namespace

double spectral_norm(const HermitianOperator& h) {
  const RVector ev = eigh(h).eigenvalues;
  return ev.size() == 0 ? 0.0 : std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

bool in_high_temperature_regime(const ThermalModel& model, double T) {
  const RVector& ev = model.spectrum().eigenvalues;
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return T >= 10.0 * norm;
}

FirstOrderState first_order_state(const HermitianOperator& h, double T) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  const int d = h.dim();
  const CMatrix shifted = traceless(h.matrix());
  CMatrix rho = (CMatrix::Identity(d, d) - shifted / T) / static_cast<double>(d);

  FirstOrderState out;
  const EigenDecomposition eig = eigh(rho);
  out.min_eigenvalue = eig.eigenvalues(0);
  if (out.min_eigenvalue < 0.0) {
    out.regime_warning = true;
    RVector clamped = eig.eigenvalues.cwiseMax(0.0);
    clamped /= clamped.sum();
    rho = eig.eigenvectors * clamped.asDiagonal() * eig.eigenvectors.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
  }
  out.state = DensityMatrix::from_trusted(std::move(rho), h.layout());
  return out;
}

HermitianOperator effective_hamiltonian_A(const HermitianOperator& h_ab) {
  const SubsystemLayout& layout = h_ab.layout();
  if (layout.size() < 2) throw UsageError("effective Hamiltonian needs a bipartite operator");
  const std::vector<int> keep{0};
  const double d_b = static_cast<double>(layout.total() / layout.dim(0));
  CMatrix omega = partial_trace(h_ab.matrix(), layout, keep) / d_b;
  return {traceless(std::move(omega)), layout.select(keep)};
}

HermitianOperator effective_hamiltonian_A(const PartitionedHamiltonian& model) {
  return effective_hamiltonian_A(model.interaction);
}

HermitianOperator effective_hamiltonian_B_given(const HermitianOperator& h_ab, const CVector& j) {
  const SubsystemLayout& layout = h_ab.layout();
  if (layout.size() < 2) throw UsageError("effective Hamiltonian needs a bipartite operator");
  if (j.size() != layout.dim(0)) throw UsageError("vector dimension does not match subsystem A");
  const CVector unit = j.normalized();
  return {traceless(contract_subsystem(h_ab.matrix(), layout, 0, unit)), layout.without(0)};
}

HermitianOperator effective_hamiltonian_B_given(const PartitionedHamiltonian& model,
                                                const CVector& j) {
  return effective_hamiltonian_B_given(model.interaction, j);
}

HermitianOperator conditional_effective_hamiltonian(const PartitionedHamiltonian& model,
                                                    const CVector& j) {
  const SubsystemLayout& layout = model.layout();
  const CVector unit = j.normalized();
  CMatrix h_b = CMatrix::Zero(layout.total() / layout.dim(0), layout.total() / layout.dim(0));
  for (std::size_t k = 1; k < model.local_terms.size(); ++k) {
    h_b += contract_subsystem(model.local_terms[k].matrix(), layout, 0, unit);
  }
  const HermitianOperator omega = effective_hamiltonian_B_given(model, unit);
  return {0.5 * (h_b + h_b.adjoint()) + omega.matrix(), omega.layout()};
}

XStateCoefficients xstate_leading_terms(const TwoQubitXYZParams& p) {
  XStateCoefficients c;
  c.delta_F = (p.Jx * p.Jx + p.Jy * p.Jy) / 4.0;
  c.mutual_information = (p.Jx * p.Jx + p.Jy * p.Jy + p.Jz * p.Jz) / 4.0;
  c.classical_correlation = p.Jz * p.Jz / 4.0;
  return c;
}

double sech_exact(double Jk, double T) {
  if (!(T > 0.0)) throw DomainError("temperature must be positive");
  const double sech = 1.0 / std::cosh(Jk / (2.0 * T));
  return Jk * Jk * sech * sech / (4.0 * T * T * T * T);
}

double probability_term(std::shared_ptr<const ThermalModel> model, double T,
                        const DerivativePolicy& policy) {
  const GibbsEnsemble ens = gibbs(model, T);
  const SubsystemLayout& layout = ens.layout();
  if (layout.size() < 2) throw UsageError("probability term needs a bipartite model");
  const ProjectorSet basis = reduced_state_eigenbasis(ens.state, 0);

  auto probabilities = [&](double t) {
    const auto p = outcome_probabilities(gibbs(model, t).state.matrix(), layout, basis);
    return RVector(Eigen::Map<const RVector>(p.data(), static_cast<Eigen::Index>(p.size())));
  };
  const RVector dp = central_derivative(probabilities, T, policy);

  RVector entropies(basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    const ConditionalState c = conditional_state(ens.state, basis, k);
    entropies(k) = c.state ? von_neumann_entropy(*c.state) : 0.0;
  }
  // sum_k dp_k = 0, so centring the entropies removes the common part
  // without changing the exact value.
  entropies.array() -= entropies.mean();
  return dp.dot(entropies) / T;
}

AsymptoticCheck order_check_probability_term(std::shared_ptr<const ThermalModel> model, double T,
                                             const DerivativePolicy& policy) {
  AsymptoticCheck check;
  check.name = "probability_term";
  check.temperature = T;
  check.regime_warning = !in_high_temperature_regime(*model, T);
  std::vector<double> scaled;
  for (double t : {T, 2.0 * T}) scaled.push_back(std::pow(t, 5) * probability_term(model, t, policy));
  const double norm = spectral_norm(model->hamiltonian().total);
  finish_boundedness(check, scaled, 1e-10 * norm * norm * norm);
  return check;
}

double spectral_variance(const ThermalModel& model) {
  const RVector& ev = model.spectrum().eigenvalues;
  const double mean = ev.mean();
  return (ev.array() - mean).square().mean();
}

AsymptoticCheck order_check_qfi(std::shared_ptr<const ThermalModel> model, double T) {
  AsymptoticCheck check;
  check.name = "qfi_leading_order";
  check.temperature = T;
  check.regime_warning = !in_high_temperature_regime(*model, T);
  check.value = std::pow(T, 4) * qfi_gibbs(gibbs(model, T));
  check.predicted = spectral_variance(*model);
  if (check.predicted <= 0.0) {
    check.vacuous = true;
    check.pass = true;
    return check;
  }
  check.residual = std::abs(check.value - check.predicted) / check.predicted;
  check.pass = check.residual <= 0.05;
  return check;
}

double identity_denominator_floor(double global_qfi) {
  return std::max(1e-14, 1e-10 * std::abs(global_qfi));
}

IdentityComparison identity_comparison(std::shared_ptr<const ThermalModel> model,
                                       const GreedyPath& path, double T, MeasurementMode mode,
                                       const DerivativePolicy& policy) {
  const GibbsEnsemble ens = gibbs(model, T);
  const double global = qfi_gibbs(ens);
  IdentityComparison out;
  out.delta_F = global - greedy_locc_qfi(ens, path, mode, policy);
  out.minus_dD_over_T = discord_temperature_derivative(model, path, T, policy);
  out.abs_diff = std::abs(out.delta_F - out.minus_dD_over_T);
  const double denominator = out.delta_F + out.minus_dD_over_T;
  if (std::abs(denominator) >= identity_denominator_floor(global)) {
    out.relative_metric = std::abs((out.delta_F - out.minus_dD_over_T) / denominator);
  }
  return out;
}

AsymptoticCheck order_check_identity(std::shared_ptr<const ThermalModel> model,
                                     const GreedyPath& path, const std::vector<double>& temperatures,
                                     MeasurementMode mode, const DerivativePolicy& policy) {
  if (temperatures.size() < 2) throw UsageError("identity order check needs at least two temperatures");
  AsymptoticCheck check;
  check.name = "identity_remainder";
  check.temperature = temperatures.front();
  std::vector<double> scaled;
  for (double t : temperatures) {
    check.regime_warning = check.regime_warning || !in_high_temperature_regime(*model, t);
    scaled.push_back(std::pow(t, 5) * identity_comparison(model, path, t, mode, policy).abs_diff);
  }
  const double norm = spectral_norm(model->hamiltonian().total);
  finish_boundedness(check, scaled, 1e-10 * norm * norm * norm);
  return check;
}

}  // namespace qtherm
