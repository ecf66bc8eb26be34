#include "qtherm/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qtherm/errors.hpp"

namespace qtherm {

namespace {

constexpr double kSupportTol = 1e-12;

struct FrozenOutcome {
  int label;
  CVector vector;
};

// T -> normalised state of the unmeasured subsystems after projecting each
// measured subsystem onto its frozen outcome vector.
StateFamily branch_family(std::shared_ptr<const ThermalModel> model,
                          std::vector<FrozenOutcome> prior) {
  return [model = std::move(model), prior = std::move(prior)](double T) {
    const GibbsEnsemble ens = gibbs(model, T);
    CMatrix m = ens.state.matrix();
    SubsystemLayout layout = model->layout();
    std::vector<int> labels(static_cast<std::size_t>(layout.size()));
    std::iota(labels.begin(), labels.end(), 0);
    for (const auto& f : prior) {
      const auto it = std::find(labels.begin(), labels.end(), f.label);
      const int pos = static_cast<int>(it - labels.begin());
      m = contract_subsystem(m, layout, pos, f.vector);
      layout = layout.without(pos);
      labels.erase(it);
    }
    const double p = m.trace().real();
    if (!(p > 0.0)) throw DomainError("conditional branch has vanishing probability");
    m /= p;
    m = 0.5 * (m + m.adjoint()).eval();
    return DensityMatrix::from_trusted(std::move(m), layout);
  };
}

// Rotates every block of `basis` so that it diagonalises `secondary`
// restricted to the block; returns the blocks that remain degenerate.
std::vector<std::vector<int>> refine_blocks(CMatrix& basis,
                                            const std::vector<std::vector<int>>& blocks,
                                            const CMatrix& secondary, double tol) {
  std::vector<std::vector<int>> residual;
  for (const auto& block : blocks) {
    if (block.size() < 2) continue;
    CMatrix span(basis.rows(), static_cast<Eigen::Index>(block.size()));
    for (std::size_t q = 0; q < block.size(); ++q) {
      span.col(static_cast<Eigen::Index>(q)) = basis.col(block[q]);
    }
    const CMatrix frame = canonical_frame(span);
    CMatrix restricted = frame.adjoint() * secondary * frame;
    restricted = 0.5 * (restricted + restricted.adjoint()).eval();
    const EigenDecomposition sub = eigh(restricted);
    const CMatrix rotated = frame * sub.eigenvectors;
    for (std::size_t q = 0; q < block.size(); ++q) {
      basis.col(block[q]) = rotated.col(static_cast<Eigen::Index>(q));
    }
    for (const auto& inner : degenerate_blocks(sub.eigenvalues, tol)) {
      if (inner.size() < 2) continue;
      std::vector<int> mapped;
      for (int q : inner) mapped.push_back(block[static_cast<std::size_t>(q)]);
      residual.push_back(std::move(mapped));
    }
  }
  return residual;
}

double tie_tolerance(const CMatrix& op) { return kDegeneracyTol * std::max(1.0, max_abs(op)); }

}  // namespace

ThermalModel::ThermalModel(PartitionedHamiltonian hamiltonian)
    : hamiltonian_(std::move(hamiltonian)), spectrum_(eigh(hamiltonian_.total)) {}

GibbsEnsemble GibbsEnsemble::at(double T) const { return gibbs(model, T); }

GibbsEnsemble gibbs(const PartitionedHamiltonian& hamiltonian, double T) {
  return gibbs(std::make_shared<const ThermalModel>(hamiltonian), T);
}

GibbsEnsemble gibbs(std::shared_ptr<const ThermalModel> model, double T) {
  if (!(T > 0.0) || !std::isfinite(T)) {
    std::ostringstream msg;
    msg << "temperature must be positive and finite, got " << T;
    throw DomainError(msg.str());
  }
  const auto& spec = model->spectrum();
  const double e_min = spec.eigenvalues.minCoeff();
  // Shifted exponentials keep every weight in (0, 1].
  RVector w = (-(spec.eigenvalues.array() - e_min) / T).exp();
  const double sum = w.sum();
  w /= sum;
  CMatrix rho = spec.eigenvectors * w.cast<Complex>().asDiagonal() * spec.eigenvectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();

  GibbsEnsemble ens;
  ens.temperature = T;
  ens.log_partition = -e_min / T + std::log(sum);
  ens.populations = std::move(w);
  ens.state = DensityMatrix::from_trusted(std::move(rho), model->layout());
  ens.model = std::move(model);
  return ens;
}

double heat_capacity(const GibbsEnsemble& ens) {
  const RVector& h = ens.model->spectrum().eigenvalues;
  const RVector& p = ens.populations;
  const double mean = p.dot(h);
  const double variance = p.dot((h.array() - mean).square().matrix());
  const double T = ens.temperature;
  return std::max(0.0, variance) / (T * T);
}

double qfi_gibbs(const GibbsEnsemble& ens) {
  const double T = ens.temperature;
  return heat_capacity(ens) / (T * T);
}

CMatrix symmetric_log_derivative(const CMatrix& rho, const CMatrix& drho) {
  const EigenDecomposition eig = eigh(rho);
  const CMatrix& V = eig.eigenvectors;
  const CMatrix d = V.adjoint() * drho * V;
  CMatrix L = CMatrix::Zero(rho.rows(), rho.cols());
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    for (Eigen::Index j = 0; j < L.cols(); ++j) {
      const double s = eig.eigenvalues(i) + eig.eigenvalues(j);
      if (s > kSupportTol) L(i, j) = 2.0 * d(i, j) / s;
    }
  }
  CMatrix out = V * L * V.adjoint();
  return 0.5 * (out + out.adjoint());
}

double qfi_from_derivative(const CMatrix& rho, const CMatrix& drho) {
  const EigenDecomposition eig = eigh(rho);
  const CMatrix d = eig.eigenvectors.adjoint() * drho * eig.eigenvectors;
  double F = 0.0;
  bool any = false;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double s = eig.eigenvalues(i) + eig.eigenvalues(j);
      if (s > kSupportTol) {
        F += std::norm(d(i, j)) / s;
        any = true;
      }
    }
  }
  if (!any) throw DegenerateFamily("no eigenvalue pair of the state exceeds the support cutoff");
  return 2.0 * F;
}

double qfi_general(const StateFamily& family, double T, const DerivativePolicy& policy) {
  const DensityMatrix rho = family(T);
  const CMatrix drho =
      central_derivative([&](double t) -> CMatrix { return family(t).matrix(); }, T, policy);
  return qfi_from_derivative(rho.matrix(), drho);
}

double classical_fisher(const ProbabilityFamily& family, double T, const DerivativePolicy& policy) {
  const RVector p = family(T);
  const RVector dp = central_derivative(family, T, policy);
  double F = 0.0;
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    if (p(x) >= kMinOutcomeProbability) F += dp(x) * dp(x) / p(x);
  }
  return F;
}

StateFamily reduced_family(const GibbsEnsemble& ens, std::vector<int> keep) {
  return [model = ens.model, keep = std::move(keep)](double T) {
    return partial_trace(gibbs(model, T).state, keep);
  };
}

double local_qfi(const GibbsEnsemble& ens, int subsystem, const DerivativePolicy& policy) {
  return qfi_general(reduced_family(ens, {subsystem}), ens.temperature, policy);
}

std::string to_string(MeasurementMode mode) {
  return mode == MeasurementMode::sld_eigenbasis ? "sld_eigenbasis" : "reduced_state_eigenbasis";
}

MeasurementMode parse_measurement_mode(const std::string& text) {
  if (text == "sld_eigenbasis" || text == "sld") return MeasurementMode::sld_eigenbasis;
  if (text == "reduced_state_eigenbasis" || text == "reduced_state") {
    return MeasurementMode::reduced_state_eigenbasis;
  }
  throw UsageError("unknown measurement mode '" + text + "'");
}

ProjectorSet optimal_measurement(const StateFamily& family, int subsystem, double T,
                                 MeasurementMode mode, const DerivativePolicy& policy) {
  const DensityMatrix rho = family(T);
  const std::vector<int> keep{subsystem};
  const CMatrix reduced = partial_trace(rho.matrix(), rho.layout(), keep);

  if (mode == MeasurementMode::reduced_state_eigenbasis) {
    return reduced_state_eigenbasis(rho, subsystem);
  }

  const CMatrix dreduced = central_derivative(
      [&](double t) -> CMatrix { return partial_trace(family(t).matrix(), rho.layout(), keep); },
      T, policy);
  const CMatrix L = symmetric_log_derivative(reduced, dreduced);
  const EigenDecomposition eig = eigh(L);
  CMatrix basis = eig.eigenvectors;
  const auto blocks = degenerate_blocks(eig.eigenvalues, tie_tolerance(L));
  const auto residual = refine_blocks(basis, blocks, dreduced, tie_tolerance(dreduced));
  basis = minimize_within_blocks(rho.matrix(), rho.layout(), subsystem, std::move(basis), residual);
  return {subsystem, std::move(basis)};
}

ProjectorSet optimal_local_measurement(const GibbsEnsemble& ens, int subsystem,
                                       MeasurementMode mode, const DerivativePolicy& policy) {
  StateFamily full = [model = ens.model](double T) { return gibbs(model, T).state; };
  return optimal_measurement(full, subsystem, ens.temperature, mode, policy);
}

ConditionalState conditional_state(const GibbsEnsemble& ens, const ProjectorSet& proj, int j) {
  return conditional_state(ens.state, proj, j);
}

// ---------------------------------------------------------------------------

GreedyPath::GreedyPath(std::vector<int> order) : order_(std::move(order)) {
  std::vector<int> sorted = order_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] != static_cast<int>(k)) {
      throw UsageError("greedy path must be a permutation of the subsystem indices");
    }
  }
  if (order_.empty()) throw UsageError("greedy path is empty");
}

GreedyPath GreedyPath::parse(const std::string& text) {
  std::vector<int> order;
  if (text.find('-') != std::string::npos) {
    // Long chains: 1-based labels separated by '-', e.g. "1-2-10".
    std::size_t start = 0;
    while (start <= text.size()) {
      const std::size_t dash = std::min(text.find('-', start), text.size());
      const std::string token = text.substr(start, dash - start);
      if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
        throw UsageError("greedy path '" + text + "' has a malformed label");
      }
      order.push_back(std::stoi(token) - 1);
      start = dash + 1;
    }
  } else {
    for (char c : text) {
      if (c < '1' || c > '9') throw UsageError("greedy path '" + text + "' must be digits 1-9");
      order.push_back(c - '1');
    }
  }
  return GreedyPath(std::move(order));
}

GreedyPath GreedyPath::identity(int n) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  return GreedyPath(std::move(order));
}

std::string GreedyPath::to_string() const {
  const bool compact = size() <= 9;
  std::string s;
  for (int k : order_) {
    if (!compact && !s.empty()) s += '-';
    s += compact ? std::string(1, static_cast<char>('1' + k)) : std::to_string(k + 1);
  }
  return s;
}

namespace {

struct GreedyContext {
  std::shared_ptr<const ThermalModel> model;
  const GreedyPath& path;
  MeasurementMode mode;
  const DerivativePolicy& policy;
  double T;
  GreedyResult& result;
};

void greedy_step(const GreedyContext& ctx, int k, std::vector<FrozenOutcome> prior,
                 std::vector<int> outcomes, double weight) {
  const int n = ctx.path.size();
  const int label = ctx.path.order()[static_cast<std::size_t>(k)];

  // Remaining labels in ascending order give the branch layout.
  std::vector<int> remaining;
  for (int s = 0; s < n; ++s) {
    const bool measured = std::any_of(prior.begin(), prior.end(),
                                      [s](const FrozenOutcome& f) { return f.label == s; });
    if (!measured) remaining.push_back(s);
  }
  const int position =
      static_cast<int>(std::find(remaining.begin(), remaining.end(), label) - remaining.begin());

  const StateFamily family = branch_family(ctx.model, prior);

  if (k == n - 1) {
    const double F = qfi_general(family, ctx.T, ctx.policy);
    ctx.result.step_terms[static_cast<std::size_t>(k)] += weight * F;
    ProjectorSet last = optimal_measurement(family, position, ctx.T,
                                            MeasurementMode::sld_eigenbasis, ctx.policy);
    ctx.result.scheme.branches.push_back(
        {outcomes, ProjectorSet(label, last.basis()), weight, true});
    return;
  }

  const ProjectorSet local = optimal_measurement(family, position, ctx.T, ctx.mode, ctx.policy);
  const SubsystemLayout layout = family(ctx.T).layout();
  const ProbabilityFamily probabilities = [&](double t) {
    const auto p = outcome_probabilities(family(t).matrix(), layout, local);
    return RVector(Eigen::Map<const RVector>(p.data(), static_cast<Eigen::Index>(p.size())));
  };
  const RVector p_now = probabilities(ctx.T);
  const double F_step = classical_fisher(probabilities, ctx.T, ctx.policy);
  ctx.result.step_terms[static_cast<std::size_t>(k)] += weight * F_step;
  ctx.result.scheme.branches.push_back({outcomes, ProjectorSet(label, local.basis()), weight, false});

  for (int x = 0; x < local.size(); ++x) {
    if (p_now(x) < kMinOutcomeProbability) continue;
    auto next_prior = prior;
    next_prior.push_back({label, local.vector(x)});
    auto next_outcomes = outcomes;
    next_outcomes.push_back(x);
    greedy_step(ctx, k + 1, std::move(next_prior), std::move(next_outcomes), weight * p_now(x));
  }
}

}  // namespace

GreedyResult greedy_locc(const GibbsEnsemble& ens, const GreedyPath& path, MeasurementMode mode,
                         const DerivativePolicy& policy) {
  if (path.size() != ens.layout().size()) {
    throw UsageError("greedy path length does not match the number of subsystems");
  }
  GreedyResult result;
  result.step_terms.assign(static_cast<std::size_t>(path.size()), 0.0);
  result.scheme.mode = mode;
  result.scheme.path = path;
  const GreedyContext ctx{ens.model, path, mode, policy, ens.temperature, result};
  greedy_step(ctx, 0, {}, {}, 1.0);
  result.total = std::accumulate(result.step_terms.begin(), result.step_terms.end(), 0.0);
  return result;
}

double greedy_locc_qfi(const GibbsEnsemble& ens, const GreedyPath& path, MeasurementMode mode,
                       const DerivativePolicy& policy) {
  return greedy_locc(ens, path, mode, policy).total;
}

double precision_loss(const GibbsEnsemble& ens, const GreedyPath& path, MeasurementMode mode,
                      const DerivativePolicy& policy) {
  return qfi_gibbs(ens) - greedy_locc_qfi(ens, path, mode, policy);
}

}  // namespace qtherm
