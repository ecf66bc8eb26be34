#pragma once

// Gibbs states and Fisher information for temperature estimation: global,
// local, and the greedy sequential (LOCC) scheme with classical feed-forward.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qtherm/derivative.hpp"
#include "qtherm/measurement.hpp"
#include "qtherm/models.hpp"
#include "qtherm/operator.hpp"

namespace qtherm {

/// A Hamiltonian together with its (cached) spectral decomposition.
class ThermalModel {
 public:
  explicit ThermalModel(PartitionedHamiltonian hamiltonian);

  const PartitionedHamiltonian& hamiltonian() const { return hamiltonian_; }
  const EigenDecomposition& spectrum() const { return spectrum_; }
  const SubsystemLayout& layout() const { return hamiltonian_.layout(); }

 private:
  PartitionedHamiltonian hamiltonian_;
  EigenDecomposition spectrum_;
};

struct GibbsEnsemble {
  std::shared_ptr<const ThermalModel> model;
  double temperature = 0.0;
  DensityMatrix state;
  double log_partition = 0.0;
  RVector populations;  // Boltzmann weights, in spectrum order

  const PartitionedHamiltonian& hamiltonian() const { return model->hamiltonian(); }
  const SubsystemLayout& layout() const { return model->layout(); }
  /// Same model at another temperature; reuses the cached spectrum.
  GibbsEnsemble at(double T) const;
};

/// e^{-H/T} / Z. Throws DomainError for T <= 0.
GibbsEnsemble gibbs(const PartitionedHamiltonian& hamiltonian, double T);
GibbsEnsemble gibbs(std::shared_ptr<const ThermalModel> model, double T);

/// (<H^2> - <H>^2) / T^2, evaluated on the spectrum.
double heat_capacity(const GibbsEnsemble& ens);

/// Global QFI of the Gibbs family, C(T) / T^2.
double qfi_gibbs(const GibbsEnsemble& ens);

using StateFamily = std::function<DensityMatrix(double)>;
using ProbabilityFamily = std::function<RVector(double)>;

/// Symmetric logarithmic derivative L with drho = (L rho + rho L) / 2,
/// restricted to the support pairs lambda_i + lambda_j > 1e-12.
CMatrix symmetric_log_derivative(const CMatrix& rho, const CMatrix& drho);

/// 2 sum_{ij} |<i|drho|j>|^2 / (lambda_i + lambda_j) over pairs with
/// lambda_i + lambda_j > 1e-12.
double qfi_from_derivative(const CMatrix& rho, const CMatrix& drho);

/// QFI of an arbitrary state family; drho/dT by central differences.
double qfi_general(const StateFamily& family, double T, const DerivativePolicy& policy = {});

/// sum_x (dp_x/dT)^2 / p_x, outcomes with p_x < 1e-14 dropped.
double classical_fisher(const ProbabilityFamily& family, double T,
                        const DerivativePolicy& policy = {});

/// T -> reduced Gibbs state on `keep`.
StateFamily reduced_family(const GibbsEnsemble& ens, std::vector<int> keep);

/// QFI of T -> Tr_rest rho(T) for one subsystem.
double local_qfi(const GibbsEnsemble& ens, int subsystem, const DerivativePolicy& policy = {});

enum class MeasurementMode { sld_eigenbasis, reduced_state_eigenbasis };

std::string to_string(MeasurementMode mode);
MeasurementMode parse_measurement_mode(const std::string& text);

/// Locally optimal projective measurement of subsystem `subsystem` for the
/// state family at temperature T. In SLD mode the eigenbasis of the SLD of
/// the reduced family; degenerate SLD blocks are refined by diagonalising
/// drho_s inside the block, and blocks that stay degenerate are rotated to
/// minimise the dephased entropy of the whole state.
ProjectorSet optimal_measurement(const StateFamily& family, int subsystem, double T,
                                 MeasurementMode mode, const DerivativePolicy& policy = {});

ProjectorSet optimal_local_measurement(const GibbsEnsemble& ens, int subsystem,
                                       MeasurementMode mode = MeasurementMode::sld_eigenbasis,
                                       const DerivativePolicy& policy = {});

ConditionalState conditional_state(const GibbsEnsemble& ens, const ProjectorSet& proj, int j);

/// Measurement order over subsystems; a permutation of 0..N-1.
class GreedyPath {
 public:
  GreedyPath() = default;
  explicit GreedyPath(std::vector<int> order);

  /// "132" -> {0, 2, 1}; digits are 1-based subsystem labels. Chains longer
  /// than nine sites use "-" separated labels ("1-2-10-...").
  static GreedyPath parse(const std::string& text);
  static GreedyPath identity(int n);

  const std::vector<int>& order() const { return order_; }
  int size() const { return static_cast<int>(order_.size()); }
  std::string to_string() const;

 private:
  std::vector<int> order_;
};

/// One measurement performed in the greedy protocol after the prior
/// outcomes listed in `outcomes`. The projector set is labelled with the
/// original subsystem index.
struct MeasurementBranch {
  std::vector<int> outcomes;
  ProjectorSet projectors;
  double probability = 1.0;  // P(outcomes) at the evaluation temperature
  bool final_step = false;
};

struct MeasurementScheme {
  MeasurementMode mode = MeasurementMode::sld_eigenbasis;
  GreedyPath path;
  std::vector<MeasurementBranch> branches;  // depth-first order
};

struct GreedyResult {
  double total = 0.0;
  /// Unconditional step terms F_{s_k | s_1..s_{k-1}}; they sum to total.
  std::vector<double> step_terms;
  MeasurementScheme scheme;
};

/// Greedy local scheme: measure path[0] optimally, feed the outcome forward,
/// measure path[1] optimally on the conditional state, and so on; the last
/// subsystem contributes its conditional QFI. All measurements are frozen
/// at the evaluation temperature when differentiating.
GreedyResult greedy_locc(const GibbsEnsemble& ens, const GreedyPath& path,
                         MeasurementMode mode = MeasurementMode::sld_eigenbasis,
                         const DerivativePolicy& policy = {});

double greedy_locc_qfi(const GibbsEnsemble& ens, const GreedyPath& path,
                       MeasurementMode mode = MeasurementMode::sld_eigenbasis,
                       const DerivativePolicy& policy = {});

/// qfi_gibbs - greedy_locc_qfi. Not clamped; may be slightly negative.
double precision_loss(const GibbsEnsemble& ens, const GreedyPath& path,
                      MeasurementMode mode = MeasurementMode::sld_eigenbasis,
                      const DerivativePolicy& policy = {});

}  // namespace qtherm
