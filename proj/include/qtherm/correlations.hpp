#pragma once

// Entropic correlation measures of bipartite and multipartite states, and
// their temperature derivatives along Gibbs families.

#include <functional>
#include <vector>

#include "qtherm/bloch.hpp"
#include "qtherm/derivative.hpp"
#include "qtherm/measurement.hpp"
#include "qtherm/thermometry.hpp"

namespace qtherm {

/// A = `part_a`, B = every other subsystem.
struct Bipartition {
  std::vector<int> part_a{0};

  std::vector<int> complement(const SubsystemLayout& layout) const;
  /// The single measured subsystem; throws UsageError if A is composite.
  int measured() const;
};

/// S_A + S_B - S_AB.
double mutual_information(const DensityMatrix& rho, const Bipartition& split = {});

struct MeasurementOptimum {
  double min_conditional_entropy = 0.0;
  BlochMeasurement measurement;
  BlochOptimum diagnostics;
};

/// min over qubit projective measurements on A of sum_j p_j S(rho_B|j).
/// Throws UnsupportedOptimization if A is not a qubit.
MeasurementOptimum optimize_measurement(const DensityMatrix& rho, const Bipartition& split = {},
                                        const BlochOptimizerOptions& options = {});

/// Conditional entropy for the measurement with Bloch angles (theta, phi) on A.
double conditional_entropy(const DensityMatrix& rho, const Bipartition& split,
                           const BlochMeasurement& measurement);

/// J_{B|A} = S_B - min sum_j p_j S(rho_B|j).
double classical_correlation(const DensityMatrix& rho, const Bipartition& split = {});

/// D_{A->B} = I_AB - J_{B|A}.
double quantum_discord(const DensityMatrix& rho, const Bipartition& split = {});

/// S(pi_A(rho)) - S(rho), pi_A the dephasing in the eigenbasis of rho_A;
/// degenerate eigenspaces are rotated to the smallest dephased entropy.
double diagonal_discord(const DensityMatrix& rho, const Bipartition& split = {});

struct DiscordReport {
  double mutual_information = 0.0;
  double classical_correlation = 0.0;
  double quantum_discord = 0.0;
  double diagonal_discord = 0.0;
  BlochOptimum optimizer;
};

DiscordReport discord_report(const DensityMatrix& rho, const Bipartition& split = {},
                             const BlochOptimizerOptions& options = {});

/// Sum over steps of outcome-averaged conditional diagonal discords along
/// the measurement order; every step conditions on the reduced-state
/// eigenbasis outcomes of all earlier steps.
double multipartite_diagonal_discord(const DensityMatrix& rho, const GreedyPath& path);
double multipartite_diagonal_discord(const GibbsEnsemble& ens, const GreedyPath& path);

/// sum_k S(rho_k) - S(rho). Order independent. With outcome-independent
/// eigenbases the sequential sum telescopes to S(pi_1 ... pi_N(rho)) - S(rho)
/// instead, which is smaller unless the fully dephased distribution is a
/// product; sweeps report both.
double symmetric_diagonal_discord(const DensityMatrix& rho);

/// -(1/T) d/dT f(T) by the shared central-difference policy.
double minus_scaled_derivative(const std::function<double(double)>& f, double T,
                               const DerivativePolicy& policy = {});

/// -(1/T) dD/dT for the multipartite diagonal discord of the Gibbs family.
double discord_temperature_derivative(std::shared_ptr<const ThermalModel> model,
                                      const GreedyPath& path, double T,
                                      const DerivativePolicy& policy = {});
double discord_temperature_derivative(const PartitionedHamiltonian& model, const GreedyPath& path,
                                      double T, const DerivativePolicy& policy = {});

/// -(1/T) dI_AB/dT along the Gibbs family.
double mutual_information_temperature_derivative(std::shared_ptr<const ThermalModel> model,
                                                 const Bipartition& split, double T,
                                                 const DerivativePolicy& policy = {});

/// -(1/T) dJ_{B|A}/dT. The minimising measurement found at T is held fixed
/// across the stencil; since J is stationary in the measurement angles this
/// is the derivative of the optimised value, without optimiser noise.
double classical_correlation_temperature_derivative(std::shared_ptr<const ThermalModel> model,
                                                    const Bipartition& split, double T,
                                                    const DerivativePolicy& policy = {});

}  // namespace qtherm
