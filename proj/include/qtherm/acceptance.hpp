#pragma once

// The acceptance suite shared by `qtherm verify` and the acceptance test, and
// the independent reference computations it checks against.

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qtherm/thermometry.hpp"

namespace qtherm {

namespace oracle {

/// -2 d^2/de^2 of the squared fidelity between rho(T) and rho(T + e),
/// second differences at e = step*T and step*T/2 combined by Richardson.
double fidelity_qfi(const StateFamily& family, double T, double step = 1e-2);

/// Classical Fisher information of the joint outcome distribution of every
/// measurement in `scheme`, with a five-point stencil on the probabilities.
double joint_distribution_fisher(std::shared_ptr<const ThermalModel> model, double T,
                                 const MeasurementScheme& scheme, double step = 1e-3);

/// Random Hermitian matrix with Gaussian entries on `qubits` qubits.
HermitianOperator random_hermitian(int qubits, unsigned long long seed);

}  // namespace oracle

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// Substitution points for mutation testing of the suite itself.
struct AcceptanceHooks {
  std::function<double(const GibbsEnsemble&, const GreedyPath&, MeasurementMode)> greedy_qfi;
};

struct AcceptanceOptions {
  AcceptanceHooks hooks;
  /// Threads for the figure renders; 1 keeps the run single threaded.
  int jobs = 1;
  /// Restrict to these criterion ids; empty runs all ten.
  std::vector<int> only;
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  3 xstate_leading_order  (1.2 s)  detail".
std::string summary_line(const CriterionResult& result);
void write_acceptance_csv(std::ostream& out, const std::vector<CriterionResult>& results);

}  // namespace qtherm
