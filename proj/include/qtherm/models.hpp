#pragma once

// Spin Hamiltonians split as H = sum_k H_k + H_int, where H_k acts on
// subsystem k alone and H_int holds every coupling term.

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qtherm/operator.hpp"

namespace qtherm {

struct PartitionedHamiltonian {
  HermitianOperator total;
  std::vector<HermitianOperator> local_terms;  // embedded in the full space
  HermitianOperator interaction;

  const SubsystemLayout& layout() const { return total.layout(); }
};

/// H = (B1 Z_A + B2 Z_B + Jx X_A X_B + Jy Y_A Y_B + Jz Z_A Z_B) / 2
struct TwoQubitXYZParams {
  double B1 = 0.0;
  double B2 = 0.0;
  double Jx = 0.0;
  double Jy = 0.0;
  double Jz = 0.0;
};

/// Open nearest-neighbour chain
/// H = (B/2) sum_k Z_k + (J/2) sum_k (X_k X_{k+1} + Y_k Y_{k+1} + alpha Z_k Z_{k+1}).
struct ChainParams {
  int N = 3;
  double B = 0.0;
  double J = 1.0;
  double alpha = 1.0;
  int max_dimension = 1 << 12;
};

/// H = ((J + lambda) XX + (J - lambda) YY + Jz ZZ) / 2, no fields.
struct AnisotropicParams {
  double J = 1.0;
  double lambda = 0.0;
  double Jz = 0.0;
};

PartitionedHamiltonian build_two_qubit(const TwoQubitXYZParams& params);
PartitionedHamiltonian build_chain(const ChainParams& params);
PartitionedHamiltonian build_anisotropic(double J, double lambda, double Jz);

/// Wraps an arbitrary operator with zero local terms and the whole operator
/// as interaction, for Hamiltonians with no natural split.
PartitionedHamiltonian unsplit(const HermitianOperator& h);

/// Recombines local and interaction terms; checks the split identity and the
/// locality of each local term. Used by the builders and by tests.
void check_partition(const PartitionedHamiltonian& h, double tol = 1e-12);

/// Tagged model description as read from an experiment config.
using ModelSpec = std::variant<TwoQubitXYZParams, ChainParams, AnisotropicParams>;

PartitionedHamiltonian build(const ModelSpec& spec);
std::string model_kind(const ModelSpec& spec);
/// Named parameters in a stable order, for CSV columns.
std::vector<std::pair<std::string, double>> model_parameters(const ModelSpec& spec);

}  // namespace qtherm
