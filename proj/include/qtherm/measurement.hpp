#pragma once

// Local projective measurements: projector sets, post-measurement states,
// dephasing maps and eigenbasis selection with degenerate-block handling.

#include <optional>
#include <vector>

#include "qtherm/bloch.hpp"
#include "qtherm/operator.hpp"

namespace qtherm {

/// Outcome probabilities below this are dropped from every Fisher sum and
/// conditional average.
inline constexpr double kMinOutcomeProbability = 1e-14;

/// Eigenvalues closer than this are treated as one degenerate block.
inline constexpr double kDegeneracyTol = 1e-10;

/// Complete orthogonal rank-1 projectors |b_j><b_j| on one subsystem; the
/// b_j are the columns of `basis`.
class ProjectorSet {
 public:
  ProjectorSet() = default;
  /// Throws InvariantViolation unless basis^dagger basis = I within 1e-10.
  ProjectorSet(int subsystem, CMatrix basis);

  int subsystem() const { return subsystem_; }
  int size() const { return static_cast<int>(basis_.cols()); }
  const CMatrix& basis() const { return basis_; }
  CVector vector(int j) const { return basis_.col(j); }
  CMatrix projector(int j) const { return basis_.col(j) * basis_.col(j).adjoint(); }

 private:
  int subsystem_ = 0;
  CMatrix basis_;
};

ProjectorSet computational_basis(int subsystem, int dim);

struct ConditionalState {
  double probability = 0.0;
  /// State of the remaining subsystems; empty when probability < 1e-14.
  std::optional<DensityMatrix> state;
};

/// Outcome j of measuring `proj` on a state: p_j = Tr[(P_j x I) rho] and the
/// normalised state of the other subsystems.
ConditionalState conditional_state(const DensityMatrix& rho, const ProjectorSet& proj, int j);

/// Outcome probabilities of `proj` on `rho`.
std::vector<double> outcome_probabilities(const CMatrix& rho, const SubsystemLayout& layout,
                                          const ProjectorSet& proj);

/// sum_j (P_j x I) rho (P_j x I).
DensityMatrix dephase(const DensityMatrix& rho, const ProjectorSet& proj);

/// S(dephase(rho, proj)) evaluated as H(p) + sum_j p_j S(rho_rest|j); exact
/// for rank-1 projectors and much cheaper than the dense dephased entropy.
double dephased_entropy(const CMatrix& rho, const SubsystemLayout& layout,
                        const ProjectorSet& proj);

/// sum_j p_j S(rho_rest|j).
double conditional_entropy_after_measurement(const DensityMatrix& rho, const ProjectorSet& proj);

/// Groups of indices into an ascending spectrum whose neighbours differ by
/// at most `tol`.
std::vector<std::vector<int>> degenerate_blocks(const RVector& ascending, double tol);

/// Orthonormal frame of the span of `columns` that is built from projected
/// computational basis vectors, so equal subspaces always give equal frames.
CMatrix canonical_frame(const CMatrix& columns);

/// Replaces each two-dimensional block of `basis` (subsystem `subsystem` of
/// `rho`) by the rotation inside the block that minimises S(dephase(rho)).
/// Larger blocks keep their canonical frame.
CMatrix minimize_within_blocks(const CMatrix& rho, const SubsystemLayout& layout, int subsystem,
                               CMatrix basis, const std::vector<std::vector<int>>& blocks,
                               const BlochOptimizerOptions& options = {});

/// Eigenbasis of the reduced state of `subsystem`; ties are resolved by
/// minimising the dephased entropy of `rho` inside each degenerate block.
ProjectorSet reduced_state_eigenbasis(const DensityMatrix& rho, int subsystem,
                                      const BlochOptimizerOptions& options = {});

}  // namespace qtherm
