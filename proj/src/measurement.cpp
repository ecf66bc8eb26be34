#include "qtherm/measurement.hpp"

#include <cmath>

#include "qtherm/errors.hpp"

namespace qtherm {

ProjectorSet::ProjectorSet(int subsystem, CMatrix basis)
    : subsystem_(subsystem), basis_(std::move(basis)) {
  if (basis_.rows() != basis_.cols()) {
    throw InvariantViolation("projector set must be complete (square basis)");
  }
  const CMatrix gram = basis_.adjoint() * basis_;
  if (max_abs(gram - CMatrix::Identity(basis_.cols(), basis_.cols())) > 1e-10) {
    throw InvariantViolation("projector set is not orthonormal");
  }
}

ProjectorSet computational_basis(int subsystem, int dim) {
  return {subsystem, CMatrix::Identity(dim, dim)};
}

std::vector<double> outcome_probabilities(const CMatrix& rho, const SubsystemLayout& layout,
                                          const ProjectorSet& proj) {
  const std::vector<int> keep{proj.subsystem()};
  const CMatrix reduced = partial_trace(rho, layout, keep);
  std::vector<double> p(static_cast<std::size_t>(proj.size()));
  for (int j = 0; j < proj.size(); ++j) {
    const CVector b = proj.vector(j);
    p[static_cast<std::size_t>(j)] = std::max(0.0, (b.adjoint() * reduced * b)(0, 0).real());
  }
  return p;
}

ConditionalState conditional_state(const DensityMatrix& rho, const ProjectorSet& proj, int j) {
  const auto& layout = rho.layout();
  if (layout.size() < 2) throw UsageError("conditional state needs at least two subsystems");
  if (proj.basis().rows() != layout.dim(proj.subsystem())) {
    throw UsageError("projector dimension does not match subsystem");
  }
  CMatrix rest = contract_subsystem(rho.matrix(), layout, proj.subsystem(), proj.vector(j));
  const double p = rest.trace().real();
  ConditionalState out;
  out.probability = std::max(0.0, p);
  if (p >= kMinOutcomeProbability) {
    rest /= p;
    rest = 0.5 * (rest + rest.adjoint()).eval();
    out.state = DensityMatrix::from_trusted(std::move(rest), layout.without(proj.subsystem()));
  }
  return out;
}

DensityMatrix dephase(const DensityMatrix& rho, const ProjectorSet& proj) {
  const auto& layout = rho.layout();
  CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
  for (int j = 0; j < proj.size(); ++j) {
    const CMatrix p = embed(proj.projector(j), layout, proj.subsystem());
    out += p * rho.matrix() * p;
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix::from_trusted(std::move(out), layout);
}

double dephased_entropy(const CMatrix& rho, const SubsystemLayout& layout,
                        const ProjectorSet& proj) {
  if (layout.size() == 1) {
    const auto p = outcome_probabilities(rho, layout, proj);
    return shannon_entropy(p);
  }
  std::vector<double> probs;
  double conditional = 0.0;
  for (int j = 0; j < proj.size(); ++j) {
    CMatrix rest = contract_subsystem(rho, layout, proj.subsystem(), proj.vector(j));
    const double p = std::max(0.0, rest.trace().real());
    probs.push_back(p);
    if (p < kMinOutcomeProbability) continue;
    rest /= p;
    conditional += p * von_neumann_entropy(rest);
  }
  return shannon_entropy(probs) + conditional;
}

double conditional_entropy_after_measurement(const DensityMatrix& rho, const ProjectorSet& proj) {
  double total = 0.0;
  for (int j = 0; j < proj.size(); ++j) {
    const ConditionalState c = conditional_state(rho, proj, j);
    if (c.state) total += c.probability * von_neumann_entropy(*c.state);
  }
  return total;
}

std::vector<std::vector<int>> degenerate_blocks(const RVector& ascending, double tol) {
  std::vector<std::vector<int>> blocks;
  for (int k = 0; k < ascending.size(); ++k) {
    if (k > 0 && ascending(k) - ascending(k - 1) <= tol) {
      blocks.back().push_back(k);
    } else {
      blocks.push_back({k});
    }
  }
  return blocks;
}

CMatrix canonical_frame(const CMatrix& columns) {
  const Eigen::Index d = columns.rows();
  const Eigen::Index m = columns.cols();
  const CMatrix projector = columns * columns.adjoint();
  CMatrix frame(d, m);
  Eigen::Index found = 0;
  for (Eigen::Index k = 0; k < d && found < m; ++k) {
    CVector v = projector.col(k);
    for (Eigen::Index q = 0; q < found; ++q) {
      v -= frame.col(q) * (frame.col(q).adjoint() * v)(0, 0);
    }
    const double n = v.norm();
    if (n < 1e-6) continue;
    v /= n;
    // Fix the phase: first significant component real and positive.
    for (Eigen::Index r = 0; r < d; ++r) {
      if (std::abs(v(r)) > 1e-12) {
        v *= std::conj(v(r)) / std::abs(v(r));
        break;
      }
    }
    frame.col(found++) = v;
  }
  if (found < m) return columns;
  return frame;
}

CMatrix minimize_within_blocks(const CMatrix& rho, const SubsystemLayout& layout, int subsystem,
                               CMatrix basis, const std::vector<std::vector<int>>& blocks,
                               const BlochOptimizerOptions& options) {
  for (const auto& block : blocks) {
    if (block.size() < 2) continue;
    CMatrix span(basis.rows(), static_cast<Eigen::Index>(block.size()));
    for (std::size_t q = 0; q < block.size(); ++q) {
      span.col(static_cast<Eigen::Index>(q)) = basis.col(block[q]);
    }
    const CMatrix frame = canonical_frame(span);
    for (std::size_t q = 0; q < block.size(); ++q) {
      basis.col(block[q]) = frame.col(static_cast<Eigen::Index>(q));
    }
    // TODO: larger blocks keep the canonical frame; only qubit-sized blocks are rotated.
    if (block.size() != 2) continue;

    const CVector u0 = frame.col(0);
    const CVector u1 = frame.col(1);
    CMatrix trial = basis;
    auto objective = [&](double theta, double phi) {
      const CMatrix pair = rotated_pair(u0, u1, theta, phi);
      trial.col(block[0]) = pair.col(0);
      trial.col(block[1]) = pair.col(1);
      return dephased_entropy(rho, layout, ProjectorSet(subsystem, trial));
    };
    const BlochOptimum opt = minimize_bloch(objective, options);
    const CMatrix pair = rotated_pair(u0, u1, opt.best.theta, opt.best.phi);
    basis.col(block[0]) = pair.col(0);
    basis.col(block[1]) = pair.col(1);
  }
  return basis;
}

ProjectorSet reduced_state_eigenbasis(const DensityMatrix& rho, int subsystem,
                                      const BlochOptimizerOptions& options) {
  const std::vector<int> keep{subsystem};
  const CMatrix reduced = partial_trace(rho.matrix(), rho.layout(), keep);
  const EigenDecomposition eig = eigh(reduced);
  const auto blocks = degenerate_blocks(eig.eigenvalues, kDegeneracyTol);
  CMatrix basis = minimize_within_blocks(rho.matrix(), rho.layout(), subsystem, eig.eigenvectors,
                                         blocks, options);
  return {subsystem, std::move(basis)};
}

}  // namespace qtherm
