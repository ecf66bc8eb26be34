#include "qtherm/models.hpp"

#include <cmath>
#include <sstream>

#include "qtherm/errors.hpp"

namespace qtherm {

namespace {

CMatrix two_site(const CMatrix& a, const CMatrix& b, const SubsystemLayout& layout, int i, int j) {
  return embed(a, layout, i) * embed(b, layout, j);
}

PartitionedHamiltonian assemble(const SubsystemLayout& layout, std::vector<CMatrix> locals,
                                CMatrix interaction) {
  CMatrix total = interaction;
  std::vector<HermitianOperator> local_terms;
  local_terms.reserve(locals.size());
  for (auto& m : locals) {
    total += m;
    local_terms.emplace_back(std::move(m), layout);
  }
  PartitionedHamiltonian h{HermitianOperator(std::move(total), layout), std::move(local_terms),
                           HermitianOperator(std::move(interaction), layout)};
  check_partition(h);
  return h;
}

}  // namespace

PartitionedHamiltonian build_two_qubit(const TwoQubitXYZParams& p) {
  for (double v : {p.B1, p.B2, p.Jx, p.Jy, p.Jz}) {
    if (!std::isfinite(v)) throw DomainError("two-qubit parameters must be finite");
  }
  const auto layout = SubsystemLayout::qubits(2);
  using namespace pauli;
  CMatrix interaction = 0.5 * (p.Jx * kron(X(), X()) + p.Jy * kron(Y(), Y()) +
                               p.Jz * kron(Z(), Z()));
  return assemble(layout, {0.5 * p.B1 * kron(Z(), I()), 0.5 * p.B2 * kron(I(), Z())},
                  std::move(interaction));
}

PartitionedHamiltonian build_chain(const ChainParams& p) {
  if (p.N < 2) throw UsageError("chain needs N >= 2");
  for (double v : {p.B, p.J, p.alpha}) {
    if (!std::isfinite(v)) throw DomainError("chain parameters must be finite");
  }
  if (p.N > 30 || (1 << p.N) > p.max_dimension) {
    std::ostringstream msg;
    msg << "chain of " << p.N << " qubits exceeds dimension cap " << p.max_dimension;
    throw ResourceError(msg.str());
  }
  const auto layout = SubsystemLayout::qubits(p.N);
  const int d = layout.total();
  using namespace pauli;

  std::vector<CMatrix> locals;
  for (int k = 0; k < p.N; ++k) locals.push_back(0.5 * p.B * embed(Z(), layout, k));

  CMatrix interaction = CMatrix::Zero(d, d);
  for (int k = 0; k + 1 < p.N; ++k) {
    interaction += 0.5 * p.J *
                   (two_site(X(), X(), layout, k, k + 1) + two_site(Y(), Y(), layout, k, k + 1) +
                    p.alpha * two_site(Z(), Z(), layout, k, k + 1));
  }
  return assemble(layout, std::move(locals), std::move(interaction));
}

PartitionedHamiltonian build_anisotropic(double J, double lambda, double Jz) {
  return build_two_qubit({0.0, 0.0, J + lambda, J - lambda, Jz});
}

void check_partition(const PartitionedHamiltonian& h, double tol) {
  const auto& layout = h.layout();
  if (static_cast<int>(h.local_terms.size()) != layout.size()) {
    throw InvariantViolation("one local term per subsystem is required");
  }
  CMatrix sum = h.interaction.matrix();
  for (int k = 0; k < layout.size(); ++k) {
    const CMatrix& term = h.local_terms[static_cast<std::size_t>(k)].matrix();
    sum += term;
    // A term local to k equals embed(Tr_rest(term) / d_rest).
    const std::vector<int> keep{k};
    const double d_rest = static_cast<double>(layout.total() / layout.dim(k));
    const CMatrix local = partial_trace(term, layout, keep) / d_rest;
    if (max_abs(embed(local, layout, k) - term) > tol * std::max(1.0, max_abs(term))) {
      throw InvariantViolation("local term acts outside its subsystem");
    }
  }
  if (max_abs(sum - h.total.matrix()) > tol * std::max(1.0, max_abs(h.total.matrix()))) {
    throw InvariantViolation("H != sum of local terms + interaction");
  }
}

PartitionedHamiltonian build(const ModelSpec& spec) {
  return std::visit(
      [](const auto& p) -> PartitionedHamiltonian {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TwoQubitXYZParams>) {
          return build_two_qubit(p);
        } else if constexpr (std::is_same_v<P, ChainParams>) {
          return build_chain(p);
        } else {
          return build_anisotropic(p.J, p.lambda, p.Jz);
        }
      },
      spec);
}

std::string model_kind(const ModelSpec& spec) {
  switch (spec.index()) {
    case 0:
      return "two_qubit";
    case 1:
      return "chain";
    default:
      return "anisotropic";
  }
}

std::vector<std::pair<std::string, double>> model_parameters(const ModelSpec& spec) {
  return std::visit(
      [](const auto& p) -> std::vector<std::pair<std::string, double>> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, TwoQubitXYZParams>) {
          return {{"B1", p.B1}, {"B2", p.B2}, {"Jx", p.Jx}, {"Jy", p.Jy}, {"Jz", p.Jz}};
        } else if constexpr (std::is_same_v<P, ChainParams>) {
          return {{"N", static_cast<double>(p.N)}, {"B", p.B}, {"J", p.J}, {"alpha", p.alpha}};
        } else {
          return {{"J", p.J}, {"lambda", p.lambda}, {"Jz", p.Jz}};
        }
      },
      spec);
}

PartitionedHamiltonian unsplit(const HermitianOperator& h) {
  PartitionedHamiltonian out{h, {}, h};
  for (int k = 0; k < h.layout().size(); ++k) {
    out.local_terms.push_back(HermitianOperator::zero(h.layout()));
  }
  return out;
}

}  // namespace qtherm
