#include <doctest.h>

#include "qtherm/errors.hpp"
#include "qtherm/models.hpp"

using namespace qtherm;

namespace {

// Open XXZ chain built directly on bit strings; bit k of the index is site
// N-1-k (site 0 most significant).
CMatrix chain_by_bits(int N, double B, double J, double alpha) {
  const int d = 1 << N;
  CMatrix h = CMatrix::Zero(d, d);
  auto spin = [N](int idx, int site) { return ((idx >> (N - 1 - site)) & 1) ? -1.0 : 1.0; };
  for (int s = 0; s < d; ++s) {
    double diag = 0.0;
    for (int k = 0; k < N; ++k) diag += 0.5 * B * spin(s, k);
    for (int k = 0; k + 1 < N; ++k) {
      diag += 0.5 * J * alpha * spin(s, k) * spin(s, k + 1);
      if (spin(s, k) != spin(s, k + 1)) {
        // (XX + YY)/2 on an antiparallel pair swaps it with amplitude 1
        const int flipped = s ^ (1 << (N - 1 - k)) ^ (1 << (N - 2 - k));
        h(flipped, s) += J;
      }
    }
    h(s, s) += diag;
  }
  return h;
}

}  // namespace

TEST_CASE("two-qubit XYZ matrix in the computational basis") {
  const TwoQubitXYZParams p{0.3, -1.1, 0.7, 0.2, 1.9};
  const PartitionedHamiltonian h = build_two_qubit(p);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 0.5 * (p.B1 + p.B2 + p.Jz);
  expected(1, 1) = 0.5 * (p.B1 - p.B2 - p.Jz);
  expected(2, 2) = 0.5 * (-p.B1 + p.B2 - p.Jz);
  expected(3, 3) = 0.5 * (-p.B1 - p.B2 + p.Jz);
  expected(1, 2) = expected(2, 1) = 0.5 * (p.Jx + p.Jy);
  expected(0, 3) = expected(3, 0) = 0.5 * (p.Jx - p.Jy);
  CHECK(max_abs(h.total.matrix() - expected) < 1e-15);
  CHECK_NOTHROW(check_partition(h));
  CHECK(h.local_terms.size() == 2);
}

TEST_CASE("chain agrees with bit-string construction") {
  for (int N : {2, 3, 4, 5}) {
    ChainParams p;
    p.N = N;
    p.B = 0.8;
    p.J = 1.3;
    p.alpha = 0.3;
    const PartitionedHamiltonian h = build_chain(p);
    CHECK(max_abs(h.total.matrix() - chain_by_bits(N, p.B, p.J, p.alpha)) < 1e-14);
    CHECK_NOTHROW(check_partition(h));
  }
}

TEST_CASE("chain conserves total magnetisation") {
  ChainParams p;
  p.N = 4;
  p.B = 1.0;
  p.alpha = 0.3;
  const CMatrix h = build_chain(p).total.matrix();
  CMatrix mz = CMatrix::Zero(16, 16);
  const SubsystemLayout l = SubsystemLayout::qubits(4);
  for (int k = 0; k < 4; ++k) mz += embed(pauli::Z(), l, k);
  CHECK(max_abs(h * mz - mz * h) < 1e-13);
}

TEST_CASE("anisotropic preset") {
  const PartitionedHamiltonian a = build_anisotropic(1.0, 0.4, -0.6);
  const PartitionedHamiltonian b = build_two_qubit({0.0, 0.0, 1.4, 0.6, -0.6});
  CHECK(max_abs(a.total.matrix() - b.total.matrix()) == 0.0);
}

TEST_CASE("builder errors") {
  ChainParams tiny;
  tiny.N = 1;
  CHECK_THROWS_AS(build_chain(tiny), UsageError);
  ChainParams big;
  big.N = 13;
  CHECK_THROWS_AS(build_chain(big), ResourceError);
  big.max_dimension = 1 << 13;
  big.N = 5;
  CHECK_NOTHROW(build_chain(big));
}

TEST_CASE("partition check catches a non-local term") {
  PartitionedHamiltonian h = build_two_qubit({1.0, 1.0, 1.0, 0.0, 0.0});
  const SubsystemLayout l = h.layout();
  h.local_terms[0] = HermitianOperator(kron(pauli::X(), pauli::X()), l);
  CHECK_THROWS_AS(check_partition(h), InvariantViolation);
}

TEST_CASE("model description dispatch") {
  const ModelSpec spec = ChainParams{3, 1.0, 1.0, 0.3};
  CHECK(model_kind(spec) == "chain");
  CHECK(build(spec).layout().size() == 3);
  const auto params = model_parameters(spec);
  REQUIRE(params.size() == 4);
  CHECK(params[0].first == "N");
  CHECK(params[3].second == 0.3);
  CHECK(model_kind(ModelSpec{AnisotropicParams{}}) == "anisotropic");
}

TEST_CASE("unsplit keeps the whole operator as interaction") {
  const HermitianOperator h(kron(pauli::Z(), pauli::X()), SubsystemLayout::qubits(2));
  const PartitionedHamiltonian p = unsplit(h);
  CHECK_NOTHROW(check_partition(p));
  CHECK(max_abs(p.interaction.matrix() - h.matrix()) == 0.0);
}
