#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "qtherm/errors.hpp"
#include "qtherm/operator.hpp"
#include "support.hpp"

using namespace qtherm;

TEST_CASE("layout bookkeeping") {
  const SubsystemLayout l({2, 3, 2});
  CHECK(l.total() == 12);
  CHECK(l.without(1) == SubsystemLayout({2, 2}));
  const std::vector<int> pick{2, 0};
  CHECK(l.select(pick).dims() == std::vector<int>{2, 2});
  CHECK_THROWS_AS(l.dim(3), UsageError);
  CHECK_THROWS_AS(SubsystemLayout({2, 0}), InvariantViolation);
}

TEST_CASE("operator validation") {
  CMatrix m = pauli::X();
  m(0, 1) = Complex(1.0, 0.5);
  CHECK_THROWS_AS(HermitianOperator(m, SubsystemLayout::qubits(1)), InvariantViolation);
  CHECK_THROWS_AS(HermitianOperator(pauli::X(), SubsystemLayout::qubits(2)), Error);

  CMatrix bad_trace = CMatrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix(bad_trace, SubsystemLayout::qubits(1)), InvariantViolation);
  CMatrix negative(2, 2);
  negative << 1.1, 0, 0, -0.1;
  CHECK_THROWS_AS(DensityMatrix(negative, SubsystemLayout::qubits(1)), InvariantViolation);
  CMatrix tiny_negative(2, 2);
  tiny_negative << 1.0 + 5e-11, 0, 0, -5e-11;
  CHECK_NOTHROW(DensityMatrix(tiny_negative, SubsystemLayout::qubits(1)));
}

TEST_CASE("eigh ascending and reconstructs") {
  std::mt19937_64 rng(1);
  const CMatrix h = testing::random_hermitian(6, rng);
  const EigenDecomposition e = eigh(h);
  for (int k = 1; k < 6; ++k) CHECK(e.eigenvalues(k) >= e.eigenvalues(k - 1));
  const CMatrix back = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.adjoint();
  CHECK(max_abs(back - h) < 1e-12);
}

TEST_CASE("matrix_function exp matches the Pade exponential") {
  std::mt19937_64 rng(2);
  const CMatrix h = testing::random_hermitian(4, rng);
  const HermitianOperator op(h, SubsystemLayout::qubits(2));
  const CMatrix ours = matrix_function(op, [](double x) { return std::exp(-0.7 * x); }).matrix();
  const CMatrix ref = (-0.7 * h).exp();
  CHECK(max_abs(ours - ref) < 1e-12);
  CHECK_THROWS_AS(matrix_function(op, [](double x) { return std::log(x - 100.0); }), DomainError);
}

TEST_CASE("partial trace agrees with explicit index sums") {
  std::mt19937_64 rng(3);
  const SubsystemLayout l({2, 3, 2});
  const DensityMatrix rho = testing::random_state(l, rng);
  for (const std::vector<int>& keep : {std::vector<int>{0}, {1}, {2}, {0, 2}, {1, 2}, {0, 1}}) {
    const CMatrix ours = partial_trace(rho.matrix(), l, keep);
    CHECK(max_abs(ours - testing::slow_partial_trace(rho.matrix(), l.dims(), keep)) < 1e-14);
  }
  // product states factor
  const DensityMatrix a = testing::random_state(SubsystemLayout::qubits(1), rng);
  const DensityMatrix b = testing::random_state(SubsystemLayout({3}), rng);
  const DensityMatrix ab(kron(a.matrix(), b.matrix()), SubsystemLayout({2, 3}));
  CHECK(max_abs(partial_trace(ab, {0}).matrix() - a.matrix()) < 1e-14);
  CHECK(max_abs(partial_trace(ab, {1}).matrix() - b.matrix()) < 1e-14);
}

TEST_CASE("contract_subsystem and embed against kron") {
  std::mt19937_64 rng(4);
  const SubsystemLayout l({2, 2, 2});
  const CMatrix op = testing::random_hermitian(8, rng);
  CVector v = testing::ginibre(2, 1, rng).col(0);
  v.normalize();
  // <v|_1 op |v>_1 = (I x <v| x I) op (I x |v> x I)
  const CMatrix bra = kron(kron(CMatrix::Identity(2, 2), CMatrix(v.adjoint())), CMatrix::Identity(2, 2));
  const CMatrix expected = bra * op * bra.adjoint();
  CHECK(max_abs(contract_subsystem(op, l, 1, v) - expected) < 1e-13);

  const CMatrix z = pauli::Z();
  CHECK(max_abs(embed(z, l, 2) - kron(CMatrix::Identity(4, 4), z)) == 0.0);
  CHECK(max_abs(embed(z, l, 0) - kron(z, CMatrix::Identity(4, 4))) == 0.0);
}

TEST_CASE("entropies") {
  const SubsystemLayout l = SubsystemLayout::qubits(3);
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(l)) == doctest::Approx(std::log(8.0)).epsilon(1e-14));
  CVector psi = CVector::Zero(8);
  psi(3) = 1.0;
  CHECK(std::abs(von_neumann_entropy(DensityMatrix::pure(psi, l))) < 1e-14);
  CHECK(entropy_deficit(DensityMatrix::maximally_mixed(l).matrix()) == 0.0);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const DensityMatrix rho = testing::random_state(l, rng);
    CHECK(entropy_deficit(rho.matrix()) == doctest::Approx(std::log(8.0) - von_neumann_entropy(rho)).epsilon(1e-12));
    // the 2x2 closed form and the general solver agree
    const DensityMatrix q = testing::random_state(SubsystemLayout::qubits(1), rng);
    const RVector ev = eigh(q.matrix()).eigenvalues;
    const double s = -(ev(0) * std::log(ev(0)) + ev(1) * std::log(ev(1)));
    CHECK(von_neumann_entropy(q) == doctest::Approx(s).epsilon(1e-13));
  }
  const std::vector<double> p{0.5, 0.25, 0.25, 0.0};
  CHECK(shannon_entropy(p) == doctest::Approx(1.5 * std::log(2.0)));
}

TEST_CASE("fidelity") {
  std::mt19937_64 rng(6);
  const SubsystemLayout l = SubsystemLayout::qubits(2);
  const DensityMatrix rho = testing::random_state(l, rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));
  // commuting states: (sum sqrt(p q))^2
  CMatrix a = CMatrix::Zero(4, 4), b = CMatrix::Zero(4, 4);
  const double p[] = {0.1, 0.2, 0.3, 0.4}, q[] = {0.4, 0.3, 0.2, 0.1};
  double bc = 0.0;
  for (int k = 0; k < 4; ++k) {
    a(k, k) = p[k];
    b(k, k) = q[k];
    bc += std::sqrt(p[k] * q[k]);
  }
  CHECK(fidelity(DensityMatrix(a, l), DensityMatrix(b, l)) == doctest::Approx(bc * bc).epsilon(1e-12));
  CVector u = CVector::Zero(4), w = CVector::Zero(4);
  u(0) = 1.0;
  w(1) = 1.0;
  CHECK(fidelity(DensityMatrix::pure(u, l), DensityMatrix::pure(w, l)) < 1e-14);
}
