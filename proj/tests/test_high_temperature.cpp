#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "qtherm/errors.hpp"
#include "qtherm/high_temperature.hpp"
#include "support.hpp"

using namespace qtherm;

namespace {

CMatrix exp_gibbs(const CMatrix& h, double T) {
  CMatrix w = (-h / T).exp();
  return w / w.trace().real();
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

std::shared_ptr<const ThermalModel> two_qubit(TwoQubitXYZParams p) {
  return std::make_shared<const ThermalModel>(build_two_qubit(p));
}

const TwoQubitXYZParams kFig2a{3.0, 1.0, 1.0, 1.0, 2.0};

}  // namespace

TEST_CASE("spectral norm and regime") {
  const HermitianOperator h(0.5 * pauli::Z(), SubsystemLayout::qubits(1));
  CHECK(spectral_norm(h) == doctest::Approx(0.5));
  const ThermalModel m(build_two_qubit(kFig2a));
  const double norm = spectral_norm(m.hamiltonian().total);
  CHECK(in_high_temperature_regime(m, 10 * norm));
  CHECK_FALSE(in_high_temperature_regime(m, 9 * norm));
}

TEST_CASE("first-order state") {
  const SubsystemLayout l = SubsystemLayout::qubits(2);
  const FirstOrderState zero = first_order_state(HermitianOperator::zero(l), 1.0);
  CHECK(max_abs(zero.state.matrix() - DensityMatrix::maximally_mixed(l).matrix()) < 1e-15);
  CHECK_FALSE(zero.regime_warning);

  const HermitianOperator h = build_two_qubit(kFig2a).total;
  const HermitianOperator shifted(h.matrix() + 7.0 * CMatrix::Identity(4, 4), l);
  CHECK(max_abs(first_order_state(h, 5.0).state.matrix() - first_order_state(shifted, 5.0).state.matrix()) <
        1e-15);

  // residual against the exact Gibbs state is second order in 1/T
  const double r1 = trace_distance(first_order_state(h, 50.0).state.matrix(), exp_gibbs(h.matrix(), 50.0));
  const double r2 = trace_distance(first_order_state(h, 100.0).state.matrix(), exp_gibbs(h.matrix(), 100.0));
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.2));

  const FirstOrderState cold = first_order_state(h, 0.1);
  CHECK(cold.regime_warning);
  CHECK(cold.min_eigenvalue < 0.0);
  CHECK(eigh(cold.state.matrix()).eigenvalues.minCoeff() >= -1e-12);
}

TEST_CASE("interaction-averaged Hamiltonians") {
  const SubsystemLayout l = SubsystemLayout::qubits(2);
  const CMatrix zz = kron(pauli::Z(), pauli::Z());
  CHECK(max_abs(effective_hamiltonian_A(HermitianOperator::zero(l)).matrix()) == 0.0);

  const PartitionedHamiltonian xyz = build_two_qubit(kFig2a);
  CHECK(max_abs(effective_hamiltonian_A(xyz).matrix()) < 1e-15);

  const double Jz = 1.6, c = 0.3;
  const HermitianOperator shifted(0.5 * Jz * zz + c * kron(pauli::Z(), pauli::I()), l);
  CHECK(max_abs(effective_hamiltonian_A(shifted).matrix() - c * pauli::Z()) < 1e-15);

  CVector up = CVector::Zero(2);
  up(0) = 1.0;
  const HermitianOperator ising(0.5 * Jz * zz, l);
  CHECK(max_abs(effective_hamiltonian_B_given(ising, up).matrix() - 0.5 * Jz * pauli::Z()) < 1e-15);
  CVector plus = CVector::Constant(2, 1.0);
  CHECK(max_abs(effective_hamiltonian_B_given(ising, plus).matrix()) < 1e-15);
}

TEST_CASE("conditional state of B is approximately thermal in H_B + Omega") {
  const PartitionedHamiltonian model = build_two_qubit(kFig2a);
  CVector j(2);
  j << std::cos(0.4), Complex(0.0, std::sin(0.4));
  const HermitianOperator heff = conditional_effective_hamiltonian(model, j);
  const CMatrix bra = kron(CMatrix(j.adjoint()), CMatrix::Identity(2, 2));
  auto gap = [&](double T) {
    CMatrix cond = bra * exp_gibbs(model.total.matrix(), T) * bra.adjoint();
    cond /= cond.trace().real();
    return trace_distance(cond, exp_gibbs(heff.matrix(), T));
  };
  CHECK(gap(50.0) / gap(100.0) == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("closed-form coefficients") {
  const XStateCoefficients c = xstate_leading_terms(kFig2a);
  CHECK(c.delta_F == 0.5);
  CHECK(c.mutual_information == 1.5);
  CHECK(c.classical_correlation == 1.0);
  CHECK(sech_exact(2.0, 1.0) == doctest::Approx(std::pow(1.0 / std::cosh(1.0), 2)));
  CHECK_THROWS_AS(sech_exact(1.0, 0.0), DomainError);
}

TEST_CASE("leading precision loss does not depend on the fields") {
  const double T = 100.0;
  const GreedyPath path = GreedyPath::parse("12");
  const double with_fields = std::pow(T, 4) * precision_loss(gibbs(two_qubit(kFig2a), T), path);
  const double without = std::pow(T, 4) * precision_loss(gibbs(two_qubit({0, 0, 1, 1, 2}), T), path);
  CHECK(with_fields == doctest::Approx(without).epsilon(0.02));
  CHECK(with_fields == doctest::Approx(xstate_leading_terms(kFig2a).delta_F).epsilon(0.05));
}

TEST_CASE("single exchange coupling is exact at every temperature") {
  const auto model = two_qubit({0, 0, 1, 0, 2});
  for (double T : {0.5, 2.0, 10.0}) {
    const IdentityComparison c = identity_comparison(model, GreedyPath::parse("12"), T);
    CHECK(testing::rel(c.delta_F, sech_exact(1.0, T)) < 1e-5);
    CHECK(testing::rel(c.minus_dD_over_T, sech_exact(1.0, T)) < 1e-5);
    REQUIRE(c.relative_metric.has_value());
    CHECK(*c.relative_metric < 1e-5);
  }
}

TEST_CASE("Ising coupling leaves the identity metric undefined") {
  const IdentityComparison c = identity_comparison(two_qubit({1, 0.5, 0, 0, 2}), GreedyPath::parse("12"), 1.0);
  CHECK(std::abs(c.delta_F) < 1e-10);
  CHECK(std::abs(c.minus_dD_over_T) < 1e-10);
  CHECK_FALSE(c.relative_metric.has_value());
  CHECK(identity_denominator_floor(0.0) == 1e-14);
  CHECK(identity_denominator_floor(1.0) == 1e-10);
}

TEST_CASE("order checks") {
  const auto model = two_qubit(kFig2a);
  const double norm = spectral_norm(model->hamiltonian().total);

  const AsymptoticCheck q = order_check_qfi(model, 100 * norm);
  CHECK(q.pass);
  CHECK_FALSE(q.vacuous);
  CHECK(q.predicted == doctest::Approx(spectral_variance(*model)));

  const auto trivial = std::make_shared<const ThermalModel>(unsplit(HermitianOperator::zero(SubsystemLayout::qubits(2))));
  const AsymptoticCheck v = order_check_qfi(trivial, 1.0);
  CHECK(v.vacuous);

  const AsymptoticCheck p = order_check_probability_term(model, 100.0);
  CHECK(p.pass);
  REQUIRE(p.doubling_ratios.size() == 1);

  const AsymptoticCheck id = order_check_identity(model, GreedyPath::parse("12"), {25, 50, 100, 200});
  CHECK(id.pass);
  CHECK(id.doubling_ratios.size() == 3);
}

TEST_CASE("spectral variance") {
  const ThermalModel m(unsplit(HermitianOperator(0.5 * pauli::Z(), SubsystemLayout::qubits(1))));
  CHECK(spectral_variance(m) == doctest::Approx(0.25));
}
