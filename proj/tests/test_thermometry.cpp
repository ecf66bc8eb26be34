#include <doctest.h>

#include <functional>
#include <map>
#include <unsupported/Eigen/MatrixFunctions>

#include "qtherm/errors.hpp"
#include "qtherm/thermometry.hpp"
#include "support.hpp"

using namespace qtherm;

namespace {

// Gibbs state through the Pade exponential, no spectral shortcuts.
CMatrix gibbs_by_exp(const CMatrix& h, double T) {
  CMatrix w = (-h / T).exp();
  return w / w.trace().real();
}

double five_point(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// Classical Fisher information of every complete outcome record of a
// measurement scheme, computed on exp-based Gibbs states.
double joint_fisher(const PartitionedHamiltonian& model, double T, const MeasurementScheme& scheme) {
  const int n = model.layout().size();
  std::map<std::vector<int>, const MeasurementBranch*> branch;
  for (const auto& b : scheme.branches) branch[b.outcomes] = &b;
  std::vector<CVector> records;
  std::vector<CMatrix> chosen(n);
  std::function<void(std::vector<int>)> walk = [&](std::vector<int> prefix) {
    if (static_cast<int>(prefix.size()) == n) {
      CMatrix psi = chosen[0];
      for (int s = 1; s < n; ++s) psi = kron(psi, chosen[s]);
      records.push_back(psi.col(0));
      return;
    }
    auto it = branch.find(prefix);
    if (it == branch.end()) return;
    for (int j = 0; j < it->second->projectors.size(); ++j) {
      chosen[it->second->projectors.subsystem()] = it->second->projectors.vector(j);
      auto next = prefix;
      next.push_back(j);
      walk(next);
    }
  };
  walk({});
  const CMatrix h = model.total.matrix();
  double F = 0.0;
  for (const auto& psi : records) {
    auto p = [&](double t) { return (psi.adjoint() * gibbs_by_exp(h, t) * psi)(0, 0).real(); };
    const double p0 = p(T);
    if (p0 < 1e-14) continue;
    const double dp = five_point(p, T, 1e-3 * T);
    F += dp * dp / p0;
  }
  return F;
}

const TwoQubitXYZParams kFig2a{3.0, 1.0, 1.0, 1.0, 2.0};

}  // namespace

TEST_CASE("gibbs state matches the matrix exponential") {
  std::mt19937_64 rng(11);
  for (int d : {2, 4, 8}) {
    const int n = d == 2 ? 1 : d == 4 ? 2 : 3;
    const HermitianOperator h(testing::random_hermitian(d, rng), SubsystemLayout::qubits(n));
    for (double T : {0.3, 1.0, 7.0}) {
      const GibbsEnsemble ens = gibbs(unsplit(h), T);
      CHECK(max_abs(ens.state.matrix() - gibbs_by_exp(h.matrix(), T)) < 1e-12);
      const double logZ = std::log((-h.matrix() / T).exp().trace().real());
      CHECK(ens.log_partition == doctest::Approx(logZ).epsilon(1e-12));
    }
  }
}

TEST_CASE("gibbs rejects non-positive temperature") {
  const auto h = build_two_qubit(kFig2a);
  CHECK_THROWS_AS(gibbs(h, 0.0), DomainError);
  CHECK_THROWS_AS(gibbs(h, -1.0), DomainError);
}

TEST_CASE("gibbs survives very low temperature") {
  const GibbsEnsemble ens = gibbs(build_two_qubit(kFig2a), 1e-3);
  CHECK(ens.state.matrix().trace().real() == doctest::Approx(1.0));
  CHECK(std::isfinite(qfi_gibbs(ens)));
}

TEST_CASE("heat capacity is d<H>/dT") {
  const auto model = build_two_qubit(kFig2a);
  const CMatrix h = model.total.matrix();
  for (double T : {0.5, 2.0, 10.0}) {
    auto energy = [&](double t) { return (gibbs_by_exp(h, t) * h).trace().real(); };
    const double C = heat_capacity(gibbs(model, T));
    CHECK(C == doctest::Approx(five_point(energy, T, 1e-3 * T)).epsilon(1e-8));
    CHECK(qfi_gibbs(gibbs(model, T)) == doctest::Approx(C / (T * T)).epsilon(1e-14));
  }
}

TEST_CASE("single qubit in a field") {
  const double B = 1.7;
  const HermitianOperator h(0.5 * B * pauli::Z(), SubsystemLayout::qubits(1));
  for (double T : {0.4, 1.0, 3.0}) {
    const double sech = 1.0 / std::cosh(B / (2 * T));
    const double expected = B * B * sech * sech / (4 * std::pow(T, 4));
    CHECK(qfi_gibbs(gibbs(unsplit(h), T)) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("qfi_general agrees with the spectral formula") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 6; ++trial) {
    const HermitianOperator h(testing::random_hermitian(4, rng), SubsystemLayout::qubits(2));
    const auto model = std::make_shared<const ThermalModel>(unsplit(h));
    const StateFamily family = [model](double t) { return gibbs(model, t).state; };
    for (double T : {0.7, 3.0}) {
      CHECK(testing::rel(qfi_general(family, T), qfi_gibbs(gibbs(model, T))) < 1e-8);
    }
  }
}

TEST_CASE("symmetric logarithmic derivative solves the Lyapunov equation") {
  std::mt19937_64 rng(13);
  const DensityMatrix rho = testing::random_state(SubsystemLayout::qubits(2), rng);
  CMatrix drho = testing::random_hermitian(4, rng);
  drho.diagonal().array() -= drho.trace() / 4.0;
  const CMatrix L = symmetric_log_derivative(rho.matrix(), drho);
  CHECK(max_abs(0.5 * (L * rho.matrix() + rho.matrix() * L) - drho) < 1e-12);
  CHECK(qfi_from_derivative(rho.matrix(), drho) ==
        doctest::Approx((rho.matrix() * L * L).trace().real()).epsilon(1e-12));
}

TEST_CASE("qfi on a vanishing state throws") {
  CHECK_THROWS_AS(qfi_from_derivative(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2)), DegenerateFamily);
}

TEST_CASE("classical Fisher information of a two-outcome family") {
  // p(T) = (1 + tanh(1/T)) / 2 ; analytic F = p'^2 / (p (1 - p))
  const ProbabilityFamily fam = [](double t) {
    RVector p(2);
    p(0) = 0.5 * (1 + std::tanh(1.0 / t));
    p(1) = 1 - p(0);
    return p;
  };
  for (double T : {0.5, 2.0}) {
    const double p = 0.5 * (1 + std::tanh(1.0 / T));
    const double sech = 1.0 / std::cosh(1.0 / T);
    const double dp = -0.5 * sech * sech / (T * T);
    CHECK(classical_fisher(fam, T) == doctest::Approx(dp * dp / (p * (1 - p))).epsilon(1e-9));
  }
}

TEST_CASE("product Hamiltonians lose nothing") {
  const auto model = std::make_shared<const ThermalModel>(build_two_qubit({1.3, 0.4, 0.0, 0.0, 0.0}));
  for (double T : {0.5, 2.0}) {
    const GibbsEnsemble ens = gibbs(model, T);
    const double sum_local = local_qfi(ens, 0) + local_qfi(ens, 1);
    CHECK(testing::rel(sum_local, qfi_gibbs(ens)) < 1e-9);
    CHECK(testing::rel(greedy_locc_qfi(ens, GreedyPath::parse("21")), qfi_gibbs(ens)) < 1e-9);
  }
}

TEST_CASE("greedy scheme equals the Fisher information of its joint outcomes") {
  const auto h = build_two_qubit(kFig2a);
  const auto model = std::make_shared<const ThermalModel>(h);
  for (MeasurementMode mode : {MeasurementMode::sld_eigenbasis, MeasurementMode::reduced_state_eigenbasis}) {
    for (double T : {1.0, 2.0, 10.0}) {
      const GreedyResult g = greedy_locc(gibbs(model, T), GreedyPath::parse("12"), mode);
      CHECK(testing::rel(g.total, joint_fisher(h, T, g.scheme)) < 1e-8);
      CHECK(g.step_terms.size() == 2);
      CHECK(g.step_terms[0] + g.step_terms[1] == doctest::Approx(g.total).epsilon(1e-15));
    }
  }
}

TEST_CASE("multipartite greedy scheme, every path") {
  ChainParams p;
  p.N = 3;
  p.B = 1.0;
  p.alpha = 0.3;
  const auto h = build_chain(p);
  const auto model = std::make_shared<const ThermalModel>(h);
  for (const char* path : {"123", "132", "213", "321"}) {
    const GreedyResult g = greedy_locc(gibbs(model, 1.5), GreedyPath::parse(path));
    CHECK(testing::rel(g.total, joint_fisher(h, 1.5, g.scheme)) < 1e-8);
  }
}

TEST_CASE("information ordering") {
  const auto model = std::make_shared<const ThermalModel>(build_two_qubit(kFig2a));
  for (double T : {0.3, 1.0, 5.0}) {
    const GibbsEnsemble ens = gibbs(model, T);
    const double fa = local_qfi(ens, 0);
    const double flocc = greedy_locc_qfi(ens, GreedyPath::parse("12"));
    CHECK(fa <= flocc + 1e-8);
    CHECK(flocc <= qfi_gibbs(ens) + 1e-8);
    CHECK(precision_loss(ens, GreedyPath::parse("12")) == doctest::Approx(qfi_gibbs(ens) - flocc));
  }
}

TEST_CASE("first greedy step in SLD mode attains the local QFI") {
  const auto model = std::make_shared<const ThermalModel>(build_two_qubit(kFig2a));
  const GibbsEnsemble ens = gibbs(model, 1.2);
  const GreedyResult g = greedy_locc(ens, GreedyPath::parse("12"));
  CHECK(testing::rel(g.step_terms[0], local_qfi(ens, 0)) < 1e-8);
}

TEST_CASE("degenerate reduced state picks the computational basis") {
  // B1 = B2 = 0, Jy = 0, Jz = 2 Jx: rho_A = I/2 at every T
  const auto model = std::make_shared<const ThermalModel>(build_two_qubit({0, 0, 1, 0, 2}));
  const GibbsEnsemble ens = gibbs(model, 0.5);
  for (MeasurementMode mode : {MeasurementMode::sld_eigenbasis, MeasurementMode::reduced_state_eigenbasis}) {
    const ProjectorSet m = optimal_local_measurement(ens, 0, mode);
    CHECK(std::abs(m.basis()(0, 0)) * std::abs(m.basis()(1, 1)) == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("greedy path parsing") {
  CHECK(GreedyPath::parse("132").order() == std::vector<int>{0, 2, 1});
  CHECK(GreedyPath::parse("132").to_string() == "132");
  CHECK(GreedyPath::parse("1-3-2").order() == std::vector<int>{0, 2, 1});
  CHECK(GreedyPath::identity(11).to_string() == "1-2-3-4-5-6-7-8-9-10-11");
  CHECK_THROWS_AS(GreedyPath::parse("122"), UsageError);
  CHECK_THROWS_AS(GreedyPath::parse("1a"), UsageError);
  CHECK_THROWS_AS(GreedyPath::parse(""), UsageError);
  const auto model = std::make_shared<const ThermalModel>(build_two_qubit(kFig2a));
  CHECK_THROWS_AS(greedy_locc_qfi(gibbs(model, 1.0), GreedyPath::parse("123")), UsageError);
  CHECK(parse_measurement_mode("reduced_state") == MeasurementMode::reduced_state_eigenbasis);
  CHECK_THROWS_AS(parse_measurement_mode("povm"), UsageError);
}
