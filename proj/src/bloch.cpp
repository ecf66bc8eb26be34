#include "qtherm/bloch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace qtherm {

namespace {

constexpr double kPi = std::numbers::pi;

struct Vertex {
  double theta;
  double phi;
  double value;
};

BlochOptimum grid_search(const std::function<double(double, double)>& objective, int n_theta,
                         int n_phi) {
  BlochOptimum out;
  bool first = true;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = 0.5 * kPi * i / std::max(1, n_theta - 1);
    // Every phi gives the same pole measurement.
    const int phis = (i == 0) ? 1 : n_phi;
    for (int j = 0; j < phis; ++j) {
      const double phi = 2.0 * kPi * j / n_phi;
      const double v = objective(theta, phi);
      if (first || v < out.grid_value) {
        out.grid_value = v;
        out.grid_best = {theta, phi};
        first = false;
      }
    }
  }
  out.best = out.grid_best;
  out.value = out.grid_value;
  return out;
}

}  // namespace

CMatrix BlochMeasurement::basis() const {
  CVector e0 = CVector::Zero(2);
  CVector e1 = CVector::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  return rotated_pair(e0, e1, theta, phi);
}

BlochMeasurement BlochMeasurement::canonical() const {
  double x = std::sin(theta) * std::cos(phi);
  double y = std::sin(theta) * std::sin(phi);
  double z = std::cos(theta);
  if (z < 0.0) {
    x = -x;
    y = -y;
    z = -z;
  }
  const double t = std::acos(std::clamp(z, -1.0, 1.0));
  double p = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
  if (p < 0.0) p += 2.0 * kPi;
  if (p >= 2.0 * kPi) p -= 2.0 * kPi;
  return {t, p};
}

CMatrix rotated_pair(const CVector& u0, const CVector& u1, double theta, double phi) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  const Complex phase = std::polar(1.0, phi);
  CMatrix out(u0.size(), 2);
  out.col(0) = c * u0 + phase * s * u1;
  out.col(1) = -std::conj(phase) * s * u0 + c * u1;
  return out;
}

BlochOptimum minimize_bloch(const std::function<double(double, double)>& objective,
                            const BlochOptimizerOptions& options,
                            const std::vector<BlochMeasurement>& seeds) {
  BlochOptimum out = grid_search(objective, options.theta_points, options.phi_points);
  Vertex start{out.grid_best.theta, out.grid_best.phi, out.grid_value};
  for (const auto& seed : seeds) {
    const double v = objective(seed.theta, seed.phi);
    if (v < start.value) start = {seed.theta, seed.phi, v};
  }

  const double step_theta = 0.5 * kPi / std::max(1, options.theta_points - 1);
  const double step_phi = 2.0 * kPi / options.phi_points;
  std::array<Vertex, 3> simplex{
      start,
      Vertex{start.theta + step_theta, start.phi, objective(start.theta + step_theta, start.phi)},
      Vertex{start.theta, start.phi + step_phi, objective(start.theta, start.phi + step_phi)}};

  auto order = [&] {
    // Stable ordering keeps the earliest-found vertex first on ties.
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
  };
  auto eval = [&](double t, double p) { return Vertex{t, p, objective(t, p)}; };

  int it = 0;
  order();
  for (; it < options.max_iterations; ++it) {
    const double spread = simplex[2].value - simplex[0].value;
    double diameter = 0.0;
    for (int a = 1; a < 3; ++a) {
      diameter = std::max({diameter, std::abs(simplex[a].theta - simplex[0].theta),
                           std::abs(simplex[a].phi - simplex[0].phi)});
    }
    if (spread <= options.objective_tol && diameter <= options.angle_tol) break;

    const double ct = 0.5 * (simplex[0].theta + simplex[1].theta);
    const double cp = 0.5 * (simplex[0].phi + simplex[1].phi);
    const Vertex& worst = simplex[2];

    const Vertex reflected = eval(2.0 * ct - worst.theta, 2.0 * cp - worst.phi);
    if (reflected.value < simplex[0].value) {
      const Vertex expanded = eval(3.0 * ct - 2.0 * worst.theta, 3.0 * cp - 2.0 * worst.phi);
      simplex[2] = expanded.value < reflected.value ? expanded : reflected;
    } else if (reflected.value < simplex[1].value) {
      simplex[2] = reflected;
    } else {
      const bool outside = reflected.value < worst.value;
      const Vertex& anchor = outside ? reflected : worst;
      const Vertex contracted =
          eval(ct + 0.5 * (anchor.theta - ct), cp + 0.5 * (anchor.phi - cp));
      if (contracted.value < anchor.value) {
        simplex[2] = contracted;
      } else {
        for (int a = 1; a < 3; ++a) {
          simplex[a] = eval(simplex[0].theta + 0.5 * (simplex[a].theta - simplex[0].theta),
                            simplex[0].phi + 0.5 * (simplex[a].phi - simplex[0].phi));
        }
      }
    }
    order();
  }

  out.best = BlochMeasurement{simplex[0].theta, simplex[0].phi}.canonical();
  out.value = simplex[0].value;
  out.iterations = it;
  return out;
}

BlochOptimum brute_force_bloch(const std::function<double(double, double)>& objective,
                               int theta_points, int phi_points) {
  return grid_search(objective, theta_points, phi_points);
}

}  // namespace qtherm
