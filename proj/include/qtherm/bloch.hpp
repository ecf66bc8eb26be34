#pragma once

// Rank-1 projective measurements on a qubit (or on a two-dimensional block of
// a larger space), parametrised by Bloch angles, and the grid-then-simplex
// minimiser used for every measurement optimisation in the library.

#include <functional>
#include <utility>
#include <vector>

#include "qtherm/operator.hpp"

namespace qtherm {

struct BlochMeasurement {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)

  /// Columns |n>, |-n> of the measurement basis.
  CMatrix basis() const;

  /// Same measurement with theta folded into [0, pi/2] (n and -n describe
  /// one projector pair) and phi wrapped into [0, 2 pi).
  BlochMeasurement canonical() const;
};

/// Orthonormal pair cos(t/2) u0 + e^{i p} sin(t/2) u1 and its complement,
/// as two columns.
CMatrix rotated_pair(const CVector& u0, const CVector& u1, double theta, double phi);

struct BlochOptimizerOptions {
  int theta_points = 64;  // over [0, pi/2], endpoints included
  int phi_points = 64;    // over [0, 2 pi)
  double objective_tol = 1e-10;
  double angle_tol = 1e-8;
  int max_iterations = 400;
};

struct BlochOptimum {
  BlochMeasurement best;
  double value = 0.0;
  BlochMeasurement grid_best;
  double grid_value = 0.0;
  int iterations = 0;
};

/// Minimises objective(theta, phi): uniform grid (ties go to the
/// lexicographically smallest (theta, phi)), optional extra seeds, then a
/// Nelder-Mead refinement started at the best candidate.
BlochOptimum minimize_bloch(const std::function<double(double, double)>& objective,
                            const BlochOptimizerOptions& options = {},
                            const std::vector<BlochMeasurement>& seeds = {});

/// Dense brute-force grid minimum with theta over [0, pi/2] and phi over
/// [0, 2 pi); a reference for the refined optimiser.
BlochOptimum brute_force_bloch(const std::function<double(double, double)>& objective,
                               int theta_points, int phi_points);

}  // namespace qtherm
