#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qtherm/operator.hpp"

namespace testing {

inline qtherm::CMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  qtherm::CMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = {n(rng), n(rng)};
  return g;
}

// Full-rank random state G G^dagger / Tr.
inline qtherm::DensityMatrix random_state(const qtherm::SubsystemLayout& layout, std::mt19937_64& rng) {
  const int d = layout.total();
  const qtherm::CMatrix g = ginibre(d, d, rng);
  qtherm::CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return {0.5 * (rho + rho.adjoint()), layout};
}

inline qtherm::CMatrix random_hermitian(int d, std::mt19937_64& rng) {
  const qtherm::CMatrix g = ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

inline double rel(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Explicit-index partial trace: keeps a list of subsystems, sums the rest.
inline qtherm::CMatrix slow_partial_trace(const qtherm::CMatrix& op, const std::vector<int>& dims,
                                          const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  int total = 1;
  for (int d : dims) total *= d;
  auto digits = [&](int idx) {
    std::vector<int> out(n);
    for (int s = n - 1; s >= 0; --s) {
      out[s] = idx % dims[s];
      idx /= dims[s];
    }
    return out;
  };
  auto kept_index = [&](const std::vector<int>& dg) {
    int idx = 0;
    for (int s : keep) idx = idx * dims[s] + dg[s];
    return idx;
  };
  int dk = 1;
  for (int s : keep) dk *= dims[s];
  qtherm::CMatrix out = qtherm::CMatrix::Zero(dk, dk);
  for (int i = 0; i < total; ++i) {
    for (int j = 0; j < total; ++j) {
      const auto di = digits(i), dj = digits(j);
      bool traced_equal = true;
      for (int s = 0; s < n; ++s) {
        const bool kept = std::find(keep.begin(), keep.end(), s) != keep.end();
        if (!kept && di[s] != dj[s]) traced_equal = false;
      }
      if (traced_equal) out(kept_index(di), kept_index(dj)) += op(i, j);
    }
  }
  return out;
}

}  // namespace testing
