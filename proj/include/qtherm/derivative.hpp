#pragma once

#include <cmath>
#include <type_traits>

#include "qtherm/errors.hpp"

namespace qtherm {

/// Temperature-derivative step policy: central differences with step
/// h = relative_step * T, optionally Richardson-extrapolated once with h/2.
struct DerivativePolicy {
  double relative_step = 1e-4;
  bool richardson = true;
};

template <class V>
struct DerivativeEstimate {
  V value;
  /// Max-norm distance between the returned estimate and the plain h/2
  /// central difference; a convergence diagnostic.
  double discrepancy = 0.0;
};

namespace detail {
inline double norm_of(double v) { return std::abs(v); }
template <class M>
double norm_of(const M& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}
}  // namespace detail

template <class F>
auto central_derivative_checked(F&& f, double x, const DerivativePolicy& policy = {}) {
  using V = std::decay_t<decltype(f(x))>;
  if (!(policy.relative_step > 0.0)) throw UsageError("derivative step must be positive");
  const double h = policy.relative_step * std::max(std::abs(x), 1e-300);
  if (x - h <= 0.0 && x > 0.0) throw DomainError("derivative stencil leaves the positive axis");

  auto difference = [&](double step) -> V {
    V forward = f(x + step);
    V backward = f(x - step);
    return V((forward - backward) / (2.0 * step));
  };

  V coarse = difference(h);
  if (!policy.richardson) {
    return DerivativeEstimate<V>{coarse, 0.0};
  }
  V fine = difference(0.5 * h);
  V extrapolated = V((4.0 * fine - coarse) / 3.0);
  const double discrepancy = detail::norm_of(V(extrapolated - fine));
  return DerivativeEstimate<V>{extrapolated, discrepancy};
}

template <class F>
auto central_derivative(F&& f, double x, const DerivativePolicy& policy = {}) {
  return central_derivative_checked(std::forward<F>(f), x, policy).value;
}

}  // namespace qtherm
