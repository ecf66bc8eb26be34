#include "qtherm/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qtherm/errors.hpp"

namespace qtherm {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kPositivityTol = 1e-10;

void require_square(const CMatrix& m, const SubsystemLayout& layout) {
  if (m.rows() != m.cols()) {
    throw UsageError("operator must be square");
  }
  if (m.rows() != layout.total()) {
    std::ostringstream msg;
    msg << "operator dimension " << m.rows() << " does not match layout total "
        << layout.total();
    throw UsageError(msg.str());
  }
}

double hermitian_defect(const CMatrix& m) { return max_abs(m - m.adjoint()); }

// Multi-index strides: index = sum_k i_k * stride[k].
std::vector<int> strides_of(const std::vector<int>& dims) {
  std::vector<int> strides(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) {
    strides[k] = strides[k + 1] * dims[k + 1];
  }
  return strides;
}

// 2x2 Hermitian eigenvalues in closed form; avoids an iterative solver in the
// measurement-optimisation inner loops.
RVector eigenvalues_2x2(const CMatrix& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double half_diff = 0.5 * (a - d);
  const double radius = std::hypot(half_diff, std::abs(m(0, 1)));
  RVector ev(2);
  ev << mean - radius, mean + radius;
  return ev;
}

}  // namespace

SubsystemLayout::SubsystemLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw UsageError("layout needs at least one subsystem");
  }
  total_ = 1;
  for (int d : dims_) {
    if (d < 2) {
      throw InvariantViolation("every subsystem dimension must be >= 2");
    }
    total_ *= d;
  }
}

SubsystemLayout SubsystemLayout::qubits(int n) {
  return SubsystemLayout(std::vector<int>(static_cast<std::size_t>(n), 2));
}

int SubsystemLayout::dim(int subsystem) const {
  if (subsystem < 0 || subsystem >= size()) {
    throw UsageError("subsystem index out of range");
  }
  return dims_[static_cast<std::size_t>(subsystem)];
}

SubsystemLayout SubsystemLayout::select(std::span<const int> subsystems) const {
  std::vector<int> dims;
  dims.reserve(subsystems.size());
  for (int s : subsystems) dims.push_back(dim(s));
  return SubsystemLayout(std::move(dims));
}

SubsystemLayout SubsystemLayout::without(int subsystem) const {
  dim(subsystem);
  std::vector<int> dims;
  for (int k = 0; k < size(); ++k) {
    if (k != subsystem) dims.push_back(dims_[static_cast<std::size_t>(k)]);
  }
  return SubsystemLayout(std::move(dims));
}

SubsystemLayout concat(const SubsystemLayout& a, const SubsystemLayout& b) {
  std::vector<int> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return SubsystemLayout(std::move(dims));
}

// ---------------------------------------------------------------------------

HermitianOperator::HermitianOperator(CMatrix matrix, SubsystemLayout layout)
    : matrix_(std::move(matrix)), layout_(std::move(layout)) {
  require_square(matrix_, layout_);
  const double scale = std::max(1.0, max_abs(matrix_));
  if (hermitian_defect(matrix_) > kHermitianTol * scale) {
    throw InvariantViolation("operator is not Hermitian");
  }
}

HermitianOperator HermitianOperator::zero(const SubsystemLayout& layout) {
  return {CMatrix::Zero(layout.total(), layout.total()), layout};
}

HermitianOperator HermitianOperator::identity(const SubsystemLayout& layout) {
  return {CMatrix::Identity(layout.total(), layout.total()), layout};
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& other) const {
  if (!(layout_ == other.layout_)) throw UsageError("layout mismatch in operator sum");
  return {matrix_ + other.matrix_, layout_};
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& other) const {
  if (!(layout_ == other.layout_)) throw UsageError("layout mismatch in operator difference");
  return {matrix_ - other.matrix_, layout_};
}

HermitianOperator HermitianOperator::operator*(double scale) const {
  return {matrix_ * scale, layout_};
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(CMatrix matrix, SubsystemLayout layout)
    : DensityMatrix(std::move(matrix), std::move(layout), Trusted{}) {
  density_spectrum(matrix_);
}

DensityMatrix::DensityMatrix(CMatrix matrix, SubsystemLayout layout, Trusted)
    : matrix_(std::move(matrix)), layout_(std::move(layout)) {
  require_square(matrix_, layout_);
  if (hermitian_defect(matrix_) > kHermitianTol * std::max(1.0, max_abs(matrix_))) {
    throw InvariantViolation("density matrix is not Hermitian");
  }
  const double trace = matrix_.trace().real();
  if (std::abs(trace - 1.0) > kTraceTol) {
    std::ostringstream msg;
    msg << "density matrix trace " << trace << " differs from 1";
    throw InvariantViolation(msg.str());
  }
}

DensityMatrix DensityMatrix::from_trusted(CMatrix matrix, SubsystemLayout layout) {
  return {std::move(matrix), std::move(layout), Trusted{}};
}

DensityMatrix DensityMatrix::maximally_mixed(const SubsystemLayout& layout) {
  const int d = layout.total();
  return from_trusted(CMatrix::Identity(d, d) / static_cast<double>(d), layout);
}

DensityMatrix DensityMatrix::pure(const CVector& psi, const SubsystemLayout& layout) {
  const CVector unit = psi.normalized();
  return from_trusted(unit * unit.adjoint(), layout);
}

// ---------------------------------------------------------------------------

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

EigenDecomposition eigh(const HermitianOperator& op) { return eigh(op.matrix()); }

EigenDecomposition eigh(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw InvariantViolation("Hermitian eigensolver failed to converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianOperator matrix_function(const HermitianOperator& op,
                                  const std::function<double(double)>& f) {
  const EigenDecomposition eig = eigh(op);
  RVector values(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    values(k) = f(eig.eigenvalues(k));
    if (!std::isfinite(values(k))) {
      std::ostringstream msg;
      msg << "matrix function undefined at eigenvalue " << eig.eigenvalues(k);
      throw DomainError(msg.str());
    }
  }
  CMatrix out = eig.eigenvectors * values.asDiagonal() * eig.eigenvectors.adjoint();
  out = 0.5 * (out + out.adjoint()).eval();
  return {std::move(out), op.layout()};
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b) {
  return {kron(a.matrix(), b.matrix()), concat(a.layout(), b.layout())};
}

CMatrix partial_trace(const CMatrix& op, const SubsystemLayout& layout,
                      std::span<const int> keep) {
  if (keep.empty()) throw UsageError("partial trace needs a nonempty keep set");
  std::vector<bool> kept(static_cast<std::size_t>(layout.size()), false);
  for (int s : keep) {
    layout.dim(s);
    if (kept[static_cast<std::size_t>(s)]) throw UsageError("duplicate subsystem in keep set");
    kept[static_cast<std::size_t>(s)] = true;
  }

  // Split every full index into (kept index, traced index).
  const auto& dims = layout.dims();
  const int d = layout.total();
  int d_keep = 1;
  for (int k = 0; k < layout.size(); ++k) {
    if (kept[static_cast<std::size_t>(k)]) d_keep *= dims[static_cast<std::size_t>(k)];
  }
  std::vector<int> keep_index(static_cast<std::size_t>(d));
  std::vector<int> trace_index(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    int rem = i;
    int ki = 0;
    int ti = 0;
    int kstride = 1;
    int tstride = 1;
    for (int k = layout.size() - 1; k >= 0; --k) {
      const int dk = dims[static_cast<std::size_t>(k)];
      const int digit = rem % dk;
      rem /= dk;
      if (kept[static_cast<std::size_t>(k)]) {
        ki += digit * kstride;
        kstride *= dk;
      } else {
        ti += digit * tstride;
        tstride *= dk;
      }
    }
    keep_index[static_cast<std::size_t>(i)] = ki;
    trace_index[static_cast<std::size_t>(i)] = ti;
  }

  CMatrix out = CMatrix::Zero(d_keep, d_keep);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (trace_index[static_cast<std::size_t>(i)] == trace_index[static_cast<std::size_t>(j)]) {
        out(keep_index[static_cast<std::size_t>(i)], keep_index[static_cast<std::size_t>(j)]) +=
            op(i, j);
      }
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  std::vector<int> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  CMatrix reduced = partial_trace(rho.matrix(), rho.layout(), sorted);
  return DensityMatrix::from_trusted(std::move(reduced), rho.layout().select(sorted));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

CMatrix contract_subsystem(const CMatrix& op, const SubsystemLayout& layout, int s,
                           const CVector& v) {
  const int ds = layout.dim(s);
  if (v.size() != ds) throw UsageError("contraction vector has wrong dimension");
  const auto strides = strides_of(layout.dims());
  const int stride = strides[static_cast<std::size_t>(s)];
  const int outer = layout.total() / (ds * stride);
  const int d_rest = layout.total() / ds;

  // Map each index of the remaining space to the full index with digit s = 0.
  std::vector<int> base(static_cast<std::size_t>(d_rest));
  for (int hi = 0; hi < outer; ++hi) {
    for (int lo = 0; lo < stride; ++lo) {
      base[static_cast<std::size_t>(hi * stride + lo)] = hi * ds * stride + lo;
    }
  }

  CMatrix out = CMatrix::Zero(d_rest, d_rest);
  for (int r = 0; r < d_rest; ++r) {
    for (int c = 0; c < d_rest; ++c) {
      Complex acc = 0.0;
      for (int a = 0; a < ds; ++a) {
        const Complex va = std::conj(v(a));
        if (va == Complex(0.0)) continue;
        for (int b = 0; b < ds; ++b) {
          acc += va * op(base[static_cast<std::size_t>(r)] + a * stride,
                         base[static_cast<std::size_t>(c)] + b * stride) *
                 v(b);
        }
      }
      out(r, c) = acc;
    }
  }
  return out;
}

CMatrix embed(const CMatrix& local, const SubsystemLayout& layout, int s) {
  if (local.rows() != layout.dim(s)) throw UsageError("local operator has wrong dimension");
  CMatrix out = CMatrix::Identity(1, 1);
  for (int k = 0; k < layout.size(); ++k) {
    const int dk = layout.dim(k);
    out = kron(out, k == s ? local : CMatrix::Identity(dk, dk));
  }
  return out;
}

RVector density_spectrum(const CMatrix& rho) {
  RVector ev = rho.rows() == 2 ? eigenvalues_2x2(rho) : eigh(rho).eigenvalues;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < -kPositivityTol) {
      std::ostringstream msg;
      msg << "density matrix has eigenvalue " << ev(k) << " below -1e-10";
      throw InvariantViolation(msg.str());
    }
    ev(k) = std::clamp(ev(k), 0.0, 1.0);
  }
  return ev;
}

double shannon_entropy(std::span<const double> p) {
  double s = 0.0;
  for (double x : p) {
    if (x > 0.0) s -= x * std::log(x);
  }
  return s;
}

double von_neumann_entropy(const CMatrix& rho) {
  const RVector ev = density_spectrum(rho);
  return std::max(0.0, shannon_entropy(std::span<const double>(ev.data(), ev.size())));
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

double deficit_from_offsets(RVector offsets) {
  const Eigen::Index n = offsets.size();
  // Renormalise so the offsets sum to zero. Near uniform the deficit is
  // quadratic in them and any residual sum (trace rounding) would enter
  // linearly; the division keeps small eigenvalues relatively accurate.
  const double mean = offsets.mean();
  offsets = (offsets.array() - mean) / (1.0 + mean);
  double deficit = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = offsets(k);
    if (x < -1.0 - kPositivityTol * static_cast<double>(n)) {
      throw InvariantViolation("density matrix has a negative eigenvalue");
    }
    if (x <= -1.0) continue;
    deficit += (1.0 + x) * std::log1p(x);
  }
  return deficit / static_cast<double>(n);
}

namespace {

// Offsets below this in magnitude use the near-uniform expansion.
constexpr double kNearUniform = 0.5;

}  // namespace

double deficit_from_probabilities(RVector p) {
  const Eigen::Index n = p.size();
  const double dn = static_cast<double>(n);
  p /= p.sum();
  if ((dn * p.array() - 1.0).abs().maxCoeff() < kNearUniform) return deficit_from_offsets(dn * p.array() - 1.0);
  double deficit = std::log(dn);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (p(k) < -kPositivityTol) throw InvariantViolation("density matrix has a negative eigenvalue");
    if (p(k) > 0.0) deficit += p(k) * std::log(p(k));
  }
  return deficit;
}

double shannon_deficit(std::span<const double> p) {
  return deficit_from_probabilities(Eigen::Map<const RVector>(p.data(), static_cast<Eigen::Index>(p.size())));
}

double entropy_deficit(const CMatrix& rho) {
  const Eigen::Index d = rho.rows();
  const double dd = static_cast<double>(d);
  const double t = rho.trace().real();
  CMatrix shifted = rho;
  shifted.diagonal().array() -= t / dd;
  const RVector delta = d == 2 ? eigenvalues_2x2(shifted) : eigh(shifted).eigenvalues;
  const RVector offsets = dd * delta / t;
  if (offsets.cwiseAbs().maxCoeff() < kNearUniform) return deficit_from_offsets(offsets);
  return deficit_from_probabilities(delta.array() + t / dd);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw UsageError("fidelity of states with different dimensions");
  const EigenDecomposition er = eigh(rho.matrix());
  RVector root = er.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  const CMatrix sqrt_rho = er.eigenvectors * root.asDiagonal() * er.eigenvectors.adjoint();
  CMatrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const RVector ev = eigh(inner).eigenvalues;
  double trace_sqrt = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) trace_sqrt += std::sqrt(std::max(0.0, ev(k)));
  return std::clamp(trace_sqrt * trace_sqrt, 0.0, 1.0);
}

namespace pauli {
CMatrix I() { return CMatrix::Identity(2, 2); }
CMatrix X() {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
CMatrix Y() {
  CMatrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return m;
}
CMatrix Z() {
  CMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}
}  // namespace pauli

}  // namespace qtherm
