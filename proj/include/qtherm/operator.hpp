#pragma once

// Dense Hermitian linear algebra on multipartite Hilbert spaces.
//
// Subsystem 0 is the most significant tensor factor: for a layout (d_0, d_1)
// the basis index of |i_0 i_1> is i_0 * d_1 + i_1, matching kron(A, B).

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qtherm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  explicit SubsystemLayout(std::vector<int> dims);

  static SubsystemLayout qubits(int n);

  const std::vector<int>& dims() const { return dims_; }
  int size() const { return static_cast<int>(dims_.size()); }
  int dim(int subsystem) const;
  int total() const { return total_; }

  /// Layout of the listed subsystems, in the order given.
  SubsystemLayout select(std::span<const int> subsystems) const;
  /// Layout with one subsystem removed.
  SubsystemLayout without(int subsystem) const;

  bool operator==(const SubsystemLayout&) const = default;

 private:
  std::vector<int> dims_;
  int total_ = 1;
};

SubsystemLayout concat(const SubsystemLayout& a, const SubsystemLayout& b);

class HermitianOperator {
 public:
  HermitianOperator() = default;
  /// Throws InvariantViolation unless max|M - M^dagger| <= 1e-12 max(1, |M|_max).
  HermitianOperator(CMatrix matrix, SubsystemLayout layout);

  static HermitianOperator zero(const SubsystemLayout& layout);
  static HermitianOperator identity(const SubsystemLayout& layout);

  const CMatrix& matrix() const { return matrix_; }
  const SubsystemLayout& layout() const { return layout_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

  HermitianOperator operator+(const HermitianOperator& other) const;
  HermitianOperator operator-(const HermitianOperator& other) const;
  HermitianOperator operator*(double scale) const;

 private:
  CMatrix matrix_;
  SubsystemLayout layout_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Full validation: Hermitian, unit trace within 1e-10, smallest
  /// eigenvalue >= -1e-10.
  DensityMatrix(CMatrix matrix, SubsystemLayout layout);

  /// Skips the spectral positivity check. For states that are positive by
  /// construction (Gibbs states, partial traces, projections of those).
  static DensityMatrix from_trusted(CMatrix matrix, SubsystemLayout layout);

  static DensityMatrix maximally_mixed(const SubsystemLayout& layout);
  static DensityMatrix pure(const CVector& psi, const SubsystemLayout& layout);

  const CMatrix& matrix() const { return matrix_; }
  const SubsystemLayout& layout() const { return layout_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  struct Trusted {};
  DensityMatrix(CMatrix matrix, SubsystemLayout layout, Trusted);

  CMatrix matrix_;
  SubsystemLayout layout_;
};

struct EigenDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, orthonormal
};

/// Absolute max-entry norm.
double max_abs(const CMatrix& m);

EigenDecomposition eigh(const HermitianOperator& op);
/// Same as eigh() on a raw matrix that the caller knows to be Hermitian.
EigenDecomposition eigh(const CMatrix& hermitian);

/// V f(Lambda) V^dagger. Throws DomainError if f returns a non-finite value.
HermitianOperator matrix_function(const HermitianOperator& op,
                                  const std::function<double(double)>& f);

HermitianOperator tensor_product(const HermitianOperator& a, const HermitianOperator& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Reduced operator on `keep` (ascending order is used regardless of the
/// order given). Works for any square operator carrying `layout`.
CMatrix partial_trace(const CMatrix& op, const SubsystemLayout& layout,
                      std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep);

/// <v|_s op |v>_s : contracts subsystem `s` against the vector `v`. The
/// result acts on layout.without(s).
CMatrix contract_subsystem(const CMatrix& op, const SubsystemLayout& layout, int s,
                           const CVector& v);

/// Embeds a local operator acting on subsystem `s` as I (x) ... (x) local (x) ... (x) I.
CMatrix embed(const CMatrix& local, const SubsystemLayout& layout, int s);

/// Eigenvalues of a density matrix, clamped to [0, 1]. Throws
/// InvariantViolation if any eigenvalue is below -1e-10.
RVector density_spectrum(const CMatrix& rho);

/// -sum p ln p with 0 ln 0 = 0 over a probability vector.
double shannon_entropy(std::span<const double> p);

/// Von Neumann entropy in nats.
double von_neumann_entropy(const DensityMatrix& rho);
double von_neumann_entropy(const CMatrix& rho);

/// ln d - S(rho / Tr rho), evaluated from the spectrum of rho - (Tr rho / d) I
/// with log1p so that nearly maximally mixed states keep their relative precision.
double entropy_deficit(const CMatrix& rho);

/// ln n - H(p) for p_k = (1 + offsets_k) / n, after renormalising p; accurate
/// near uniform.
double deficit_from_offsets(RVector offsets);

/// ln n - H(p / sum p); the offset form near uniform, p ln p otherwise.
double deficit_from_probabilities(RVector p);

/// ln n - H(p / sum p).
double shannon_deficit(std::span<const double> p);

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

namespace pauli {
CMatrix I();
CMatrix X();
CMatrix Y();
CMatrix Z();
}  // namespace pauli

}  // namespace qtherm
