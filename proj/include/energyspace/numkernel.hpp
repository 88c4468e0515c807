#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

namespace energyspace::numkernel {

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

/// Dense Hermitian matrix. Construction symmetrizes (A + A*)/2 and records
/// the relative defect; inputs off by more than 1e-12 relative are rejected
/// with NotHermitian.
template <class S>
class SymMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-12;

  explicit SymMatrix(Matrix<S> a);

  Eigen::Index size() const noexcept { return a_.rows(); }
  const Matrix<S>& matrix() const noexcept { return a_; }
  S operator()(Eigen::Index i, Eigen::Index j) const { return a_(i, j); }
  /// ‖A − A*‖_F / max(1, ‖A‖_F) of the input before symmetrization.
  double hermitian_defect() const noexcept { return defect_; }
  /// Max absolute row sum.
  double inf_norm() const;

 private:
  Matrix<S> a_;
  double defect_ = 0.0;
};

using RealSymMatrix = SymMatrix<double>;
using ComplexSymMatrix = SymMatrix<std::complex<double>>;

template <class S>
struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  Matrix<S> vectors;       // orthonormal columns
};

template <class S>
struct PsdVerdict {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
  /// Unit eigenvector of the smallest eigenvalue; first nonzero entry real
  /// and positive.
  Vector<S> witness;
  double tolerance = 0.0;
  /// ξ*Aξ evaluated directly from the witness.
  double witness_value = 0.0;
};

template <class S>
struct GeneralizedEigenpair {
  double value = 0.0;
  Vector<S> vector;  // unit Euclidean length
  double residual = 0.0;  // ‖Aξ − λBξ‖
};

/// Cholesky factorization A = LL* of a Hermitian positive definite matrix.
/// Throws NotPositiveDefinite when a pivot is ≤ n·ε·max diag.
template <class S>
class Cholesky {
 public:
  explicit Cholesky(const SymMatrix<S>& a);

  Eigen::Index size() const noexcept { return a_.size(); }
  /// Solve with one step of iterative refinement when the residual exceeds
  /// 1e-10‖b‖.
  Vector<S> solve(const Vector<S>& b) const;
  Matrix<S> solve(const Matrix<S>& b) const;
  Matrix<S> lower() const { return llt_.matrixL(); }
  const SymMatrix<S>& matrix() const noexcept { return a_; }

 private:
  SymMatrix<S> a_;
  Eigen::LLT<Matrix<S>> llt_;
};

/// Solves Ax = b for Hermitian positive definite A by Cholesky, with one
/// step of iterative refinement when the residual exceeds 1e-10‖b‖.
/// Throws NotPositiveDefinite when a pivot is ≤ n·ε·max diag.
template <class S>
Vector<S> spd_solve(const SymMatrix<S>& a, const Vector<S>& b);

template <class S>
EigenDecomposition<S> sym_eig(const SymMatrix<S>& a);

/// 1e-9 · max(1, ‖A‖∞).
template <class S>
double default_psd_tolerance(const SymMatrix<S>& a);

template <class S>
PsdVerdict<S> psd_check(const SymMatrix<S>& a, std::optional<double> tol = std::nullopt);

/// Principal square root through the eigendecomposition. Eigenvalues in
/// [−tol, 0) are clamped to zero; anything below raises NotPsd.
template <class S>
SymMatrix<S> sqrtm_psd(const SymMatrix<S>& a, std::optional<double> tol = std::nullopt);

/// Largest λ with Aξ = λBξ for positive definite B, by reduction to the
/// standard problem L⁻¹AL⁻* with B = LL*.
template <class S>
GeneralizedEigenpair<S> gen_eig_max(const SymMatrix<S>& a, const SymMatrix<S>& b);

/// Upper-triangular C with C*VC = I: column j holds the coefficients, in the
/// spanning family, of the j-th vector produced by Gram–Schmidt in the
/// metric V (enumeration order preserved).
template <class S>
Matrix<S> gram_schmidt_V(const SymMatrix<S>& v);

/// Largest singular value.
template <class S>
double spectral_norm(const Matrix<S>& a);

}  // namespace energyspace::numkernel
