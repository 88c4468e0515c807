#include "energyspace/numkernel.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "energyspace/error.hpp"

namespace energyspace::numkernel {

namespace {

template <class S>
double real_part(S value) {
  return std::real(value);
}

template <class S>
Eigen::LLT<Matrix<S>> factor_or_throw(const SymMatrix<S>& a, const char* what) {
  const auto n = a.size();
  if (n == 0) fail(ErrorCode::InvalidArgument, std::string(what) + ": empty matrix");
  Eigen::LLT<Matrix<S>> llt(a.matrix());
  const double max_diag = a.matrix().diagonal().real().cwiseAbs().maxCoeff();
  const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;
  if (llt.info() != Eigen::Success) fail(ErrorCode::NotPositiveDefinite, std::string(what) + ": Cholesky failed");
  const Matrix<S>& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pivot = std::norm(l(i, i));
    if (!(pivot > floor)) {
      fail(ErrorCode::NotPositiveDefinite,
           std::string(what) + ": pivot " + std::to_string(i) + " = " + std::to_string(pivot) + " below " + std::to_string(floor));
    }
  }
  return llt;
}

template <class S>
void normalize_phase(Vector<S>& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > 1e-12 * scale) {
      if constexpr (Eigen::NumTraits<S>::IsComplex) {
        v *= std::conj(v[i]) / mag;
      } else {
        if (v[i] < 0) v = -v;
      }
      return;
    }
  }
}

}  // namespace

template <class S>
SymMatrix<S>::SymMatrix(Matrix<S> a) {
  if (a.rows() != a.cols()) fail(ErrorCode::DomainMismatch, "matrix is not square");
  const double norm = a.norm();
  defect_ = (a - a.adjoint()).norm() / std::max(1.0, norm);
  if (!(defect_ <= kHermitianTolerance)) {
    fail(ErrorCode::NotHermitian, "relative Hermitian defect " + std::to_string(defect_));
  }
  a_ = (a + a.adjoint()) / 2.0;
}

template <class S>
double SymMatrix<S>::inf_norm() const {
  if (a_.size() == 0) return 0.0;
  return a_.cwiseAbs().rowwise().sum().maxCoeff();
}

template <class S>
Cholesky<S>::Cholesky(const SymMatrix<S>& a) : a_(a), llt_(factor_or_throw(a, "cholesky")) {}

template <class S>
Vector<S> Cholesky<S>::solve(const Vector<S>& b) const {
  if (b.size() != a_.size()) fail(ErrorCode::DomainMismatch, "cholesky solve: right side has wrong length");
  Vector<S> x = llt_.solve(b);
  const Vector<S> r = b - a_.matrix() * x;
  if (r.norm() > 1e-10 * b.norm()) x += llt_.solve(r);
  return x;
}

template <class S>
Matrix<S> Cholesky<S>::solve(const Matrix<S>& b) const {
  if (b.rows() != a_.size()) fail(ErrorCode::DomainMismatch, "cholesky solve: right side has wrong row count");
  Matrix<S> x = llt_.solve(b);
  const Matrix<S> r = b - a_.matrix() * x;
  if (r.norm() > 1e-10 * b.norm()) x += llt_.solve(r);
  return x;
}

template <class S>
Vector<S> spd_solve(const SymMatrix<S>& a, const Vector<S>& b) {
  return Cholesky<S>(a).solve(b);
}

template <class S>
EigenDecomposition<S> sym_eig(const SymMatrix<S>& a) {
  Eigen::SelfAdjointEigenSolver<Matrix<S>> solver(a.matrix());
  if (solver.info() != Eigen::Success) fail(ErrorCode::ConvergenceFailure, "sym_eig: QR iteration did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

template <class S>
double default_psd_tolerance(const SymMatrix<S>& a) {
  return 1e-9 * std::max(1.0, a.inf_norm());
}

template <class S>
PsdVerdict<S> psd_check(const SymMatrix<S>& a, std::optional<double> tol) {
  const double t = tol ? *tol : default_psd_tolerance(a);
  if (!(t >= 0.0)) fail(ErrorCode::InvalidArgument, "psd_check: tolerance must be nonnegative");
  auto eig = sym_eig(a);
  PsdVerdict<S> verdict;
  verdict.tolerance = t;
  verdict.min_eigenvalue = eig.values[0];
  verdict.is_psd = verdict.min_eigenvalue >= -t;
  verdict.witness = eig.vectors.col(0);
  verdict.witness.normalize();
  normalize_phase(verdict.witness);
  verdict.witness_value = real_part(verdict.witness.dot(a.matrix() * verdict.witness));
  return verdict;
}

template <class S>
SymMatrix<S> sqrtm_psd(const SymMatrix<S>& a, std::optional<double> tol) {
  const double t = tol ? *tol : default_psd_tolerance(a);
  auto eig = sym_eig(a);
  if (eig.values.size() > 0 && eig.values[0] < -t) {
    fail(ErrorCode::NotPsd, "sqrtm_psd: smallest eigenvalue " + std::to_string(eig.values[0]));
  }
  const Eigen::VectorXd roots = eig.values.cwiseMax(0.0).cwiseSqrt();
  Matrix<S> b = eig.vectors * roots.template cast<S>().asDiagonal() * eig.vectors.adjoint();
  return SymMatrix<S>((b + b.adjoint()) / 2.0);
}

template <class S>
GeneralizedEigenpair<S> gen_eig_max(const SymMatrix<S>& a, const SymMatrix<S>& b) {
  if (a.size() != b.size()) fail(ErrorCode::DomainMismatch, "gen_eig_max: dimension mismatch");
  auto llt = factor_or_throw(b, "gen_eig_max");
  const auto l = llt.matrixL();
  // C = L⁻¹ A L⁻*
  Matrix<S> x = l.solve(a.matrix());
  Matrix<S> c = l.solve(x.adjoint()).adjoint();
  c = (c + c.adjoint()) / 2.0;
  auto eig = sym_eig(SymMatrix<S>(std::move(c)));

  GeneralizedEigenpair<S> out;
  const auto last = eig.values.size() - 1;
  out.value = eig.values[last];
  Vector<S> y = eig.vectors.col(last);
  out.vector = llt.matrixU().solve(y);
  out.vector.normalize();
  normalize_phase(out.vector);
  out.residual = (a.matrix() * out.vector - S(out.value) * (b.matrix() * out.vector)).norm();
  return out;
}

template <class S>
Matrix<S> gram_schmidt_V(const SymMatrix<S>& v) {
  auto llt = factor_or_throw(v, "gram_schmidt_V");
  // V = R*R with R = L* upper triangular; C = R⁻¹.
  const auto n = v.size();
  Matrix<S> c = llt.matrixU().solve(Matrix<S>::Identity(n, n));
  return c.template triangularView<Eigen::Upper>();
}

template <class S>
double spectral_norm(const Matrix<S>& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix<S>> svd(a);
  return svd.singularValues()[0];
}

#define ENERGYSPACE_INSTANTIATE(S)                                                              \
  template class SymMatrix<S>;                                                                  \
  template class Cholesky<S>;                                                                   \
  template Vector<S> spd_solve(const SymMatrix<S>&, const Vector<S>&);                          \
  template EigenDecomposition<S> sym_eig(const SymMatrix<S>&);                                  \
  template double default_psd_tolerance(const SymMatrix<S>&);                                   \
  template PsdVerdict<S> psd_check(const SymMatrix<S>&, std::optional<double>);                 \
  template SymMatrix<S> sqrtm_psd(const SymMatrix<S>&, std::optional<double>);                  \
  template GeneralizedEigenpair<S> gen_eig_max(const SymMatrix<S>&, const SymMatrix<S>&);       \
  template Matrix<S> gram_schmidt_V(const SymMatrix<S>&);                                       \
  template double spectral_norm(const Matrix<S>&);

ENERGYSPACE_INSTANTIATE(double)
ENERGYSPACE_INSTANTIATE(std::complex<double>)

#undef ENERGYSPACE_INSTANTIATE

}  // namespace energyspace::numkernel
