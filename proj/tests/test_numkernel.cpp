#include "support.hpp"

using namespace energyspace;
using namespace energyspace::numkernel;
using testing::Gen;

namespace {

Eigen::MatrixXd m2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_SUITE("numkernel") {
  TEST_CASE("SymMatrix rejects non-Hermitian input and symmetrizes tiny defects") {
    CHECK_ERROR(RealSymMatrix(m2(1, 2, 3, 4)), ErrorCode::NotHermitian);
    CHECK_ERROR(RealSymMatrix(Eigen::MatrixXd::Zero(2, 3)), ErrorCode::DomainMismatch);
    const RealSymMatrix s(m2(1, 2, 2 + 1e-14, 4));
    CHECK(s(0, 1) == s(1, 0));
    CHECK(s.hermitian_defect() > 0.0);
    Eigen::MatrixXcd h(2, 2);
    h << 1.0, Complex(0, 1), Complex(0, 1), 1.0;  // symmetric but not Hermitian
    CHECK_ERROR(ComplexSymMatrix(h), ErrorCode::NotHermitian);
    CHECK(RealSymMatrix(m2(1, -3, -3, 2)).inf_norm() == 5.0);
  }

  TEST_CASE("spd_solve examples") {
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
    CHECK(spd_solve(RealSymMatrix(Eigen::MatrixXd::Identity(4, 4)), b) == b);
    const auto x = spd_solve(RealSymMatrix(m2(2, -1, -1, 2)), Eigen::VectorXd(Eigen::Vector2d(1, 0)));
    CHECK(x[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK_ERROR(spd_solve(RealSymMatrix(m2(1, 1, 1, 1)), Eigen::VectorXd(Eigen::Vector2d(1, 2))), ErrorCode::NotPositiveDefinite);
    CHECK_ERROR(spd_solve(RealSymMatrix(m2(1, 0, 0, -1)), Eigen::VectorXd(Eigen::Vector2d(1, 2))), ErrorCode::NotPositiveDefinite);
  }

  TEST_CASE("property: spd_solve residual") {
    Gen gen(5);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = gen.integer(1, 40);
      Eigen::VectorXd spectrum(n);
      for (int i = 0; i < n; ++i) spectrum[i] = std::pow(10.0, gen.uniform(-4.0, 2.0));
      const Eigen::MatrixXd a = gen.with_spectrum(spectrum);
      const RealSymMatrix s(Eigen::MatrixXd((a + a.transpose()) / 2.0));
      const Eigen::VectorXd b = gen.real_vector(n);
      const auto x = spd_solve(s, b);
      CHECK((s.matrix() * x - b).norm() <= 1e-10 * b.norm());
    }
  }

  TEST_CASE("sym_eig examples") {
    auto e = sym_eig(RealSymMatrix(m2(3, 0, 0, 1)));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(3.0));
    e = sym_eig(RealSymMatrix(m2(1, 1, 1, 2)));
    CHECK(e.values[0] == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-14));
    CHECK(e.values[1] == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-14));
    e = sym_eig(RealSymMatrix(m2(0, 1, 1, 0)));
    CHECK(e.values[0] == doctest::Approx(-1.0));
    CHECK(e.values[1] == doctest::Approx(1.0));
  }

  TEST_CASE("property: sym_eig residual and orthonormality (complex)") {
    Gen gen(6);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = gen.integer(1, 30);
      Eigen::MatrixXcd a(n, n);
      for (int i = 0; i < n; ++i) a.col(i) = gen.complex_vector(n);
      const ComplexSymMatrix s(Eigen::MatrixXcd(a + a.adjoint()));
      const auto e = sym_eig(s);
      const double norm = s.matrix().norm();
      CHECK((s.matrix() * e.vectors - e.vectors * e.values.cast<Complex>().asDiagonal()).norm() <= 1e-9 * norm);
      CHECK((e.vectors.adjoint() * e.vectors - Eigen::MatrixXcd::Identity(n, n)).norm() <= 1e-10);
      for (int i = 1; i < n; ++i) CHECK(e.values[i - 1] <= e.values[i]);
    }
  }

  TEST_CASE("psd_check examples") {
    auto v = psd_check(RealSymMatrix(m2(1, 2, 2, 4)));
    CHECK(v.is_psd);
    CHECK(std::abs(v.min_eigenvalue) <= 1e-12);

    v = psd_check(RealSymMatrix(m2(0.96, 1.96, 1.96, 3.92)));
    CHECK_FALSE(v.is_psd);
    CHECK(v.min_eigenvalue < 0.0);
    CHECK(v.witness_value < -v.tolerance);
    // Witness reproduces the negative quadratic form.
    const Eigen::VectorXd w = v.witness;
    CHECK(w.dot(m2(0.96, 1.96, 1.96, 3.92) * w) == doctest::Approx(v.min_eigenvalue).epsilon(1e-12));
    CHECK(w.norm() == doctest::Approx(1.0));

    v = psd_check(RealSymMatrix(-Eigen::MatrixXd::Identity(3, 3)));
    CHECK_FALSE(v.is_psd);
    CHECK(v.min_eigenvalue == doctest::Approx(-1.0));
    CHECK(v.witness.norm() == doctest::Approx(1.0));
    CHECK(v.tolerance == doctest::Approx(1e-9));
  }

  TEST_CASE("psd_check: tolerance and witness sign convention") {
    const RealSymMatrix a(m2(1.0, 0.0, 0.0, -1e-6));
    CHECK_FALSE(psd_check(a).is_psd);
    CHECK(psd_check(a, 1e-5).is_psd);
    CHECK_ERROR(psd_check(a, -1.0), ErrorCode::InvalidArgument);
    Gen gen(8);
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXcd m(4, 4);
      for (int i = 0; i < 4; ++i) m.col(i) = gen.complex_vector(4);
      const auto v = psd_check(ComplexSymMatrix(Eigen::MatrixXcd(m + m.adjoint())));
      Eigen::Index first = 0;
      while (std::abs(v.witness[first]) < 1e-12) ++first;
      CHECK(v.witness[first].imag() == doctest::Approx(0.0));
      CHECK(v.witness[first].real() > 0.0);
    }
  }

  TEST_CASE("property: psd_check agrees with random quadratic forms") {
    Gen gen(9);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = gen.integer(1, 16);
      Eigen::VectorXd spectrum(n);
      const bool make_psd = trial % 2 == 0;
      for (int i = 0; i < n; ++i) spectrum[i] = gen.uniform(0.0, 3.0);
      if (!make_psd) spectrum[gen.integer(0, n - 1)] = -gen.uniform(0.01, 1.0);
      const Eigen::MatrixXd a = gen.with_spectrum(spectrum);
      const RealSymMatrix s(Eigen::MatrixXd((a + a.transpose()) / 2.0));
      const auto verdict = psd_check(s);
      CHECK(verdict.is_psd == make_psd);
      if (verdict.is_psd) {
        for (int k = 0; k < 1000; ++k) {
          const Eigen::VectorXd xi = gen.real_vector(n);
          CHECK(xi.dot(s.matrix() * xi) >= -verdict.tolerance * xi.squaredNorm());
        }
      } else {
        const Eigen::VectorXd w = verdict.witness;
        CHECK(w.dot(s.matrix() * w) < -verdict.tolerance);
      }
    }
  }

  TEST_CASE("sqrtm_psd examples") {
    CHECK((sqrtm_psd(RealSymMatrix(Eigen::MatrixXd::Identity(3, 3))).matrix() - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-14);
    const auto r = sqrtm_psd(RealSymMatrix(m2(4, 0, 0, 9)));
    CHECK(testing::max_abs(r.matrix() - m2(2, 0, 0, 3)) <= 1e-14);
    Eigen::Matrix3d v;
    v << 1, 1, 1, 1, 2, 2, 1, 2, 3;
    const auto b = sqrtm_psd(RealSymMatrix(Eigen::MatrixXd(v)));
    CHECK((b.matrix() * b.matrix() - v).norm() <= 1e-8);
    CHECK(psd_check(b).is_psd);
    CHECK_ERROR(sqrtm_psd(RealSymMatrix(m2(1, 0, 0, -1))), ErrorCode::NotPsd);
  }

  TEST_CASE("property: sqrtm_psd roundtrip up to n = 64") {
    Gen gen(10);
    for (int n : {1, 2, 3, 5, 8, 13, 21, 34, 55, 64}) {
      Eigen::VectorXd spectrum(n);
      for (int i = 0; i < n; ++i) spectrum[i] = i % 7 == 0 ? 0.0 : std::pow(10.0, gen.uniform(-3.0, 3.0));
      const Eigen::MatrixXd a = gen.with_spectrum(spectrum);
      const RealSymMatrix s(Eigen::MatrixXd((a + a.transpose()) / 2.0));
      const auto b = sqrtm_psd(s);
      CHECK((b.matrix() * b.matrix() - s.matrix()).norm() <= 1e-8 * std::max(1.0, s.matrix().norm()));
      CHECK(psd_check(b).is_psd);

      const Eigen::MatrixXcd u = gen.unitary(n);
      const Eigen::MatrixXcd c = u * spectrum.cast<Complex>().asDiagonal() * u.adjoint();
      const ComplexSymMatrix cs(Eigen::MatrixXcd((c + c.adjoint()) / 2.0));
      const auto cb = sqrtm_psd(cs);
      CHECK((cb.matrix() * cb.matrix() - cs.matrix()).norm() <= 1e-8 * std::max(1.0, cs.matrix().norm()));
    }
  }

  TEST_CASE("gen_eig_max examples") {
    const RealSymMatrix b(m2(1, 1, 1, 2));
    CHECK(gen_eig_max(b, b).value == doctest::Approx(1.0));
    const auto p = gen_eig_max(RealSymMatrix(m2(1, 0, 0, 0)), b);
    CHECK(p.value == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(p.residual <= 1e-12);
    CHECK(std::abs(gen_eig_max(RealSymMatrix(Eigen::MatrixXd::Zero(2, 2)), b).value) <= 1e-15);
    CHECK_ERROR(gen_eig_max(b, RealSymMatrix(m2(1, 1, 1, 1))), ErrorCode::NotPositiveDefinite);
    CHECK_ERROR(gen_eig_max(b, RealSymMatrix(Eigen::MatrixXd::Identity(3, 3))), ErrorCode::DomainMismatch);
  }

  TEST_CASE("property: gen_eig_max against Rayleigh quotients and a nonsymmetric solve") {
    Gen gen(12);
    for (int trial = 0; trial < 25; ++trial) {
      const int n = gen.integer(1, 8);
      Eigen::MatrixXcd x(n, n), y(n, n);
      for (int i = 0; i < n; ++i) {
        x.col(i) = gen.complex_vector(n);
        y.col(i) = gen.complex_vector(n);
      }
      const ComplexSymMatrix a(Eigen::MatrixXcd(x * x.adjoint()));
      const ComplexSymMatrix b(Eigen::MatrixXcd(y * y.adjoint() + 0.5 * Eigen::MatrixXcd::Identity(n, n)));
      const auto pair = gen_eig_max(a, b);

      double best = 0.0;
      for (int k = 0; k < 10000; ++k) {
        const Eigen::VectorXcd xi = gen.complex_vector(n);
        const double q = xi.dot(a.matrix() * xi).real() / xi.dot(b.matrix() * xi).real();
        best = std::max(best, q);
      }
      CHECK(best <= pair.value * (1.0 + 1e-9));

      // Oracle: largest eigenvalue of B⁻¹A by a general eigensolver.
      const Eigen::MatrixXcd m = b.matrix().fullPivLu().solve(a.matrix());
      const double oracle = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(m).eigenvalues().real().maxCoeff();
      CHECK(pair.value == doctest::Approx(oracle).epsilon(1e-6));
      const Eigen::VectorXcd xi = pair.vector;
      CHECK(xi.dot(a.matrix() * xi).real() / xi.dot(b.matrix() * xi).real() == doctest::Approx(pair.value).epsilon(1e-9));
      CHECK(pair.residual <= 1e-8 * (a.matrix().norm() + pair.value * b.matrix().norm()));
    }
  }

  TEST_CASE("gram_schmidt_V examples") {
    CHECK(gram_schmidt_V(RealSymMatrix(Eigen::MatrixXd::Identity(3, 3))) == Eigen::MatrixXd::Identity(3, 3));
    const auto c = gram_schmidt_V(RealSymMatrix(m2(1, 1, 1, 2)));
    CHECK(testing::max_abs(c - m2(1, -1, 0, 1)) <= 1e-14);
    CHECK_ERROR(gram_schmidt_V(RealSymMatrix(m2(1, 1, 1, 1))), ErrorCode::NotPositiveDefinite);
  }

  TEST_CASE("property: gram_schmidt_V orthonormalizes and is upper triangular") {
    Gen gen(13);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = gen.integer(1, 25);
      Eigen::VectorXd spectrum(n);
      for (int i = 0; i < n; ++i) spectrum[i] = std::pow(10.0, gen.uniform(-2.0, 2.0));
      const Eigen::MatrixXd a = gen.with_spectrum(spectrum);
      const RealSymMatrix v(Eigen::MatrixXd((a + a.transpose()) / 2.0));
      const auto c = gram_schmidt_V(v);
      CHECK((c.transpose() * v.matrix() * c - Eigen::MatrixXd::Identity(n, n)).norm() <= 1e-9);
      CHECK(Eigen::MatrixXd(c.triangularView<Eigen::StrictlyLower>()).isZero(0.0));
    }
  }

  TEST_CASE("spectral_norm") {
    CHECK(spectral_norm<double>(m2(3, 0, 0, -4)) == doctest::Approx(4.0));
    CHECK(spectral_norm<double>(Eigen::MatrixXd(0, 0)) == 0.0);
  }
}
