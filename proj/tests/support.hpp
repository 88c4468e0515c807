#pragma once

// Shared fixtures, generators and independent oracles for the test suites.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "energyspace/energy.hpp"
#include "energyspace/error.hpp"
#include "energyspace/multop.hpp"
#include "energyspace/network.hpp"

namespace testing {

using namespace energyspace;

inline std::optional<ErrorCode> error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define CHECK_ERROR(expr, code) CHECK(::testing::error_code([&] { (void)(expr); }) == (code))

inline Network p3() {
  const std::vector<EdgeSpec> edges{{0, 1, 1.0}, {1, 2, 1.0}};
  return Network::build(edges, 0);
}

struct NamedNetwork {
  std::string name;
  Network net;
};

/// path(3), path(5), path(9), binary_tree(3) and a seeded 12-vertex random
/// weighted graph.
inline std::vector<NamedNetwork> standard_networks() {
  std::vector<NamedNetwork> out;
  out.push_back({"path3", path(3)});
  out.push_back({"path5", path(5)});
  out.push_back({"path9", path(9)});
  out.push_back({"tree3", binary_tree(3)});
  out.push_back({"random12", random_connected(12, 0.3, 2024, ConductanceProfile::uniform(0.5, 2.0, 2024))});
  return out;
}

/// Random connected weighted network with n vertices.
inline Network random_network(int n, std::uint64_t seed) {
  return random_connected(n, 0.35, seed, ConductanceProfile::uniform(0.25, 4.0, seed + 17));
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  Complex complex() { return {uniform(), uniform()}; }

  Eigen::VectorXcd complex_vector(Eigen::Index n) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = complex();
    return v;
  }
  Eigen::VectorXd real_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform();
    return v;
  }

  /// Random complex function, scaled so values span a few orders of magnitude.
  EnergyVector energy_vector(const Network& net) {
    const double scale = std::pow(10.0, uniform(-1.0, 2.0));
    return EnergyVector::ground(net, Eigen::VectorXcd(scale * complex_vector(static_cast<Eigen::Index>(net.size()))));
  }
  EnergyVector real_energy_vector(const Network& net) {
    return EnergyVector::ground(net, Eigen::VectorXcd(real_vector(static_cast<Eigen::Index>(net.size())).cast<Complex>()));
  }

  Multiplier multiplier(const Network& net, bool complex_values = true) {
    Eigen::VectorXcd f = complex_vector(static_cast<Eigen::Index>(net.size()));
    if (!complex_values) f = f.real().cast<Complex>();
    return {net, VertexFunction(net, std::move(f))};
  }

  Eigen::MatrixXd orthogonal(Eigen::Index n) {
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a.col(i) = real_vector(n);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  }
  Eigen::MatrixXcd unitary(Eigen::Index n) {
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a.col(i) = complex_vector(n);
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
  }

  /// Q diag(spectrum) Qᵀ with a random orthogonal Q.
  Eigen::MatrixXd with_spectrum(const Eigen::VectorXd& spectrum) {
    const auto q = orthogonal(spectrum.size());
    return q * spectrum.asDiagonal() * q.transpose();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Oracles built from the full Laplacian matrix, independent of the grounded
// Cholesky route used by the library.

/// Kernel v_x from the Moore–Penrose inverse of the full Laplacian, then
/// grounded.
inline Eigen::VectorXd oracle_kernel(const Network& net, Vertex x) {
  const Eigen::MatrixXd lap = laplacian_matrix(net);
  const Eigen::MatrixXd pinv = lap.completeOrthogonalDecomposition().pseudoInverse();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lap.rows());
  rhs[static_cast<Eigen::Index>(x)] += 1.0;
  rhs[static_cast<Eigen::Index>(net.origin())] -= 1.0;
  Eigen::VectorXd v = pinv * rhs;
  v.array() -= v[static_cast<Eigen::Index>(net.origin())];
  return v;
}

/// Energy from the quadratic form uᴴ L v of the full Laplacian.
inline Complex oracle_energy(const Network& net, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  return u.dot(laplacian_matrix(net).cast<Complex>() * v);
}

inline double max_abs(const Eigen::MatrixXd& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
