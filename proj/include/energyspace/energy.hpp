#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <vector>

#include "energyspace/network.hpp"
#include "energyspace/numkernel.hpp"

namespace energyspace {

/// Element of the energy space, stored by its representative vanishing at
/// the origin. The energy E(u,u) is computed once from the edge sum.
class EnergyVector {
 public:
  /// Subtracts u(o) from every value.
  static EnergyVector ground(const Network& net, const VertexFunction& u);
  static EnergyVector ground(const Network& net, Eigen::VectorXcd values);
  static EnergyVector zero(const Network& net);

  const VertexFunction& rep() const noexcept { return rep_; }
  const Eigen::VectorXcd& values() const noexcept { return rep_.values(); }
  Complex operator[](Vertex x) const { return rep_[x]; }
  std::size_t size() const noexcept { return rep_.size(); }
  std::uint64_t network_uid() const noexcept { return rep_.network_uid(); }

  double energy() const noexcept { return energy_; }
  /// ‖u‖_E = √E(u,u).
  double norm() const noexcept { return std::sqrt(energy_); }

 private:
  EnergyVector(VertexFunction rep, double energy) : rep_(std::move(rep)), energy_(energy) {}

  VertexFunction rep_;
  double energy_;
};

/// E(u,v) = ½ Σ_{x,y} c_xy conj(u(x) − u(y)) (v(x) − v(y)), conjugate-linear
/// in the first slot. Constants are invisible, so representatives need not
/// be grounded.
Complex energy_form(const Network& net, const VertexFunction& u, const VertexFunction& v);
Complex energy_form(const Network& net, const EnergyVector& u, const EnergyVector& v);

struct EffectiveResistance {
  double potential;  // v_x(x) − v_x(o)
  double energy;     // E(v_x, v_x)
};

/// V_F with V_xy = ⟨v_x, v_y⟩_E over an ordered vertex list F ⊆ X. Copies
/// share the lazily built square root and Cholesky factor.
class GramMatrix {
 public:
  GramMatrix(std::vector<Vertex> vertices, numkernel::RealSymMatrix v, double reproducing_defect);

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const numkernel::RealSymMatrix& matrix() const noexcept { return v_; }
  Eigen::Index size() const noexcept { return v_.size(); }
  /// max |E(v_x, v_y) − v_y(x)| over F × F.
  double reproducing_defect() const noexcept { return reproducing_defect_; }

  const numkernel::RealSymMatrix& sqrt() const;
  const numkernel::Cholesky<double>& cholesky() const;

 private:
  struct Cache {
    std::once_flag sqrt_once;
    std::once_flag chol_once;
    std::optional<numkernel::RealSymMatrix> sqrt;
    std::optional<numkernel::Cholesky<double>> chol;
  };

  std::vector<Vertex> vertices_;
  numkernel::RealSymMatrix v_;
  double reproducing_defect_;
  std::shared_ptr<Cache> cache_;
};

/// Per-network session: factors the grounded Laplacian once and caches the
/// energy kernel. The network must outlive the session. Kernel lookups are
/// safe from several threads.
class EnergySpace {
 public:
  explicit EnergySpace(const Network& net);

  const Network& network() const noexcept { return *net_; }

  /// Grounded v_x solving Δv_x = δ_x − δ_o; the zero vector for x = o.
  const EnergyVector& kernel(Vertex x) const;
  EffectiveResistance resistance(Vertex x) const;
  GramMatrix gram(std::span<const Vertex> vertices) const;

  /// Grounded w with (Δw)(x) = rhs(x) for every x ≠ o. The value of rhs at
  /// the origin is ignored.
  EnergyVector solve_grounded(const Eigen::VectorXcd& rhs) const;

  const numkernel::Cholesky<double>& grounded_factor() const noexcept { return factor_; }

 private:
  const Network* net_;
  numkernel::Cholesky<double> factor_;
  mutable std::shared_mutex mutex_;
  mutable std::vector<std::optional<EnergyVector>> kernels_;
};

EnergyVector energy_kernel(const Network& net, Vertex x);
/// R(x) = v_x(x) under grounding.
double effective_resistance(const Network& net, Vertex x);
EffectiveResistance effective_resistance_report(const Network& net, Vertex x);
GramMatrix gram_matrix(const Network& net, std::span<const Vertex> vertices);

/// ⟨δ_x, δ_y⟩_E over F: c(x) on the diagonal, −c_xy off it. Equals the
/// principal submatrix of the Laplacian.
numkernel::RealSymMatrix delta_gram(const Network& net, std::span<const Vertex> vertices);

/// |E(v_x, u) − (u(x) − u(o))|.
double reproducing_check(const EnergySpace& space, Vertex x, const EnergyVector& u);
double reproducing_check(const Network& net, Vertex x, const EnergyVector& u);

/// |E(δ_x, u) − (Δu)(x)|.
double lap_pairing_check(const Network& net, Vertex x, const EnergyVector& u);

/// Energy-orthogonal projection onto span{δ_x : x ∈ F}. When F covers every
/// vertex the origin is dropped, since the Dirac masses are then dependent
/// modulo constants.
EnergyVector fin_projection(const Network& net, const EnergyVector& u, std::span<const Vertex> vertices);

/// ‖u‖_∞ = sup_x |u(x) − u(o)|.
double sup_norm(const EnergyVector& u);
/// ‖u‖_A = ‖u‖_∞ + ‖u‖_E.
double banach_norm(const EnergyVector& u);

struct ProductEstimate {
  EnergyVector product;
  double lhs;  // ‖u₁u₂‖²_E
  double rhs;  // ‖u₂‖²_∞‖u₁‖²_E + 2‖u₁‖_∞‖u₂‖_∞|⟨u₁,u₂⟩_E| + ‖u₁‖²_∞‖u₂‖²_E
  double slack() const noexcept { return rhs - lhs; }
  bool holds() const noexcept { return lhs <= rhs + 1e-9; }
};

ProductEstimate pointwise_product(const Network& net, const EnergyVector& u1, const EnergyVector& u2);

/// Throws OriginInF / UnknownVertex / InvalidArgument (empty or repeated).
void require_interior_subset(const Network& net, std::span<const Vertex> vertices);

}  // namespace energyspace
