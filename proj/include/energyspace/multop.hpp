#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "energyspace/energy.hpp"

namespace energyspace {

/// Multiplication operator (M_f u)(x) = f(x)u(x) on the energy space. The
/// value of f at the origin never matters: grounded vectors vanish there.
class Multiplier {
 public:
  Multiplier(const Network& net, VertexFunction f);

  static Multiplier delta(const Network& net, Vertex x);
  /// f = v_x viewed as a function.
  static Multiplier kernel(const EnergySpace& space, Vertex x);
  static Multiplier constant(const Network& net, Complex c);

  const VertexFunction& f() const noexcept { return f_; }
  Complex operator[](Vertex x) const { return f_[x]; }
  std::uint64_t network_uid() const noexcept { return f_.network_uid(); }
  /// True when f has no imaginary part on the interior.
  bool is_real() const noexcept { return real_; }

 private:
  VertexFunction f_;
  bool real_;
};

using ComplexPsdVerdict = numkernel::PsdVerdict<Complex>;
using Exhaustion = std::vector<std::vector<Vertex>>;

/// Grounded pointwise product f·u.
EnergyVector apply(const Network& net, const Multiplier& m, const EnergyVector& u);

/// M*v_x = conj(f(x))·v_x, a scalar multiple of the kernel vector.
EnergyVector adjoint_on_kernel(const EnergySpace& space, const Multiplier& m, Vertex x);

/// M*u for arbitrary u: expand u = Σ_y Δu(y) v_y over X and scale each
/// kernel vector by conj(f(y)).
EnergyVector adjoint_apply(const EnergySpace& space, const Multiplier& m, const EnergyVector& u);

/// ⟨Mu, v⟩_E − ⟨u, Mv⟩_E.
Complex hermitian_defect(const Network& net, const Multiplier& m, const EnergyVector& u, const EnergyVector& v);

/// s_f(x,y) = (b² − f(x)conj(f(y)))·V_xy over F.
numkernel::ComplexSymMatrix s_matrix(const EnergySpace& space, const Multiplier& m, double b,
                                     std::span<const Vertex> vertices);

/// psd_check of s_matrix at each F of the exhaustion. Any failing verdict
/// carries a witness ξ with ξ*Sξ < 0, i.e. ‖M_f‖ > b.
std::vector<ComplexPsdVerdict> certify_bound(const EnergySpace& space, const Multiplier& m, double b,
                                             const Exhaustion& exhaustion, std::optional<double> tol = std::nullopt);

/// ρ_F = √λ_max(D_F V_F D̄_F, V_F): the energy norm of M* restricted to
/// span{v_x : x ∈ F}.
double restricted_norm(const EnergySpace& space, const Multiplier& m, std::span<const Vertex> vertices);
double restricted_norm(const GramMatrix& gram, const Multiplier& m);

/// ‖V_F^{1/2} D̄_F V_F^{-1/2}‖₂ formed literally; equals restricted_norm.
double transfer_operator_norm(const GramMatrix& gram, const Multiplier& m);

struct PointMassNorm {
  double value;         // √(c(x)R(x))
  double product_form;  // ‖δ_x‖_E·‖v_x‖_E
};

PointMassNorm point_mass_norm(const EnergySpace& space, Vertex x);

/// Σ_{x∈X} |f(x)|·√(c(x)R(x)).
double sufficiency_bound(const EnergySpace& space, const Multiplier& m);

/// Nested prefixes of X in vertex order, one per requested size. Sizes must
/// be strictly increasing and at most |X|; an empty list means every prefix.
Exhaustion prefix_exhaustion(const Network& net, std::span<const std::size_t> sizes = {});
bool is_nested(const Exhaustion& exhaustion);

/// Smallest b (to within `resolution`) at which certify_bound passes on every
/// F, found by bisection on [lo, hi]. hi is doubled until it passes.
double bisect_bound(const EnergySpace& space, const Multiplier& m, const Exhaustion& exhaustion, double lo, double hi,
                    double resolution = 1e-8, std::optional<double> tol = std::nullopt);

struct RankOneCheck {
  double max_residual = 0.0;  // largest energy-norm discrepancy
  double scale = 1.0;         // max (1 + ‖u‖_E)·max(1, ‖M_x‖‖M_y‖) over inputs
  double relative() const noexcept { return max_residual / scale; }
};

/// Applies both sides of M_x = |δ_x⟩⟨v_x|, M_x* = |v_x⟩⟨δ_x|,
/// M_x*M_y = ⟨δ_x,δ_y⟩|v_x⟩⟨v_y| and M_xM_y* = ⟨v_x,v_y⟩|δ_x⟩⟨δ_y| to every
/// sample and to each kernel vector.
RankOneCheck rank_one_identities(const EnergySpace& space, Vertex x, Vertex y, std::span<const EnergyVector> samples);

struct ProjectionCheck {
  double idempotence = 0.0;  // U_x² = U_x, D_x² = D_x (both x and y)
  double scaling = 0.0;      // U_x = M_x*M_x/(c R), D_x = M_xM_x*/(c R)
  double products = 0.0;     // the four U/D product relations
  double uu_coefficient = 0.0;  // ⟨v_x,v_y⟩/√(R(x)R(y))
  double dd_coefficient = 0.0;  // ⟨δ_x,δ_y⟩/√(c(x)c(y))
  double max_residual() const noexcept { return std::max({idempotence, scaling, products}); }
};

/// Builds U_x = |u_x⟩⟨u_x| and D_x = |d_x⟩⟨d_x| for the normalized u_x, d_x
/// as matrices on the coordinate basis {δ_z : z ∈ X} and measures every
/// relation in the energy operator norm.
ProjectionCheck normalized_projections(const EnergySpace& space, Vertex x, Vertex y);

/// max over samples of ‖P_n M_f P_n u − P_n M_{f·χ_Fm} P_n u‖_E / (1 + ‖u‖_E),
/// P_n the energy projection onto span{v_x : x ∈ F_n} built from the
/// V-metric Gram–Schmidt basis. Throws InsufficientEnclosure unless
/// F_n ⊆ F_m and every interior neighbour of supp(f) ∩ F_n lies in F_m.
double truncation_consistency(const EnergySpace& space, const Multiplier& m, std::span<const Vertex> inner,
                              std::span<const Vertex> outer, std::span<const EnergyVector> samples);

// ---------------------------------------------------------------------------
// Reports

enum class Verdict { Certified, Fail, UnboundedGrowth, Inconclusive };

std::string_view to_string(Verdict v);

struct TraceEntry {
  std::size_t size;
  double rho;
  double rho_literal;
};

struct Certificate {
  double b;
  bool psd;
  double lambda_min;
  std::optional<std::size_t> failing_size;  // |F| of the first failing set
  Eigen::VectorXcd witness;                 // empty when psd everywhere
};

struct MultiplierReport {
  std::vector<TraceEntry> lower_trace;
  double best_lower = 0.0;
  double upper = 0.0;
  std::optional<double> bisection_bound;
  std::vector<Certificate> certs;
  Verdict verdict = Verdict::Inconclusive;
  /// best_lower exceeded upper by more than 1e-8 (relative).
  bool inconsistent = false;
};

struct AnalyzeOptions {
  std::vector<double> bounds;  // explicit b values to certify
  bool estimate = false;       // bisection between best_lower and upper
  std::optional<double> tol;
};

MultiplierReport analyze(const EnergySpace& space, const Multiplier& m, const Exhaustion& exhaustion,
                         const AnalyzeOptions& options);

}  // namespace energyspace
