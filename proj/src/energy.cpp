#include "energyspace/energy.hpp"

#include <algorithm>
#include <unordered_set>

#include "energyspace/error.hpp"

namespace energyspace {

namespace {

void require_same(const Network& net, std::uint64_t uid) {
  if (uid != net.uid()) fail(ErrorCode::NetworkMismatch, "vector belongs to another network");
}

void require_vertices(const Network& net, std::span<const Vertex> vertices) {
  if (vertices.empty()) fail(ErrorCode::InvalidArgument, "vertex list is empty");
  std::unordered_set<Vertex> seen;
  for (Vertex x : vertices) {
    net.require_vertex(x);
    if (!seen.insert(x).second) fail(ErrorCode::InvalidArgument, "vertex " + net.id(x).label() + " listed twice");
  }
}

Eigen::VectorXcd solve_real_factor(const numkernel::Cholesky<double>& factor, const Eigen::VectorXcd& rhs) {
  const Eigen::VectorXd re = factor.solve(Eigen::VectorXd(rhs.real()));
  const Eigen::VectorXd im = factor.solve(Eigen::VectorXd(rhs.imag()));
  Eigen::VectorXcd out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// EnergyVector

EnergyVector EnergyVector::ground(const Network& net, const VertexFunction& u) {
  require_same(net, u.network_uid());
  Eigen::VectorXcd values = u.values();
  values.array() -= u[net.origin()];
  values[static_cast<Eigen::Index>(net.origin())] = 0.0;
  VertexFunction rep(net, std::move(values));
  const double energy = std::max(0.0, energy_form(net, rep, rep).real());
  return {std::move(rep), energy};
}

EnergyVector EnergyVector::ground(const Network& net, Eigen::VectorXcd values) {
  return ground(net, VertexFunction(net, std::move(values)));
}

EnergyVector EnergyVector::zero(const Network& net) { return {VertexFunction::zeros(net), 0.0}; }

Complex energy_form(const Network& net, const VertexFunction& u, const VertexFunction& v) {
  require_same(net, u.network_uid());
  require_same(net, v.network_uid());
  // each undirected edge appears twice in the ½ Σ_{x,y} sum
  Complex sum = 0.0;
  for (const auto& e : net.edges()) {
    sum += e.conductance * std::conj(u[e.a] - u[e.b]) * (v[e.a] - v[e.b]);
  }
  return sum;
}

Complex energy_form(const Network& net, const EnergyVector& u, const EnergyVector& v) {
  return energy_form(net, u.rep(), v.rep());
}

// ---------------------------------------------------------------------------
// GramMatrix

GramMatrix::GramMatrix(std::vector<Vertex> vertices, numkernel::RealSymMatrix v, double reproducing_defect)
    : vertices_(std::move(vertices)),
      v_(std::move(v)),
      reproducing_defect_(reproducing_defect),
      cache_(std::make_shared<Cache>()) {}

const numkernel::RealSymMatrix& GramMatrix::sqrt() const {
  std::call_once(cache_->sqrt_once, [this] { cache_->sqrt.emplace(numkernel::sqrtm_psd(v_)); });
  return *cache_->sqrt;
}

const numkernel::Cholesky<double>& GramMatrix::cholesky() const {
  std::call_once(cache_->chol_once, [this] { cache_->chol.emplace(v_); });
  return *cache_->chol;
}

// ---------------------------------------------------------------------------
// EnergySpace

EnergySpace::EnergySpace(const Network& net)
    : net_(&net), factor_(numkernel::RealSymMatrix(grounded_laplacian(net))), kernels_(net.size()) {}

EnergyVector EnergySpace::solve_grounded(const Eigen::VectorXcd& rhs) const {
  const Network& net = *net_;
  if (static_cast<std::size_t>(rhs.size()) != net.size()) fail(ErrorCode::DomainMismatch, "right side has wrong length");
  Eigen::VectorXcd reduced(static_cast<Eigen::Index>(net.size() - 1));
  for (Vertex x = 0; x < net.size(); ++x) {
    if (auto p = net.interior_position(x); p != npos) reduced[static_cast<Eigen::Index>(p)] = rhs[static_cast<Eigen::Index>(x)];
  }
  const Eigen::VectorXcd w = solve_real_factor(factor_, reduced);
  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()));
  for (Vertex x = 0; x < net.size(); ++x) {
    if (auto p = net.interior_position(x); p != npos) full[static_cast<Eigen::Index>(x)] = w[static_cast<Eigen::Index>(p)];
  }
  return EnergyVector::ground(net, std::move(full));
}

const EnergyVector& EnergySpace::kernel(Vertex x) const {
  net_->require_vertex(x);
  {
    std::shared_lock lock(mutex_);
    if (kernels_[x]) return *kernels_[x];
  }
  EnergyVector v = x == net_->origin() ? EnergyVector::zero(*net_)
                                       : solve_grounded(VertexFunction::delta(*net_, x).values());
  std::unique_lock lock(mutex_);
  if (!kernels_[x]) kernels_[x].emplace(std::move(v));
  return *kernels_[x];
}

EffectiveResistance EnergySpace::resistance(Vertex x) const {
  if (x == net_->origin()) fail(ErrorCode::InvalidArgument, "effective resistance from the origin to itself");
  const auto& v = kernel(x);
  return {v[x].real() - v[net_->origin()].real(), energy_form(*net_, v, v).real()};
}

GramMatrix EnergySpace::gram(std::span<const Vertex> vertices) const {
  require_interior_subset(*net_, vertices);
  const auto k = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXd v(k, k);
  double defect = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& vi = kernel(vertices[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Vertex y = vertices[static_cast<std::size_t>(j)];
      const auto& vj = kernel(y);
      const Complex e = energy_form(*net_, vi, vj);
      v(i, j) = e.real();
      defect = std::max({defect, std::abs(e - vi[y]), std::abs(e.imag())});
    }
  }
  return {std::vector<Vertex>(vertices.begin(), vertices.end()), numkernel::RealSymMatrix(std::move(v)), defect};
}

// ---------------------------------------------------------------------------
// Free functions

void require_interior_subset(const Network& net, std::span<const Vertex> vertices) {
  require_vertices(net, vertices);
  for (Vertex x : vertices) {
    if (x == net.origin()) fail(ErrorCode::OriginInF, "the origin cannot belong to F");
  }
}

EnergyVector energy_kernel(const Network& net, Vertex x) { return EnergySpace(net).kernel(x); }

double effective_resistance(const Network& net, Vertex x) { return EnergySpace(net).resistance(x).potential; }

EffectiveResistance effective_resistance_report(const Network& net, Vertex x) { return EnergySpace(net).resistance(x); }

GramMatrix gram_matrix(const Network& net, std::span<const Vertex> vertices) { return EnergySpace(net).gram(vertices); }

numkernel::RealSymMatrix delta_gram(const Network& net, std::span<const Vertex> vertices) {
  require_vertices(net, vertices);
  const auto k = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXd d(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const Vertex x = vertices[static_cast<std::size_t>(i)];
      const Vertex y = vertices[static_cast<std::size_t>(j)];
      d(i, j) = i == j ? net.total_conductance(x) : -net.conductance(x, y);
    }
  }
  return numkernel::RealSymMatrix(std::move(d));
}

double reproducing_check(const EnergySpace& space, Vertex x, const EnergyVector& u) {
  const Network& net = space.network();
  require_same(net, u.network_uid());
  const Complex lhs = energy_form(net, space.kernel(x), u);
  return std::abs(lhs - (u[x] - u[net.origin()]));
}

double reproducing_check(const Network& net, Vertex x, const EnergyVector& u) {
  return reproducing_check(EnergySpace(net), x, u);
}

double lap_pairing_check(const Network& net, Vertex x, const EnergyVector& u) {
  require_same(net, u.network_uid());
  const Complex lhs = energy_form(net, VertexFunction::delta(net, x), u.rep());
  const Complex rhs = laplacian_apply(net, u.rep())[x];
  return std::abs(lhs - rhs);
}

EnergyVector fin_projection(const Network& net, const EnergyVector& u, std::span<const Vertex> vertices) {
  require_same(net, u.network_uid());
  require_vertices(net, vertices);
  std::vector<Vertex> f(vertices.begin(), vertices.end());
  if (f.size() == net.size()) f.erase(std::find(f.begin(), f.end(), net.origin()));

  const auto lap = laplacian_apply(net, u.rep());
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) rhs[static_cast<Eigen::Index>(i)] = lap[f[i]];  // ⟨δ_x, u⟩_E = Δu(x)

  const auto gram = delta_gram(net, f);
  const numkernel::ComplexSymMatrix cgram(gram.matrix().cast<Complex>());
  const Eigen::VectorXcd coeff = numkernel::spd_solve(cgram, rhs);

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()));
  for (std::size_t i = 0; i < f.size(); ++i) out[static_cast<Eigen::Index>(f[i])] = coeff[static_cast<Eigen::Index>(i)];
  return EnergyVector::ground(net, std::move(out));
}

double sup_norm(const EnergyVector& u) {
  if (u.size() == 0) return 0.0;
  return u.values().cwiseAbs().maxCoeff();
}

double banach_norm(const EnergyVector& u) { return sup_norm(u) + u.norm(); }

ProductEstimate pointwise_product(const Network& net, const EnergyVector& u1, const EnergyVector& u2) {
  require_same(net, u1.network_uid());
  require_same(net, u2.network_uid());
  auto product = EnergyVector::ground(net, Eigen::VectorXcd(u1.values().cwiseProduct(u2.values())));
  const double s1 = sup_norm(u1);
  const double s2 = sup_norm(u2);
  const double cross = std::abs(energy_form(net, u1, u2));
  const double lhs = product.energy();
  const double rhs = s2 * s2 * u1.energy() + 2.0 * s1 * s2 * cross + s1 * s1 * u2.energy();
  return {std::move(product), lhs, rhs};
}

}  // namespace energyspace
