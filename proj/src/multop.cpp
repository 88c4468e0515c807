#include "energyspace/multop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "energyspace/error.hpp"

namespace energyspace {

namespace {

using numkernel::ComplexSymMatrix;
using numkernel::RealSymMatrix;

void require_same(const Network& net, std::uint64_t uid) {
  if (uid != net.uid()) fail(ErrorCode::NetworkMismatch, "operand belongs to another network");
}

bool real_on(const Multiplier& m, std::span<const Vertex> vertices) {
  return std::all_of(vertices.begin(), vertices.end(), [&m](Vertex x) { return m[x].imag() == 0.0; });
}

Eigen::VectorXcd restrict_f(const Multiplier& m, std::span<const Vertex> vertices) {
  Eigen::VectorXcd d(static_cast<Eigen::Index>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i) d[static_cast<Eigen::Index>(i)] = m[vertices[i]];
  return d;
}

numkernel::PsdVerdict<Complex> to_complex(const numkernel::PsdVerdict<double>& v) {
  return {v.is_psd, v.min_eigenvalue, v.witness.cast<Complex>(), v.tolerance, v.witness_value};
}

// Energy operator norm of a coordinate matrix A (coordinates = values on X,
// metric G = LLᵀ): ‖Lᵀ A L⁻ᵀ‖₂.
double energy_operator_norm(const Eigen::MatrixXd& lower, const Eigen::MatrixXcd& a) {
  const Eigen::MatrixXcd l = lower.cast<Complex>();
  const Eigen::MatrixXcd lt = l.adjoint();
  // X = A L⁻ᵀ  ⇔  X Lᵀ = A  ⇔  L Xᴴ = Aᴴ
  const Eigen::MatrixXcd x = l.triangularView<Eigen::Lower>().solve(a.adjoint()).adjoint();
  return numkernel::spectral_norm<Complex>(lt * x);
}

}  // namespace

// ---------------------------------------------------------------------------
// Multiplier

Multiplier::Multiplier(const Network& net, VertexFunction f) : f_(std::move(f)), real_(true) {
  require_same(net, f_.network_uid());
  for (Vertex x = 0; x < net.size(); ++x) {
    if (x != net.origin() && f_[x].imag() != 0.0) real_ = false;
  }
}

Multiplier Multiplier::delta(const Network& net, Vertex x) { return {net, VertexFunction::delta(net, x)}; }

Multiplier Multiplier::kernel(const EnergySpace& space, Vertex x) {
  return {space.network(), space.kernel(x).rep()};
}

Multiplier Multiplier::constant(const Network& net, Complex c) { return {net, VertexFunction::constant(net, c)}; }

// ---------------------------------------------------------------------------
// Operator actions

EnergyVector apply(const Network& net, const Multiplier& m, const EnergyVector& u) {
  require_same(net, m.network_uid());
  require_same(net, u.network_uid());
  return EnergyVector::ground(net, Eigen::VectorXcd(m.f().values().cwiseProduct(u.values())));
}

EnergyVector adjoint_on_kernel(const EnergySpace& space, const Multiplier& m, Vertex x) {
  const Network& net = space.network();
  require_same(net, m.network_uid());
  if (x == net.origin()) fail(ErrorCode::InvalidArgument, "adjoint_on_kernel needs x in X");
  const auto& v = space.kernel(x);
  return EnergyVector::ground(net, Eigen::VectorXcd(std::conj(m[x]) * v.values()));
}

EnergyVector adjoint_apply(const EnergySpace& space, const Multiplier& m, const EnergyVector& u) {
  const Network& net = space.network();
  require_same(net, m.network_uid());
  require_same(net, u.network_uid());
  const auto lap = laplacian_apply(net, u.rep());
  Eigen::VectorXcd rhs = m.f().values().conjugate().cwiseProduct(lap.values());
  return space.solve_grounded(rhs);
}

Complex hermitian_defect(const Network& net, const Multiplier& m, const EnergyVector& u, const EnergyVector& v) {
  return energy_form(net, apply(net, m, u), v) - energy_form(net, u, apply(net, m, v));
}

// ---------------------------------------------------------------------------
// Boundedness

numkernel::ComplexSymMatrix s_matrix(const EnergySpace& space, const Multiplier& m, double b,
                                     std::span<const Vertex> vertices) {
  require_same(space.network(), m.network_uid());
  if (!(b >= 0.0)) fail(ErrorCode::InvalidArgument, "bound b must be nonnegative");
  const auto gram = space.gram(vertices);
  const auto k = gram.size();
  const Eigen::VectorXcd f = restrict_f(m, vertices);
  Eigen::MatrixXcd s(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) s(i, j) = (b * b - f[i] * std::conj(f[j])) * gram.matrix()(i, j);
  }
  return ComplexSymMatrix(std::move(s));
}

namespace {

numkernel::PsdVerdict<Complex> certify_one(const GramMatrix& gram, const Multiplier& m, double b,
                                           std::optional<double> tol) {
  const auto k = gram.size();
  const auto& verts = gram.vertices();
  const auto& v = gram.matrix().matrix();
  if (real_on(m, verts)) {
    Eigen::VectorXd f(k);
    for (Eigen::Index i = 0; i < k; ++i) f[i] = m[verts[static_cast<std::size_t>(i)]].real();
    Eigen::MatrixXd s = b * b * v - f.asDiagonal() * v * f.asDiagonal();
    return to_complex(numkernel::psd_check(RealSymMatrix(std::move(s)), tol));
  }
  const Eigen::VectorXcd f = restrict_f(m, verts);
  Eigen::MatrixXcd s(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) s(i, j) = (b * b - f[i] * std::conj(f[j])) * v(i, j);
  }
  return numkernel::psd_check(ComplexSymMatrix(std::move(s)), tol);
}

}  // namespace

std::vector<ComplexPsdVerdict> certify_bound(const EnergySpace& space, const Multiplier& m, double b,
                                             const Exhaustion& exhaustion, std::optional<double> tol) {
  require_same(space.network(), m.network_uid());
  if (!(b >= 0.0)) fail(ErrorCode::InvalidArgument, "bound b must be nonnegative");
  std::vector<ComplexPsdVerdict> out;
  out.reserve(exhaustion.size());
  for (const auto& f : exhaustion) out.push_back(certify_one(space.gram(f), m, b, tol));
  return out;
}

double restricted_norm(const GramMatrix& gram, const Multiplier& m) {
  const auto& verts = gram.vertices();
  const auto& v = gram.matrix().matrix();
  double lambda = 0.0;
  if (real_on(m, verts)) {
    Eigen::VectorXd f(gram.size());
    for (Eigen::Index i = 0; i < gram.size(); ++i) f[i] = m[verts[static_cast<std::size_t>(i)]].real();
    Eigen::MatrixXd a = f.asDiagonal() * v * f.asDiagonal();
    lambda = numkernel::gen_eig_max(RealSymMatrix(std::move(a)), gram.matrix()).value;
  } else {
    const Eigen::VectorXcd f = restrict_f(m, verts);
    Eigen::MatrixXcd a = f.asDiagonal() * v.cast<Complex>() * f.conjugate().asDiagonal();
    lambda = numkernel::gen_eig_max(ComplexSymMatrix(std::move(a)), ComplexSymMatrix(v.cast<Complex>())).value;
  }
  return std::sqrt(std::max(0.0, lambda));
}

double restricted_norm(const EnergySpace& space, const Multiplier& m, std::span<const Vertex> vertices) {
  require_same(space.network(), m.network_uid());
  return restricted_norm(space.gram(vertices), m);
}

double transfer_operator_norm(const GramMatrix& gram, const Multiplier& m) {
  const Eigen::MatrixXcd root = gram.sqrt().matrix().cast<Complex>();
  const Eigen::VectorXcd f = restrict_f(m, gram.vertices());
  // T = W D̄ W⁻¹ with W = V^{1/2}
  const Eigen::MatrixXcd wd = root * f.conjugate().asDiagonal();
  const Eigen::MatrixXcd t = root.partialPivLu().solve(wd.adjoint()).adjoint();
  return numkernel::spectral_norm<Complex>(t);
}

PointMassNorm point_mass_norm(const EnergySpace& space, Vertex x) {
  const Network& net = space.network();
  if (x == net.origin()) fail(ErrorCode::InvalidArgument, "point_mass_norm needs x in X");
  const double c = net.total_conductance(x);
  const auto r = space.resistance(x);
  const double delta_norm = std::sqrt(energy_form(net, VertexFunction::delta(net, x), VertexFunction::delta(net, x)).real());
  return {std::sqrt(c * r.potential), delta_norm * space.kernel(x).norm()};
}

double sufficiency_bound(const EnergySpace& space, const Multiplier& m) {
  const Network& net = space.network();
  require_same(net, m.network_uid());
  double sum = 0.0;
  for (Vertex x : net.interior()) {
    if (m[x] != Complex(0.0)) sum += std::abs(m[x]) * point_mass_norm(space, x).value;
  }
  return sum;
}

Exhaustion prefix_exhaustion(const Network& net, std::span<const std::size_t> sizes) {
  const auto interior = net.interior();
  std::vector<std::size_t> ks(sizes.begin(), sizes.end());
  if (ks.empty()) {
    for (std::size_t k = 1; k <= interior.size(); ++k) ks.push_back(k);
  }
  Exhaustion out;
  std::size_t previous = 0;
  for (std::size_t k : ks) {
    if (k == 0 || k > interior.size()) {
      fail(ErrorCode::InvalidSize, "exhaustion size " + std::to_string(k) + " outside 1.." + std::to_string(interior.size()));
    }
    if (k <= previous) fail(ErrorCode::InvalidArgument, "exhaustion sizes must be strictly increasing");
    previous = k;
    out.emplace_back(interior.begin(), interior.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

bool is_nested(const Exhaustion& exhaustion) {
  for (std::size_t i = 1; i < exhaustion.size(); ++i) {
    std::unordered_set<Vertex> outer(exhaustion[i].begin(), exhaustion[i].end());
    for (Vertex x : exhaustion[i - 1]) {
      if (!outer.count(x)) return false;
    }
  }
  return true;
}

double bisect_bound(const EnergySpace& space, const Multiplier& m, const Exhaustion& exhaustion, double lo, double hi,
                    double resolution, std::optional<double> tol) {
  // Gram matrices are reused across every bisection step.
  std::vector<GramMatrix> grams;
  grams.reserve(exhaustion.size());
  for (const auto& f : exhaustion) grams.push_back(space.gram(f));
  auto passes = [&](double b) {
    return std::all_of(grams.begin(), grams.end(), [&](const GramMatrix& g) { return certify_one(g, m, b, tol).is_psd; });
  };
  lo = std::max(0.0, lo);
  hi = std::max(hi, lo);
  if (passes(lo)) return lo;
  if (hi <= lo) hi = lo + 1.0;
  while (!passes(hi)) hi *= 2.0;
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Rank-one identities

RankOneCheck rank_one_identities(const EnergySpace& space, Vertex x, Vertex y, std::span<const EnergyVector> samples) {
  const Network& net = space.network();
  if (x == net.origin() || y == net.origin()) fail(ErrorCode::InvalidArgument, "rank_one_identities needs x, y in X");
  const auto mx = Multiplier::delta(net, x);
  const auto my = Multiplier::delta(net, y);
  const auto& vx = space.kernel(x);
  const auto& vy = space.kernel(y);
  const auto dx = EnergyVector::ground(net, VertexFunction::delta(net, x));
  const auto dy = EnergyVector::ground(net, VertexFunction::delta(net, y));
  const Complex dxdy = energy_form(net, dx, dy);
  const Complex vxvy = energy_form(net, vx, vy);
  const double op_scale = std::max(1.0, point_mass_norm(space, x).value * point_mass_norm(space, y).value);

  auto scaled = [&net](const EnergyVector& v, Complex s) { return EnergyVector::ground(net, Eigen::VectorXcd(s * v.values())); };
  auto distance = [&net](const EnergyVector& a, const EnergyVector& b) {
    return EnergyVector::ground(net, Eigen::VectorXcd(a.values() - b.values())).norm();
  };

  std::vector<EnergyVector> inputs(samples.begin(), samples.end());
  for (Vertex z : net.interior()) inputs.push_back(space.kernel(z));

  RankOneCheck check;
  for (const auto& u : inputs) {
    require_same(net, u.network_uid());
    check.scale = std::max(check.scale, (1.0 + u.norm()) * op_scale);
    // M_x = |δ_x⟩⟨v_x|
    const double r1 = distance(apply(net, mx, u), scaled(dx, energy_form(net, vx, u)));
    // M_x* = |v_x⟩⟨δ_x|
    const double r2 = distance(adjoint_apply(space, mx, u), scaled(vx, energy_form(net, dx, u)));
    // M_x*M_y = ⟨δ_x,δ_y⟩ |v_x⟩⟨v_y|
    const double r3 = distance(adjoint_apply(space, mx, apply(net, my, u)), scaled(vx, dxdy * energy_form(net, vy, u)));
    // M_xM_y* = ⟨v_x,v_y⟩ |δ_x⟩⟨δ_y|
    const double r4 = distance(apply(net, mx, adjoint_apply(space, my, u)), scaled(dx, vxvy * energy_form(net, dy, u)));
    check.max_residual = std::max({check.max_residual, r1, r2, r3, r4});
  }
  return check;
}

ProjectionCheck normalized_projections(const EnergySpace& space, Vertex x, Vertex y) {
  const Network& net = space.network();
  if (x == net.origin() || y == net.origin()) fail(ErrorCode::InvalidArgument, "normalized_projections needs x, y in X");

  // Coordinates: values on X. Energy metric G = grounded Laplacian.
  const Eigen::MatrixXd g = space.grounded_factor().matrix().matrix();
  const Eigen::MatrixXd lower = space.grounded_factor().lower();
  const auto k = g.rows();
  const Eigen::MatrixXcd gc = g.cast<Complex>();

  auto coords = [&](const EnergyVector& v) {
    Eigen::VectorXcd out(k);
    for (Vertex z : net.interior()) out[static_cast<Eigen::Index>(net.interior_position(z))] = v[z];
    return out;
  };
  auto ketbra = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) -> Eigen::MatrixXcd { return a * b.adjoint() * gc; };
  auto inner = [&](const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) { return a.dot(gc * b); };
  auto adjoint = [&](const Eigen::MatrixXcd& a) -> Eigen::MatrixXcd { return gc.partialPivLu().solve(a.adjoint() * gc); };
  auto norm = [&](const Eigen::MatrixXcd& a) { return energy_operator_norm(lower, a); };
  auto dirac_matrix = [&](Vertex z) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(k, k);
    const auto p = static_cast<Eigen::Index>(net.interior_position(z));
    m(p, p) = 1.0;
    return m;
  };

  struct Normalized {
    Eigen::VectorXcd u, d;
    Eigen::MatrixXcd U, D, M;
    double c, r;
  };
  auto build = [&](Vertex z) {
    Normalized n;
    n.c = net.total_conductance(z);
    n.r = space.resistance(z).potential;
    n.u = coords(space.kernel(z)) / std::sqrt(n.r);
    n.d = coords(EnergyVector::ground(net, VertexFunction::delta(net, z))) / std::sqrt(n.c);
    n.U = ketbra(n.u, n.u);
    n.D = ketbra(n.d, n.d);
    n.M = dirac_matrix(z);
    return n;
  };
  const Normalized nx = build(x);
  const Normalized ny = build(y);

  ProjectionCheck check;
  for (const auto* n : {&nx, &ny}) {
    check.idempotence = std::max({check.idempotence, norm(n->U * n->U - n->U), norm(n->D * n->D - n->D)});
    const Eigen::MatrixXcd madj = adjoint(n->M);
    const double escape = 1.0 / (n->c * n->r);
    check.scaling = std::max({check.scaling, norm(n->U - escape * madj * n->M), norm(n->D - escape * n->M * madj)});
  }

  const auto pair = x == y ? std::vector<Vertex>{x} : std::vector<Vertex>{x, y};
  const Eigen::Index jy = x == y ? 0 : 1;
  check.uu_coefficient = space.gram(pair).matrix()(0, jy) / std::sqrt(nx.r * ny.r);
  const auto dgram = delta_gram(net, pair);
  check.dd_coefficient = dgram(0, jy) / std::sqrt(nx.c * ny.c);

  const double uu = norm(nx.U * ny.U - check.uu_coefficient * ketbra(nx.u, ny.u));
  const double ud = norm(nx.U * ny.D - inner(nx.u, ny.d) * ketbra(nx.u, ny.d));
  const double du = norm(nx.D * ny.U - inner(nx.d, ny.u) * ketbra(nx.d, ny.u));
  const double dd = norm(nx.D * ny.D - check.dd_coefficient * ketbra(nx.d, ny.d));
  check.products = std::max({uu, ud, du, dd});
  return check;
}

// ---------------------------------------------------------------------------
// Truncation

double truncation_consistency(const EnergySpace& space, const Multiplier& m, std::span<const Vertex> inner,
                              std::span<const Vertex> outer, std::span<const EnergyVector> samples) {
  const Network& net = space.network();
  require_same(net, m.network_uid());
  require_interior_subset(net, inner);
  require_interior_subset(net, outer);
  std::unordered_set<Vertex> enclosing(outer.begin(), outer.end());
  for (Vertex x : inner) {
    if (!enclosing.count(x)) fail(ErrorCode::InsufficientEnclosure, "F_n is not contained in F_m");
    if (m[x] == Complex(0.0)) continue;
    for (const auto& nb : net.neighbors(x)) {
      if (nb.vertex != net.origin() && !enclosing.count(nb.vertex)) {
        fail(ErrorCode::InsufficientEnclosure,
             "neighbour " + net.id(nb.vertex).label() + " of " + net.id(x).label() + " lies outside F_m");
      }
    }
  }

  Eigen::VectorXcd truncated = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()));
  for (Vertex x : outer) truncated[static_cast<Eigen::Index>(x)] = m[x];
  const Multiplier mm(net, VertexFunction(net, std::move(truncated)));

  const auto gram = space.gram(inner);
  const Eigen::MatrixXcd c = numkernel::gram_schmidt_V(gram.matrix()).cast<Complex>();
  const auto k = gram.size();

  // P_n w = Σ_i α_i v_{x_i} with α = C Cᴴ w|F, since ⟨v_x, w⟩_E = w(x).
  auto project = [&](const EnergyVector& w) {
    Eigen::VectorXcd wf(k);
    for (Eigen::Index i = 0; i < k; ++i) wf[i] = w[inner[static_cast<std::size_t>(i)]];
    const Eigen::VectorXcd alpha = c * (c.adjoint() * wf);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()));
    for (Eigen::Index i = 0; i < k; ++i) out += alpha[i] * space.kernel(inner[static_cast<std::size_t>(i)]).values();
    return EnergyVector::ground(net, std::move(out));
  };

  double worst = 0.0;
  for (const auto& u : samples) {
    const auto pu = project(u);
    const auto lhs = project(apply(net, m, pu));
    const auto rhs = project(apply(net, mm, pu));
    const double diff = EnergyVector::ground(net, Eigen::VectorXcd(lhs.values() - rhs.values())).norm();
    worst = std::max(worst, diff / (1.0 + u.norm()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Reports

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Certified: return "certified";
    case Verdict::Fail: return "fail";
    case Verdict::UnboundedGrowth: return "unbounded-growth";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

MultiplierReport analyze(const EnergySpace& space, const Multiplier& m, const Exhaustion& exhaustion,
                         const AnalyzeOptions& options) {
  const Network& net = space.network();
  require_same(net, m.network_uid());
  if (exhaustion.empty()) fail(ErrorCode::InvalidArgument, "exhaustion is empty");
  if (!is_nested(exhaustion)) fail(ErrorCode::InvalidArgument, "exhaustion is not nested");

  MultiplierReport report;
  std::vector<GramMatrix> grams;
  grams.reserve(exhaustion.size());
  for (const auto& f : exhaustion) {
    grams.push_back(space.gram(f));
    const double rho = restricted_norm(grams.back(), m);
    report.lower_trace.push_back({f.size(), rho, transfer_operator_norm(grams.back(), m)});
    report.best_lower = std::max(report.best_lower, rho);
  }
  report.upper = sufficiency_bound(space, m);
  report.inconsistent = report.best_lower > report.upper * (1.0 + 1e-8) + 1e-12;

  bool any_fail = false;
  for (double b : options.bounds) {
    Certificate cert{b, true, std::numeric_limits<double>::infinity(), std::nullopt, {}};
    for (const auto& g : grams) {
      const auto verdict = certify_one(g, m, b, options.tol);
      cert.lambda_min = std::min(cert.lambda_min, verdict.min_eigenvalue);
      if (!verdict.is_psd && cert.psd) {
        cert.psd = false;
        cert.failing_size = static_cast<std::size_t>(g.size());
        cert.witness = verdict.witness;
      }
    }
    any_fail = any_fail || !cert.psd;
    report.certs.push_back(std::move(cert));
  }

  if (options.estimate) {
    report.bisection_bound = bisect_bound(space, m, exhaustion, report.best_lower * (1.0 - 1e-6),
                                          std::max(report.upper, report.best_lower), 1e-8, options.tol);
  }

  const bool covers_interior = exhaustion.back().size() == net.size() - 1;
  if (any_fail) {
    report.verdict = Verdict::Fail;
  } else if (!options.bounds.empty() || covers_interior) {
    report.verdict = Verdict::Certified;
  } else {
    bool increasing = report.lower_trace.size() > 1;
    for (std::size_t i = 1; i < report.lower_trace.size(); ++i) {
      const double prev = report.lower_trace[i - 1].rho;
      if (!(report.lower_trace[i].rho > prev * (1.0 + 1e-12))) increasing = false;
    }
    report.verdict = increasing ? Verdict::UnboundedGrowth : Verdict::Inconclusive;
  }
  return report;
}

}  // namespace energyspace
