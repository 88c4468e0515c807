#include "energyspace/network.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <queue>
#include <random>

#include "energyspace/error.hpp"

namespace energyspace {

namespace {

std::uint64_t next_uid() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(ErrorCode::ParseError, "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// VertexId

VertexId::VertexId(std::int64_t value) : label_(std::to_string(value)), integer_(true) {}

VertexId::VertexId(std::string label) : label_(std::move(label)) {}

// ---------------------------------------------------------------------------
// Network

Network Network::build(std::span<const EdgeSpec> edges, const VertexId& origin) {
  if (edges.empty()) fail(ErrorCode::InvalidArgument, "edge list is empty");

  Network net;
  auto intern = [&net](const VertexId& id) {
    auto [it, inserted] = net.index_.try_emplace(id.label(), net.ids_.size());
    if (inserted) net.ids_.push_back(id);
    return it->second;
  };

  // (min, max) index pair -> position in edges_
  std::unordered_map<std::uint64_t, std::size_t> seen;
  for (const auto& e : edges) {
    if (!(e.conductance > 0.0) || !std::isfinite(e.conductance)) {
      fail(ErrorCode::NonPositiveConductance,
           "edge (" + e.x.label() + "," + e.y.label() + ") has conductance " + std::to_string(e.conductance));
    }
    if (e.x == e.y) fail(ErrorCode::SelfLoop, "self-loop at vertex " + e.x.label());
    Vertex a = intern(e.x);
    Vertex b = intern(e.y);
    auto key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | static_cast<std::uint64_t>(std::max(a, b));
    if (auto it = seen.find(key); it != seen.end()) {
      if (net.edges_[it->second].conductance != e.conductance) {
        fail(ErrorCode::AsymmetricInput, "duplicate edge (" + e.x.label() + "," + e.y.label() +
                                             ") with unequal conductances");
      }
      continue;
    }
    seen.emplace(key, net.edges_.size());
    net.edges_.push_back({a, b, e.conductance});
  }

  auto o = net.index_.find(origin.label());
  if (o == net.index_.end()) fail(ErrorCode::OriginMissing, "origin " + origin.label() + " is not an edge endpoint");
  net.origin_ = o->second;

  const std::size_t n = net.ids_.size();
  net.adjacency_.assign(n, {});
  net.total_.assign(n, 0.0);
  for (const auto& e : net.edges_) {
    net.adjacency_[e.a].push_back({e.b, e.conductance});
    net.adjacency_[e.b].push_back({e.a, e.conductance});
    net.total_[e.a] += e.conductance;
    net.total_[e.b] += e.conductance;
  }

  std::vector<bool> reached(n, false);
  std::queue<Vertex> frontier;
  frontier.push(net.origin_);
  reached[net.origin_] = true;
  std::size_t count = 1;
  while (!frontier.empty()) {
    Vertex x = frontier.front();
    frontier.pop();
    for (const auto& nb : net.adjacency_[x]) {
      if (!reached[nb.vertex]) {
        reached[nb.vertex] = true;
        ++count;
        frontier.push(nb.vertex);
      }
    }
  }
  if (count != n) {
    auto it = std::find(reached.begin(), reached.end(), false);
    fail(ErrorCode::Disconnected,
         "vertex " + net.ids_[static_cast<std::size_t>(it - reached.begin())].label() + " is not reachable from the origin");
  }

  net.uid_ = next_uid();
  return net;
}

const VertexId& Network::id(Vertex x) const {
  require_vertex(x);
  return ids_[x];
}

std::optional<Vertex> Network::find(const VertexId& id) const {
  if (auto it = index_.find(id.label()); it != index_.end()) return it->second;
  return std::nullopt;
}

Vertex Network::index_of(const VertexId& id) const {
  if (auto x = find(id)) return *x;
  fail(ErrorCode::UnknownVertex, "no vertex with id " + id.label());
}

std::span<const Neighbor> Network::neighbors(Vertex x) const {
  require_vertex(x);
  return adjacency_[x];
}

double Network::conductance(Vertex x, Vertex y) const {
  require_vertex(x);
  require_vertex(y);
  for (const auto& nb : adjacency_[x]) {
    if (nb.vertex == y) return nb.conductance;
  }
  return 0.0;
}

double Network::total_conductance(Vertex x) const {
  require_vertex(x);
  return total_[x];
}

std::vector<Vertex> Network::interior() const {
  std::vector<Vertex> out;
  out.reserve(size() - 1);
  for (Vertex x = 0; x < size(); ++x) {
    if (x != origin_) out.push_back(x);
  }
  return out;
}

std::size_t Network::interior_position(Vertex x) const {
  require_vertex(x);
  if (x == origin_) return npos;
  return x < origin_ ? x : x - 1;
}

void Network::require_vertex(Vertex x) const {
  if (x >= ids_.size()) {
    fail(ErrorCode::UnknownVertex, "vertex index " + std::to_string(x) + " out of range (n=" +
                                       std::to_string(ids_.size()) + ")");
  }
}

bool operator==(const Network& a, const Network& b) {
  if (a.origin_ != b.origin_ || a.ids_.size() != b.ids_.size() || a.edges_.size() != b.edges_.size()) return false;
  for (std::size_t i = 0; i < a.ids_.size(); ++i) {
    if (!(a.ids_[i] == b.ids_[i])) return false;
  }
  for (std::size_t i = 0; i < a.edges_.size(); ++i) {
    const auto& ea = a.edges_[i];
    const auto& eb = b.edges_[i];
    if (ea.a != eb.a || ea.b != eb.b || ea.conductance != eb.conductance) return false;
  }
  return true;
}

Network build_network(std::span<const EdgeSpec> edges, const VertexId& origin) {
  return Network::build(edges, origin);
}

double total_conductance(const Network& net, Vertex x) { return net.total_conductance(x); }

// ---------------------------------------------------------------------------
// VertexFunction

VertexFunction::VertexFunction(const Network& net, Eigen::VectorXcd values)
    : values_(std::move(values)), network_uid_(net.uid()) {
  if (static_cast<std::size_t>(values_.size()) != net.size()) {
    fail(ErrorCode::DomainMismatch, "function has " + std::to_string(values_.size()) +
                                        " values but the network has " + std::to_string(net.size()) + " vertices");
  }
}

VertexFunction VertexFunction::zeros(const Network& net) {
  return {net, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()))};
}

VertexFunction VertexFunction::constant(const Network& net, Complex value) {
  return {net, Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(net.size()), value)};
}

VertexFunction VertexFunction::delta(const Network& net, Vertex x) {
  net.require_vertex(x);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()));
  v[static_cast<Eigen::Index>(x)] = 1.0;
  return {net, std::move(v)};
}

VertexFunction laplacian_apply(const Network& net, const VertexFunction& u) {
  if (u.network_uid() != net.uid()) fail(ErrorCode::NetworkMismatch, "function belongs to another network");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()));
  for (const auto& e : net.edges()) {
    Complex diff = e.conductance * (u[e.a] - u[e.b]);
    out[static_cast<Eigen::Index>(e.a)] += diff;
    out[static_cast<Eigen::Index>(e.b)] -= diff;
  }
  return {net, std::move(out)};
}

Eigen::MatrixXd laplacian_matrix(const Network& net) {
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : net.edges()) {
    const auto a = static_cast<Eigen::Index>(e.a);
    const auto b = static_cast<Eigen::Index>(e.b);
    L(a, a) += e.conductance;
    L(b, b) += e.conductance;
    L(a, b) -= e.conductance;
    L(b, a) -= e.conductance;
  }
  return L;
}

Eigen::MatrixXd grounded_laplacian(const Network& net) {
  const auto n = static_cast<Eigen::Index>(net.size()) - 1;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : net.edges()) {
    const auto pa = net.interior_position(e.a);
    const auto pb = net.interior_position(e.b);
    if (pa != npos) L(static_cast<Eigen::Index>(pa), static_cast<Eigen::Index>(pa)) += e.conductance;
    if (pb != npos) L(static_cast<Eigen::Index>(pb), static_cast<Eigen::Index>(pb)) += e.conductance;
    if (pa != npos && pb != npos) {
      L(static_cast<Eigen::Index>(pa), static_cast<Eigen::Index>(pb)) -= e.conductance;
      L(static_cast<Eigen::Index>(pb), static_cast<Eigen::Index>(pa)) -= e.conductance;
    }
  }
  return L;
}

// ---------------------------------------------------------------------------
// Generators

ConductanceProfile ConductanceProfile::constant(double c) {
  if (!(c > 0.0)) fail(ErrorCode::NonPositiveConductance, "constant profile needs c > 0");
  ConductanceProfile p;
  p.kind = Kind::Constant;
  p.value = c;
  return p;
}

ConductanceProfile ConductanceProfile::uniform(double lo, double hi, std::uint64_t seed) {
  if (!(lo > 0.0)) fail(ErrorCode::NonPositiveConductance, "uniform profile needs a positive lower weight");
  if (!(hi >= lo)) fail(ErrorCode::InvalidArgument, "uniform profile needs lo <= hi");
  ConductanceProfile p;
  p.kind = Kind::Uniform;
  p.lo = lo;
  p.hi = hi;
  p.seed = seed;
  return p;
}

ConductanceProfile ConductanceProfile::parse(std::string_view text) {
  auto parts = split(text, ':');
  if (parts[0] == "unit" && parts.size() == 1) return unit();
  if (parts[0] == "const" && parts.size() == 2) return constant(parse_number<double>(parts[1], "conductance"));
  if (parts[0] == "uniform" && (parts.size() == 3 || parts.size() == 4)) {
    std::uint64_t seed = parts.size() == 4 ? parse_number<std::uint64_t>(parts[3], "seed") : 0;
    return uniform(parse_number<double>(parts[1], "lower weight"), parse_number<double>(parts[2], "upper weight"), seed);
  }
  fail(ErrorCode::ParseError, "unknown conductance profile '" + std::string(text) + "'");
}

GeneratorSpec GeneratorSpec::parse(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() < 2) fail(ErrorCode::ParseError, "generator spec must look like family:size, got '" + std::string(text) + "'");
  GeneratorSpec spec;
  const auto family = parts[0];
  if (family == "path") spec.family = Family::Path;
  else if (family == "cycle") spec.family = Family::Cycle;
  else if (family == "integer_segment") spec.family = Family::IntegerSegment;
  else if (family == "binary_tree") spec.family = Family::BinaryTree;
  else if (family == "random") spec.family = Family::Random;
  else fail(ErrorCode::ParseError, "unknown generator family '" + std::string(family) + "'");

  spec.size = parse_number<int>(parts[1], "generator size");
  if (spec.family == Family::Random) {
    if (parts.size() > 4) fail(ErrorCode::ParseError, "random generator takes random:<n>[:<p>[:<seed>]]");
    if (parts.size() >= 3) spec.edge_probability = parse_number<double>(parts[2], "edge probability");
    if (parts.size() == 4) spec.seed = parse_number<std::uint64_t>(parts[3], "seed");
  } else if (parts.size() != 2) {
    fail(ErrorCode::ParseError, "generator spec '" + std::string(text) + "' has trailing fields");
  }
  return spec;
}

namespace {

class WeightSource {
 public:
  explicit WeightSource(const ConductanceProfile& profile) : profile_(profile), rng_(profile.seed) {}

  double next() {
    switch (profile_.kind) {
      case ConductanceProfile::Kind::Unit: return 1.0;
      case ConductanceProfile::Kind::Constant: return profile_.value;
      case ConductanceProfile::Kind::Uniform:
        return std::uniform_real_distribution<double>(profile_.lo, profile_.hi)(rng_);
    }
    return 1.0;
  }

 private:
  ConductanceProfile profile_;
  std::mt19937_64 rng_;
};

void require_size(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::InvalidSize, what);
}

}  // namespace

Network path(int n, const ConductanceProfile& profile) {
  require_size(n >= 2, "path(n) needs n >= 2, got " + std::to_string(n));
  WeightSource w(profile);
  std::vector<EdgeSpec> edges;
  for (int k = 0; k + 1 < n; ++k) edges.push_back({k, k + 1, w.next()});
  return build_network(edges, 0);
}

Network cycle(int n, const ConductanceProfile& profile) {
  require_size(n >= 3, "cycle(n) needs n >= 3, got " + std::to_string(n));
  WeightSource w(profile);
  std::vector<EdgeSpec> edges;
  for (int k = 0; k < n; ++k) edges.push_back({k, (k + 1) % n, w.next()});
  return build_network(edges, 0);
}

Network integer_segment(int n, const ConductanceProfile& profile) {
  require_size(n >= 1, "integer_segment(n) needs n >= 1, got " + std::to_string(n));
  WeightSource w(profile);
  std::vector<EdgeSpec> edges;
  for (int k = 0; k < n; ++k) edges.push_back({k, k + 1, w.next()});
  return build_network(edges, 0);
}

Network binary_tree(int depth, const ConductanceProfile& profile) {
  require_size(depth >= 1 && depth <= 20, "binary_tree(depth) needs 1 <= depth <= 20, got " + std::to_string(depth));
  WeightSource w(profile);
  const int count = (1 << (depth + 1)) - 1;
  std::vector<EdgeSpec> edges;
  for (int child = 1; child < count; ++child) edges.push_back({(child - 1) / 2, child, w.next()});
  return build_network(edges, 0);
}

Network random_connected(int n, double p, std::uint64_t seed, const ConductanceProfile& profile) {
  require_size(n >= 2, "random(n) needs n >= 2, got " + std::to_string(n));
  if (!(p >= 0.0 && p <= 1.0)) fail(ErrorCode::InvalidArgument, "edge probability must lie in [0,1]");
  std::mt19937_64 rng(seed);
  WeightSource w(profile);
  std::vector<std::vector<bool>> present(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n), false));
  std::vector<EdgeSpec> edges;
  for (int v = 1; v < n; ++v) {
    int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    present[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = true;
    edges.push_back({u, v, w.next()});
  }
  std::bernoulli_distribution extra(p);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (present[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) continue;
      if (extra(rng)) edges.push_back({u, v, w.next()});
    }
  }
  return build_network(edges, 0);
}

Network generate(const GeneratorSpec& spec, const ConductanceProfile& profile) {
  switch (spec.family) {
    case Family::Path: return path(spec.size, profile);
    case Family::Cycle: return cycle(spec.size, profile);
    case Family::IntegerSegment: return integer_segment(spec.size, profile);
    case Family::BinaryTree: return binary_tree(spec.size, profile);
    case Family::Random: return random_connected(spec.size, spec.edge_probability, spec.seed, profile);
  }
  fail(ErrorCode::InvalidArgument, "unknown family");
}

}  // namespace energyspace
