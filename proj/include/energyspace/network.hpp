#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace energyspace {

/// Dense vertex index, 0..n-1 in insertion order.
using Vertex = std::size_t;
using Complex = std::complex<double>;

/// Opaque vertex identifier as it appears in input files. Integer and string
/// spellings with the same text denote the same vertex; the integer flag is
/// kept only so that files round-trip with their original JSON types.
class VertexId {
 public:
  VertexId(std::int64_t value);  // NOLINT(google-explicit-constructor)
  VertexId(int value) : VertexId(static_cast<std::int64_t>(value)) {}  // NOLINT
  VertexId(std::string label);   // NOLINT
  VertexId(const char* label) : VertexId(std::string(label)) {}  // NOLINT

  const std::string& label() const noexcept { return label_; }
  bool is_integer() const noexcept { return integer_; }

  friend bool operator==(const VertexId& a, const VertexId& b) { return a.label_ == b.label_; }

 private:
  std::string label_;
  bool integer_ = false;
};

struct EdgeSpec {
  VertexId x;
  VertexId y;
  double conductance;
};

struct Edge {
  Vertex a;
  Vertex b;
  double conductance;
};

struct Neighbor {
  Vertex vertex;
  double conductance;
};

/// Finite connected resistance network (G, c) with a distinguished origin o.
/// Immutable after construction.
class Network {
 public:
  /// Validates and builds. Duplicate (x,y)/(y,x) entries with equal weight
  /// are merged; unequal duplicates raise AsymmetricInput.
  static Network build(std::span<const EdgeSpec> edges, const VertexId& origin);

  std::size_t size() const noexcept { return ids_.size(); }
  Vertex origin() const noexcept { return origin_; }
  std::uint64_t uid() const noexcept { return uid_; }

  const std::vector<VertexId>& ids() const noexcept { return ids_; }
  const VertexId& id(Vertex x) const;
  std::optional<Vertex> find(const VertexId& id) const;
  /// Throws UnknownVertex.
  Vertex index_of(const VertexId& id) const;

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(Vertex x) const;
  /// c_xy, or 0 when x and y are not adjacent.
  double conductance(Vertex x, Vertex y) const;
  double total_conductance(Vertex x) const;

  /// X = G \ {o} in vertex order.
  std::vector<Vertex> interior() const;
  /// Position of each vertex inside interior(); npos for the origin.
  std::size_t interior_position(Vertex x) const;

  void require_vertex(Vertex x) const;

  /// Structural equality: same ids in the same order, same edges and origin.
  friend bool operator==(const Network& a, const Network& b);

 private:
  Network() = default;

  std::vector<VertexId> ids_;
  std::unordered_map<std::string, Vertex> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<double> total_;
  Vertex origin_ = 0;
  std::uint64_t uid_ = 0;
};

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

Network build_network(std::span<const EdgeSpec> edges, const VertexId& origin);
double total_conductance(const Network& net, Vertex x);

/// Complex-valued function on the vertices of one network.
class VertexFunction {
 public:
  VertexFunction(const Network& net, Eigen::VectorXcd values);

  static VertexFunction zeros(const Network& net);
  static VertexFunction constant(const Network& net, Complex value);
  static VertexFunction delta(const Network& net, Vertex x);

  const Eigen::VectorXcd& values() const noexcept { return values_; }
  Complex operator[](Vertex x) const { return values_[static_cast<Eigen::Index>(x)]; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  std::uint64_t network_uid() const noexcept { return network_uid_; }

 private:
  Eigen::VectorXcd values_;
  std::uint64_t network_uid_;
};

/// (Δu)(x) = Σ_{y~x} c_xy (u(x) − u(y)).
VertexFunction laplacian_apply(const Network& net, const VertexFunction& u);

/// Dense Laplacian matrix, c(x) on the diagonal and −c_xy off it.
Eigen::MatrixXd laplacian_matrix(const Network& net);

/// Laplacian with the origin row and column deleted, indexed by interior().
Eigen::MatrixXd grounded_laplacian(const Network& net);

// ---------------------------------------------------------------------------
// Generators

enum class Family { Path, Cycle, IntegerSegment, BinaryTree, Random };

struct ConductanceProfile {
  enum class Kind { Unit, Constant, Uniform };
  Kind kind = Kind::Unit;
  double value = 1.0;
  double lo = 1.0;
  double hi = 1.0;
  std::uint64_t seed = 0;

  static ConductanceProfile unit() { return {}; }
  static ConductanceProfile constant(double c);
  static ConductanceProfile uniform(double lo, double hi, std::uint64_t seed);
  /// "unit", "const:<c>", "uniform:<lo>:<hi>:<seed>".
  static ConductanceProfile parse(std::string_view text);
};

struct GeneratorSpec {
  Family family = Family::Path;
  int size = 2;                    // n for path/cycle/segment/random, depth for trees
  double edge_probability = 0.3;   // random family only
  std::uint64_t seed = 0;          // random family topology

  /// "path:<n>", "cycle:<n>", "integer_segment:<n>", "binary_tree:<depth>",
  /// "random:<n>[:<p>[:<seed>]]".
  static GeneratorSpec parse(std::string_view text);
};

Network generate(const GeneratorSpec& spec, const ConductanceProfile& profile = {});

Network path(int n, const ConductanceProfile& profile = {});
Network cycle(int n, const ConductanceProfile& profile = {});
/// {0,...,n} with nearest-neighbour edges, origin 0.
Network integer_segment(int n, const ConductanceProfile& profile = {});
/// Complete binary tree, heap labelling, root 0 is the origin.
Network binary_tree(int depth, const ConductanceProfile& profile = {});
/// Random spanning tree plus independent extra edges with probability p.
Network random_connected(int n, double p, std::uint64_t seed,
                         const ConductanceProfile& profile = {});

}  // namespace energyspace
