#pragma once

#include <string>

#include <json.hpp>

#include "energyspace/energy.hpp"
#include "energyspace/multop.hpp"
#include "energyspace/randwalk.hpp"

namespace energyspace {

using Json = nlohmann::ordered_json;

/// A real value prints as a number, anything else as [re, im].
Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j, const std::string& field);

/// {"<id>": value, ...} over every vertex, in vertex order.
Json values_to_json(const Network& net, const Eigen::VectorXcd& values);
/// Inverse of values_to_json over a vertex subset (indexed by position).
Json subset_values_to_json(const Network& net, std::span<const Vertex> vertices, const Eigen::VectorXcd& values);

/// Reads {"<id>": value} into a full vector; missing vertices are zero and
/// unknown ids raise UnknownVertex.
Eigen::VectorXcd values_from_json(const Network& net, const Json& j, const std::string& field);

/// {"values": {...}}, grounded on read.
EnergyVector parse_energy_vector_json(const Network& net, const std::string& text);
Json energy_vector_to_json(const Network& net, const EnergyVector& u);

/// {"f": {...}}.
Multiplier parse_multiplier_json(const Network& net, const std::string& text);
Json multiplier_to_json(const Network& net, const Multiplier& m);

/// Specifiers shared by the CLI: delta:<v>, kernel:<v>, const:<c>, file:<path>.
/// For vectors the file holds {"values": ...}; for multipliers {"f": ...}.
Multiplier parse_multiplier_spec(const EnergySpace& space, const std::string& spec);
EnergyVector parse_vector_spec(const EnergySpace& space, const std::string& spec);

Json report_to_json(const Network& net, const Exhaustion& exhaustion, const MultiplierReport& report, bool trace);
Json walk_to_json(const Network& net, const WalkEstimate& est);

/// Matrix over an ordered vertex list; first row holds the vertex ids.
std::string gram_to_csv(const Network& net, std::span<const Vertex> vertices, const Eigen::MatrixXd& matrix);

}  // namespace energyspace
