#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "energyspace/network.hpp"

namespace energyspace {

// Canonical JSON: {"origin": <id>, "edges": [[<id>, <id>, <float>], ...]}.
// Ids are JSON strings or integers. CSV alternative: header "x,y,c" and the
// origin supplied by the caller.

Network parse_network_json(const std::string& text);
std::string network_to_json(const Network& net);

Network parse_network_csv(const std::string& text, const VertexId& origin);
std::string network_to_csv(const Network& net);

/// Dispatches on extension: ".csv" needs an origin, anything else is JSON.
Network load_network(const std::filesystem::path& path, const std::optional<VertexId>& origin = std::nullopt);
void save_network(const Network& net, const std::filesystem::path& path);

/// Parses a vertex label the way the CLI does: decimal integers become
/// integer ids, everything else a string id.
VertexId parse_vertex_id(const std::string& text);

}  // namespace energyspace
