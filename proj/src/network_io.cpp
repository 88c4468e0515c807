#include "energyspace/network_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "energyspace/error.hpp"

namespace energyspace {

namespace {

using nlohmann::ordered_json;

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

VertexId id_from_json(const ordered_json& j, const std::string& field) {
  if (j.is_number_integer()) return VertexId(j.get<std::int64_t>());
  if (j.is_string()) return VertexId(j.get<std::string>());
  fail(ErrorCode::ParseError, field + ": vertex id must be a string or an integer");
}

ordered_json id_to_json(const VertexId& id) {
  if (id.is_integer()) return std::stoll(id.label());
  return id.label();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

VertexId parse_vertex_id(const std::string& text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) return VertexId(value);
  return VertexId(text);
}

Network parse_network_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, "line " + std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::ParseError, "top level must be an object");
  if (!doc.contains("origin")) fail(ErrorCode::ParseError, "missing \"origin\" key");
  if (!doc.contains("edges")) fail(ErrorCode::ParseError, "missing \"edges\" key");
  const auto& edges = doc["edges"];
  if (!edges.is_array()) fail(ErrorCode::ParseError, "\"edges\" must be an array");

  std::vector<EdgeSpec> specs;
  specs.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string field = "edges[" + std::to_string(i) + "]";
    const auto& e = edges[i];
    if (!e.is_array() || e.size() != 3) fail(ErrorCode::ParseError, field + ": expected [x, y, c]");
    if (!e[2].is_number()) fail(ErrorCode::ParseError, field + "[2]: conductance must be a number");
    specs.push_back({id_from_json(e[0], field + "[0]"), id_from_json(e[1], field + "[1]"), e[2].get<double>()});
  }
  return build_network(specs, id_from_json(doc["origin"], "origin"));
}

std::string network_to_json(const Network& net) {
  ordered_json doc;
  doc["origin"] = id_to_json(net.id(net.origin()));
  auto edges = ordered_json::array();
  for (const auto& e : net.edges()) {
    edges.push_back(ordered_json::array({id_to_json(net.id(e.a)), id_to_json(net.id(e.b)), e.conductance}));
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

Network parse_network_csv(const std::string& text, const VertexId& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::vector<EdgeSpec> specs;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(trim(cell));
    if (!header_seen) {
      if (cells != std::vector<std::string>{"x", "y", "c"}) {
        fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected header x,y,c");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 3) fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 3 fields");
    double c = 0.0;
    auto [ptr, ec] = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), c);
    if (ec != std::errc{} || ptr != cells[2].data() + cells[2].size()) {
      fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ", field c: not a number '" + cells[2] + "'");
    }
    specs.push_back({parse_vertex_id(cells[0]), parse_vertex_id(cells[1]), c});
  }
  if (!header_seen) fail(ErrorCode::ParseError, "empty CSV input");
  return build_network(specs, origin);
}

std::string network_to_csv(const Network& net) {
  std::ostringstream out;
  out.precision(17);
  out << "x,y,c\n";
  for (const auto& e : net.edges()) out << net.id(e.a).label() << ',' << net.id(e.b).label() << ',' << e.conductance << '\n';
  return out.str();
}

Network load_network(const std::filesystem::path& path, const std::optional<VertexId>& origin) {
  const auto text = read_file(path);
  if (path.extension() == ".csv") {
    if (!origin) fail(ErrorCode::ParseError, path.string() + ": CSV networks need an explicit origin");
    return parse_network_csv(text, *origin);
  }
  try {
    return parse_network_json(text);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) fail(ErrorCode::ParseError, path.string() + ": " + e.what());
    throw;
  }
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::ParseError, "cannot write " + path.string());
  out << (path.extension() == ".csv" ? network_to_csv(net) : network_to_json(net));
}

}  // namespace energyspace
