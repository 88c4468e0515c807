#include "energyspace/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "energyspace/error.hpp"
#include "energyspace/network_io.hpp"

namespace energyspace {

namespace {

Json parse_document(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vertex vertex_arg(const Network& net, const std::string& text) { return net.index_of(parse_vertex_id(text)); }

double real_arg(const std::string& text, const std::string& field) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    fail(ErrorCode::ParseError, field + ": expected a number, got '" + text + "'");
  }
  return value;
}

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) fail(ErrorCode::ParseError, "specifier '" + spec + "' needs the form kind:argument");
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

Json real_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json complex_to_json(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return Json::array({z.real(), z.imag()});
}

Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(ErrorCode::ParseError, field + ": expected a number or [re, im]");
}

Json values_to_json(const Network& net, const Eigen::VectorXcd& values) {
  Json out = Json::object();
  for (Vertex x = 0; x < net.size(); ++x) out[net.id(x).label()] = complex_to_json(values[static_cast<Eigen::Index>(x)]);
  return out;
}

Json subset_values_to_json(const Network& net, std::span<const Vertex> vertices, const Eigen::VectorXcd& values) {
  Json out = Json::object();
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    out[net.id(vertices[i]).label()] = complex_to_json(values[static_cast<Eigen::Index>(i)]);
  }
  return out;
}

Eigen::VectorXcd values_from_json(const Network& net, const Json& j, const std::string& field) {
  if (!j.is_object()) fail(ErrorCode::ParseError, field + ": expected an object keyed by vertex id");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(net.size()));
  for (const auto& [key, value] : j.items()) {
    const Vertex x = net.index_of(parse_vertex_id(key));
    out[static_cast<Eigen::Index>(x)] = complex_from_json(value, field + "." + key);
  }
  return out;
}

EnergyVector parse_energy_vector_json(const Network& net, const std::string& text) {
  const Json doc = parse_document(text, "energy vector");
  if (!doc.is_object() || !doc.contains("values")) fail(ErrorCode::ParseError, "energy vector: missing \"values\"");
  return EnergyVector::ground(net, values_from_json(net, doc["values"], "values"));
}

Json energy_vector_to_json(const Network& net, const EnergyVector& u) {
  return Json{{"values", values_to_json(net, u.values())}};
}

Multiplier parse_multiplier_json(const Network& net, const std::string& text) {
  const Json doc = parse_document(text, "multiplier");
  if (!doc.is_object() || !doc.contains("f")) fail(ErrorCode::ParseError, "multiplier: missing \"f\"");
  return {net, VertexFunction(net, values_from_json(net, doc["f"], "f"))};
}

Json multiplier_to_json(const Network& net, const Multiplier& m) {
  return Json{{"f", values_to_json(net, m.f().values())}};
}

Multiplier parse_multiplier_spec(const EnergySpace& space, const std::string& spec) {
  const Network& net = space.network();
  const auto [kind, arg] = split_spec(spec);
  if (kind == "delta") return Multiplier::delta(net, vertex_arg(net, arg));
  if (kind == "kernel") return Multiplier::kernel(space, vertex_arg(net, arg));
  if (kind == "const") return Multiplier::constant(net, real_arg(arg, "const"));
  if (kind == "file") return parse_multiplier_json(net, read_text(arg));
  fail(ErrorCode::ParseError, "unknown multiplier kind '" + kind + "' (delta, kernel, const, file)");
}

EnergyVector parse_vector_spec(const EnergySpace& space, const std::string& spec) {
  const Network& net = space.network();
  const auto [kind, arg] = split_spec(spec);
  if (kind == "delta") return EnergyVector::ground(net, VertexFunction::delta(net, vertex_arg(net, arg)));
  if (kind == "kernel") return space.kernel(vertex_arg(net, arg));
  if (kind == "const") return EnergyVector::ground(net, VertexFunction::constant(net, real_arg(arg, "const")));
  if (kind == "file") return parse_energy_vector_json(net, read_text(arg));
  fail(ErrorCode::ParseError, "unknown vector kind '" + kind + "' (delta, kernel, const, file)");
}

Json report_to_json(const Network& net, const Exhaustion& exhaustion, const MultiplierReport& report, bool trace) {
  Json out = Json::object();
  Json lower = Json::array();
  for (const auto& e : report.lower_trace) lower.push_back(Json::array({e.size, e.rho}));
  out["lower_trace"] = std::move(lower);
  if (trace) {
    Json detail = Json::array();
    for (const auto& e : report.lower_trace) {
      detail.push_back(Json{{"size", e.size}, {"rho", e.rho}, {"rho_literal", e.rho_literal}});
    }
    out["trace"] = std::move(detail);
  }
  out["best_lower"] = report.best_lower;
  out["upper"] = real_or_null(report.upper);
  out["bisection_bound"] = report.bisection_bound ? Json(*report.bisection_bound) : Json(nullptr);
  Json certs = Json::array();
  for (const auto& c : report.certs) {
    Json cert{{"b", c.b}, {"psd", c.psd}, {"lambda_min", c.lambda_min}};
    if (c.failing_size) {
      cert["failing_size"] = *c.failing_size;
      const auto it = std::find_if(exhaustion.begin(), exhaustion.end(),
                                   [&](const auto& f) { return f.size() == *c.failing_size; });
      if (it != exhaustion.end()) cert["witness"] = subset_values_to_json(net, *it, c.witness);
    }
    certs.push_back(std::move(cert));
  }
  out["certs"] = std::move(certs);
  out["verdict"] = std::string(to_string(report.verdict));
  out["inconsistent"] = report.inconsistent;
  return out;
}

Json walk_to_json(const Network& net, const WalkEstimate& est) {
  return Json{{"x", net.id(est.x).label()},
              {"exact", est.exact},
              {"mc_estimate", est.mc_estimate},
              {"mc_stderr", est.mc_stderr},
              {"samples", est.samples},
              {"seed", est.seed},
              {"cap_hits", est.cap_hits},
              {"step_cap", est.step_cap},
              {"z_score", real_or_null(est.z_score())}};
}

std::string gram_to_csv(const Network& net, std::span<const Vertex> vertices, const Eigen::MatrixXd& matrix) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t i = 0; i < vertices.size(); ++i) out << (i ? "," : "") << net.id(vertices[i]).label();
  out << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << (j ? "," : "") << matrix(i, j);
    out << '\n';
  }
  return out.str();
}

}  // namespace energyspace
