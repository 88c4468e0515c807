#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "energyspace/error.hpp"
#include "energyspace/network_io.hpp"
#include "energyspace/report_io.hpp"

namespace energyspace::cli {

namespace {

enum class Format { Json, Csv, Pretty };

struct Common {
  std::string net;
  std::string origin;
  std::string gen;
  std::string weights = "unit";
  Format format = Format::Json;
  std::optional<double> tol;
};

struct Output {
  Json doc;
  std::string csv;
  bool pass = true;
};

// ---------------------------------------------------------------------------
// Pretty printing

std::string pretty_number(double x) {
  std::ostringstream s;
  s << std::setprecision(6) << x;
  return s.str();
}

std::string pretty_scalar(const Json& j) {
  if (j.is_number_float()) return pretty_number(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  return j.dump();
}

bool is_flat(const Json& j) {
  return std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
}

void pretty(const Json& j, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_primitive() || (value.is_array() && is_flat(value))) {
        out << pad << key << ": ";
        pretty(value, out, 0);
        out << '\n';
      } else {
        out << pad << key << ":\n";
        pretty(value, out, indent + 2);
      }
    }
  } else if (j.is_array()) {
    if (is_flat(j)) {
      out << '[';
      for (std::size_t i = 0; i < j.size(); ++i) out << (i ? ", " : "") << pretty_scalar(j[i]);
      out << ']';
    } else {
      for (const auto& e : j) {
        if (e.is_array() && is_flat(e)) {
          out << pad;
          pretty(e, out, 0);
          out << '\n';
        } else {
          out << pad << "-\n";
          pretty(e, out, indent + 2);
        }
      }
    }
  } else {
    out << pretty_scalar(j);
  }
}

// ---------------------------------------------------------------------------
// Argument helpers

void add_common(CLI::App* cmd, Common& c) {
  auto* net = cmd->add_option("--net", c.net, "network file (.json, or .csv with --origin)");
  auto* gen = cmd->add_option("--gen", c.gen, "generator: path:n, cycle:n, integer_segment:n, binary_tree:d, random:n[:p[:seed]]");
  net->excludes(gen);
  gen->excludes(net);
  cmd->add_option("--origin", c.origin, "origin id for CSV networks");
  cmd->add_option("--weights", c.weights, "conductances for --gen: unit, const:c, uniform:lo:hi[:seed]");
  cmd->add_option("--format", c.format, "json, csv or pretty")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Format>{{"json", Format::Json}, {"csv", Format::Csv}, {"pretty", Format::Pretty}}));
  cmd->add_option("--tol", c.tol, "tolerance override")->check(CLI::PositiveNumber);
}

Network load(const Common& c) {
  if (c.net.empty() && c.gen.empty()) fail(ErrorCode::InvalidArgument, "one of --net or --gen is required");
  if (!c.gen.empty()) return generate(GeneratorSpec::parse(c.gen), ConductanceProfile::parse(c.weights));
  std::optional<VertexId> origin;
  if (!c.origin.empty()) origin = parse_vertex_id(c.origin);
  return load_network(c.net, origin);
}

Vertex vertex_of(const Network& net, const std::string& text) {
  if (text == "o") return net.origin();
  return net.index_of(parse_vertex_id(text));
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  if (text == "all") return sizes;
  for (const auto& part : split_commas(text)) {
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), k);
    if (ec != std::errc{} || ptr != part.data() + part.size()) {
      fail(ErrorCode::ParseError, "--exhaust: '" + part + "' is not a size");
    }
    sizes.push_back(k);
  }
  if (sizes.empty()) fail(ErrorCode::ParseError, "--exhaust: empty list");
  return sizes;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json ids_to_json(const Network& net, std::span<const Vertex> vertices) {
  Json ids = Json::array();
  for (Vertex x : vertices) ids.push_back(net.id(x).label());
  return ids;
}

std::string verdict_word(bool pass) { return pass ? "pass" : "fail"; }

// ---------------------------------------------------------------------------
// Commands

struct KernelArgs {
  std::string vertex;
};

Output cmd_kernel(const Network& net, const Common& c, const KernelArgs& a) {
  const EnergySpace space(net);
  const Vertex x = vertex_of(net, a.vertex);
  const auto& v = space.kernel(x);
  const double tol = c.tol.value_or(1e-9);
  Output o;
  o.doc = {{"command", "kernel"}, {"vertex", net.id(x).label()}, {"is_origin", x == net.origin()}};
  o.doc["values"] = values_to_json(net, v.values());
  if (x == net.origin()) {
    o.doc["notice"] = "the kernel at the origin is the zero vector";
    o.doc["resistance"] = 0.0;
    o.doc["energy"] = 0.0;
    o.doc["sup_norm"] = 0.0;
  } else {
    const auto r = space.resistance(x);
    const double sup = sup_norm(v);
    o.pass = sup <= r.potential + tol;
    o.doc["resistance"] = r.potential;
    o.doc["energy"] = r.energy;
    o.doc["sup_norm"] = sup;
  }
  o.doc["bound_check"] = {{"sup_norm_le_resistance", o.pass}, {"tolerance", tol}};
  o.doc["verdict"] = verdict_word(o.pass);

  std::ostringstream csv;
  csv.precision(17);
  csv << "vertex,value\n";
  for (Vertex z = 0; z < net.size(); ++z) csv << net.id(z).label() << ',' << v[z].real() << '\n';
  o.csv = csv.str();
  return o;
}

struct GramArgs {
  std::string vertices;
  std::size_t first = 0;
  bool sqrt = false;
};

Output cmd_gram(const Network& net, const Common& c, const GramArgs& a) {
  const EnergySpace space(net);
  std::vector<Vertex> f;
  if (!a.vertices.empty()) {
    for (const auto& part : split_commas(a.vertices)) f.push_back(vertex_of(net, part));
  } else {
    f = net.interior();
    if (a.first > 0) {
      if (a.first > f.size()) fail(ErrorCode::InvalidSize, "--first exceeds |X| = " + std::to_string(f.size()));
      f.resize(a.first);
    }
  }
  const auto gram = space.gram(f);
  Output o;
  o.doc = {{"command", "gram"}, {"vertices", ids_to_json(net, f)}, {"matrix", matrix_to_json(gram.matrix().matrix())}};
  o.doc["reproducing_defect"] = gram.reproducing_defect();
  o.csv = gram_to_csv(net, f, gram.matrix().matrix());
  if (a.sqrt) {
    const Eigen::MatrixXd& b = gram.sqrt().matrix();
    const double residual = (b * b - gram.matrix().matrix()).norm();
    const double tol = c.tol.value_or(1e-8);
    o.pass = residual <= tol * std::max(1.0, gram.matrix().matrix().norm());
    o.doc["sqrt"] = {{"matrix", matrix_to_json(b)}, {"residual", residual}, {"pass", o.pass}};
    o.csv += "\n" + gram_to_csv(net, f, b);
  }
  o.doc["verdict"] = verdict_word(o.pass);
  return o;
}

struct MultArgs {
  std::string f;
  std::vector<double> bounds;
  bool estimate = false;
  bool certify = false;
  bool trace = false;
  std::string exhaust = "all";
};

Output cmd_mult(const Network& net, const Common& c, const MultArgs& a) {
  const EnergySpace space(net);
  const Multiplier m = parse_multiplier_spec(space, a.f);
  const auto sizes = parse_sizes(a.exhaust);
  const Exhaustion exhaustion = prefix_exhaustion(net, sizes);

  AnalyzeOptions options;
  options.bounds = a.bounds;
  options.estimate = a.estimate;
  options.tol = c.tol;
  // --certify asks for a certificate at the sufficiency bound.
  if (a.certify) options.bounds.push_back(sufficiency_bound(space, m));
  const auto report = analyze(space, m, exhaustion, options);

  Output o;
  o.doc = {{"command", "mult"}, {"f", a.f}};
  Json sizes_json = Json::array();
  for (const auto& f : exhaustion) sizes_json.push_back(f.size());
  o.doc["exhaustion"] = std::move(sizes_json);
  const Json body = report_to_json(net, exhaustion, report, a.trace);
  for (const auto& [key, value] : body.items()) o.doc[key] = value;
  o.pass = report.verdict != Verdict::Fail && !report.inconsistent;

  std::ostringstream csv;
  csv.precision(17);
  csv << "size,rho,rho_literal\n";
  for (const auto& e : report.lower_trace) csv << e.size << ',' << e.rho << ',' << e.rho_literal << '\n';
  o.csv = csv.str();
  return o;
}

struct WalkArgs {
  std::string vertex;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 0;
};

Output cmd_walk(const Network& net, const Common& c, const WalkArgs& a) {
  const EnergySpace space(net);
  const Vertex x = vertex_of(net, a.vertex);
  const auto est = escape_prob_mc(net, x, a.samples, a.seed);
  const double cond = net.total_conductance(x);
  const double r = space.resistance(x).potential;
  const double product = cond * r * est.exact;
  const double tol = c.tol.value_or(1e-9);
  const bool identity = std::abs(product - 1.0) <= tol;
  const double z = est.z_score();
  const std::string flag = z <= 3.0 ? "ok" : z <= 4.0 ? "3-4 sigma" : "beyond 4 sigma";

  Output o;
  o.pass = identity && z <= 4.0 && est.cap_hits == 0;
  o.doc = {{"command", "walk"}};
  const Json body = walk_to_json(net, est);
  for (const auto& [key, value] : body.items()) o.doc[key] = value;
  o.doc["identity"] = {{"conductance", cond},
                       {"resistance", r},
                       {"product", product},
                       {"residual", std::abs(product - 1.0)},
                       {"tolerance", tol},
                       {"pass", identity}};
  o.doc["mc_flag"] = flag;
  o.doc["verdict"] = verdict_word(o.pass);

  std::ostringstream csv;
  csv.precision(17);
  csv << "x,exact,mc_estimate,mc_stderr,samples,seed,cap_hits,identity_product\n"
      << net.id(x).label() << ',' << est.exact << ',' << est.mc_estimate << ',' << est.mc_stderr << ',' << est.samples
      << ',' << est.seed << ',' << est.cap_hits << ',' << product << '\n';
  o.csv = csv.str();
  return o;
}

struct BanachArgs {
  std::string u;
  std::string v;
};

Json norms_json(const EnergyVector& u) {
  return {{"sup_norm", sup_norm(u)}, {"energy_norm", u.norm()}, {"banach_norm", banach_norm(u)}};
}

Output cmd_banach(const Network& net, const Common&, const BanachArgs& a) {
  const EnergySpace space(net);
  const auto u = parse_vector_spec(space, a.u);
  Output o;
  o.doc = {{"command", "banach"}, {"u", norms_json(u)}};
  std::ostringstream csv;
  csv.precision(17);
  csv << "quantity,value\n"
      << "u.sup_norm," << sup_norm(u) << "\nu.energy_norm," << u.norm() << "\nu.banach_norm," << banach_norm(u) << '\n';
  if (!a.v.empty()) {
    const auto v = parse_vector_spec(space, a.v);
    const auto est = pointwise_product(net, u, v);
    o.pass = est.holds();
    o.doc["v"] = norms_json(v);
    o.doc["product"] = {{"norms", norms_json(est.product)},
                        {"lhs", est.lhs},
                        {"rhs", est.rhs},
                        {"slack", est.slack()},
                        {"holds", est.holds()}};
    csv << "v.sup_norm," << sup_norm(v) << "\nv.energy_norm," << v.norm() << "\nv.banach_norm," << banach_norm(v)
        << "\nproduct.lhs," << est.lhs << "\nproduct.rhs," << est.rhs << "\nproduct.slack," << est.slack() << '\n';
  }
  o.doc["verdict"] = verdict_word(o.pass);
  o.csv = csv.str();
  return o;
}

struct GenerateArgs {
  std::string out;
};

int cmd_generate(const Network& net, const Common& c, const GenerateArgs& a, std::ostream& out) {
  if (!a.out.empty()) {
    save_network(net, a.out);
    return kPass;
  }
  out << (c.format == Format::Csv ? network_to_csv(net) : network_to_json(net) + "\n");
  return kPass;
}

void emit(const Output& o, Format format, std::ostream& out) {
  switch (format) {
    case Format::Json: out << o.doc.dump(2) << '\n'; break;
    case Format::Csv: out << o.csv; break;
    case Format::Pretty: pretty(o.doc, out, 0); break;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Potential theory and multiplication operators on resistance networks", "energy-space"};
  app.require_subcommand(1);
  Common common;

  KernelArgs kernel_args;
  auto* kernel = app.add_subcommand("kernel", "energy kernel v_x, resistance R(x) and the bound sup|v_x| <= R(x)");
  add_common(kernel, common);
  kernel->add_option("--vertex", kernel_args.vertex, "vertex id, or o for the origin")->required();

  GramArgs gram_args;
  auto* gram = app.add_subcommand("gram", "Gram matrix of the energy kernel over F");
  add_common(gram, common);
  auto* gv = gram->add_option("--vertices", gram_args.vertices, "comma-separated F (default: all of X)");
  gram->add_option("--first", gram_args.first, "F = first k vertices of X")->excludes(gv);
  gram->add_flag("--sqrt", gram_args.sqrt, "also print the positive square root and its residual");

  MultArgs mult_args;
  auto* mult = app.add_subcommand("mult", "norm bounds and psd certificates for a multiplication operator");
  add_common(mult, common);
  mult->add_option("--f", mult_args.f, "delta:<v>, kernel:<v>, const:<c> or file:<path>")->required();
  mult->add_option("--bound", mult_args.bounds, "certify ||M_f|| <= b (repeatable)")->check(CLI::NonNegativeNumber);
  mult->add_flag("--estimate", mult_args.estimate, "bisect on b between the best lower and the upper bound");
  mult->add_flag("--certify", mult_args.certify, "certify at the sufficiency bound");
  mult->add_flag("--trace", mult_args.trace, "report the literal transfer-operator norm per F");
  mult->add_option("--exhaust", mult_args.exhaust, "prefix sizes 2,4,8,... or all");

  WalkArgs walk_args;
  auto* walk = app.add_subcommand("walk", "escape probability, exact and by Monte Carlo");
  add_common(walk, common);
  walk->add_option("--vertex", walk_args.vertex, "start vertex")->required();
  walk->add_option("--samples", walk_args.samples, "number of excursions")->check(CLI::PositiveNumber);
  walk->add_option("--seed", walk_args.seed, "random seed");

  BanachArgs banach_args;
  auto* banach = app.add_subcommand("banach", "sup, energy and algebra norms; product estimate for a pair");
  add_common(banach, common);
  banach->add_option("--u", banach_args.u, "delta:<v>, kernel:<v>, const:<c> or file:<path>")->required();
  banach->add_option("--v", banach_args.v, "second factor for the product estimate");

  GenerateArgs generate_args;
  auto* gen = app.add_subcommand("generate", "write a generated network as JSON or CSV");
  add_common(gen, common);
  gen->add_option("--out", generate_args.out, "output file; extension selects the format");

  std::vector<const char*> argv{"energy-space"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kError;
  }

  try {
    const Network net = load(common);
    Output o;
    if (*kernel) {
      o = cmd_kernel(net, common, kernel_args);
    } else if (*gram) {
      o = cmd_gram(net, common, gram_args);
    } else if (*mult) {
      o = cmd_mult(net, common, mult_args);
    } else if (*walk) {
      o = cmd_walk(net, common, walk_args);
    } else if (*banach) {
      o = cmd_banach(net, common, banach_args);
    } else {
      return cmd_generate(net, common, generate_args, out);
    }
    emit(o, common.format, out);
    return o.pass ? kPass : kFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace energyspace::cli
