#include "sepnet/json_io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sepnet {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument("json: " + where + ": " + what);
}

Vec get_vec(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_array()) fail(where, "missing array field '" + key + "'");
  Vec v;
  for (const auto& x : j[key]) {
    if (!x.is_number()) fail(where, "'" + key + "' must contain numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

std::size_t get_size(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_number_unsigned())
    fail(where, "missing non-negative integer field '" + key + "'");
  return j[key].get<std::size_t>();
}

}  // namespace

Pmf load_pmf(const Json& j) {
  if (j.is_array()) {
    Vec v;
    for (const auto& x : j) v.push_back(x.get<double>());
    return Pmf(v);
  }
  return Pmf(get_vec(j, "probs", "pmf"));
}

Json dump_pmf(const Pmf& p) {
  return Json{{"dims", std::vector<std::size_t>{p.size()}}, {"probs", p.p}};
}

JointPmf load_joint_pmf(const Json& j) {
  if (!j.contains("dims")) fail("joint_pmf", "missing 'dims'");
  std::vector<std::size_t> dims;
  for (const auto& d : j["dims"]) dims.push_back(d.get<std::size_t>());
  return JointPmf(dims, get_vec(j, "probs", "joint_pmf"));
}

Json dump_joint_pmf(const JointPmf& j) { return Json{{"dims", j.dims}, {"probs", j.p}}; }

Dmc load_dmc(const Json& j) {
  if (j.contains("bsc")) return Dmc::bsc(j["bsc"].get<double>());
  if (j.contains("identity")) return Dmc::identity(j["identity"].get<std::size_t>());
  if (j.contains("dims")) {
    if (j["dims"].size() != 2) fail("dmc", "'dims' must be [in, out]");
    return Dmc(j["dims"][0].get<std::size_t>(), j["dims"][1].get<std::size_t>(),
               get_vec(j, "probs", "dmc"));
  }
  std::size_t in = get_size(j, "in", "dmc"), out = get_size(j, "out", "dmc");
  return Dmc(in, out, get_vec(j, "rows", "dmc"));
}

Json dump_dmc(const Dmc& ch) {
  return Json{{"dims", std::vector<std::size_t>{ch.in_size, ch.out_size}}, {"probs", ch.t}};
}

FiniteAbelianGroup load_group(const Json& j) {
  std::size_t q = get_size(j, "order", "group");
  if (j.value("cyclic", false) || !j.contains("table"))
    return FiniteAbelianGroup::make_cyclic(q);
  std::vector<std::uint32_t> tab;
  for (const auto& x : j["table"]) tab.push_back(x.get<std::uint32_t>());
  return FiniteAbelianGroup::from_table(std::move(tab), q);
}

Json dump_group(const FiniteAbelianGroup& g) {
  Json j{{"order", g.order}, {"cyclic", g.cyclic}};
  if (!g.cyclic) j["table"] = g.table;
  return j;
}

DistortionMeasure load_distortion(const Json& j) {
  if (j.contains("hamming")) return DistortionMeasure::hamming(j["hamming"].get<std::size_t>());
  if (j.contains("difference")) {
    const auto& d = j["difference"];
    return DistortionMeasure::difference(load_group(d["group"]),
                                         get_vec(d, "profile", "distortion.difference"));
  }
  std::size_t ns = get_size(j, "ns", "distortion"), nr = get_size(j, "nr", "distortion");
  return DistortionMeasure(ns, nr, get_vec(j, "matrix", "distortion"));
}

Json dump_distortion(const DistortionMeasure& d) {
  Json j{{"ns", d.ns}, {"nr", d.nr}, {"matrix", d.m}};
  if (d.is_difference && d.group)
    j["difference"] = Json{{"group", dump_group(*d.group)}, {"profile", d.dvec}};
  return j;
}

AdditiveStructure load_additive_structure(const Json& j) {
  std::string kind = j.value("kind", "group");
  if (kind == "quadratic_line")
    return AdditiveStructure::quadratic_line_grid(get_size(j, "q", "structure"),
                                                  j["range"].get<double>());
  if (kind == "quadratic_cyclic")
    return AdditiveStructure::quadratic_cyclic_grid(get_size(j, "q", "structure"),
                                                    j["range"].get<double>());
  if (kind == "group")
    return AdditiveStructure::from_group(load_group(j["group"]),
                                         get_vec(j, "cost", "structure"));
  fail("structure", "unknown kind '" + kind + "'");
}

Json dump_additive_structure(const AdditiveStructure& s) {
  Json j;
  j["q"] = s.q;
  j["cost"] = s.cost;
  if (s.kind == AdditiveStructure::Kind::Group) {
    j["kind"] = "group";
    j["group"] = dump_group(s.group);
  } else {
    j["kind"] = "line";
  }
  return j;
}

NetworkSpec load_network_spec(const Json& j) {
  NetworkSpec spec;
  std::string mode = j.value("mode", "dnjscc");
  if (mode == "dnjscc") spec.mode = NetworkMode::Dnjscc;
  else if (mode == "jscmud") spec.mode = NetworkMode::Jscmud;
  else if (mode == "jscmmd") spec.mode = NetworkMode::Jscmmd;
  else fail("network", "unknown mode '" + mode + "'");
  spec.node_count = get_size(j, "nodes", "network");
  for (const auto& e : j.at("edges")) {
    NetworkEdge edge;
    edge.from = get_size(e, "from", "network.edge");
    edge.to = get_size(e, "to", "network.edge");
    edge.channel = load_dmc(e.contains("dmc") ? e["dmc"] : e.at("channel"));
    spec.edges.push_back(std::move(edge));
  }
  for (const auto& s : j.at("sources")) {
    NetworkSource src;
    src.id = get_size(s, "id", "network.source");
    for (const auto& n : s.at("placement")) src.placement.insert(n.get<std::size_t>());
    spec.sources.push_back(std::move(src));
  }
  for (auto it = j.at("demands").begin(); it != j.at("demands").end(); ++it) {
    std::size_t node = std::stoul(it.key());
    for (const auto& s : it.value()) spec.demands[node].insert(s.get<std::size_t>());
  }
  spec.joint_source_law = load_joint_pmf(j.at("joint_source_law"));
  for (const auto& d : j.at("distortion_measures"))
    spec.distortion_measures.push_back(load_distortion(d));
  spec.kappa = j.value("kappa", 1.0);
  return spec;
}

Json dump_network_spec(const NetworkSpec& spec) {
  Json j;
  j["mode"] = spec.mode == NetworkMode::Dnjscc  ? "dnjscc"
              : spec.mode == NetworkMode::Jscmud ? "jscmud"
                                                 : "jscmmd";
  j["nodes"] = spec.node_count;
  j["edges"] = Json::array();
  for (const auto& e : spec.edges)
    j["edges"].push_back(Json{{"from", e.from}, {"to", e.to}, {"dmc", dump_dmc(e.channel)}});
  j["sources"] = Json::array();
  for (const auto& s : spec.sources)
    j["sources"].push_back(Json{{"id", s.id}, {"placement", s.placement}});
  j["demands"] = Json::object();
  for (const auto& [node, srcs] : spec.demands) j["demands"][std::to_string(node)] = srcs;
  j["joint_source_law"] = dump_joint_pmf(spec.joint_source_law);
  j["distortion_measures"] = Json::array();
  for (const auto& d : spec.distortion_measures)
    j["distortion_measures"].push_back(dump_distortion(d));
  j["kappa"] = spec.kappa;
  return j;
}

CapacityPolytope load_polytope(const Json& j) {
  CapacityPolytope p;
  p.dim = get_size(j, "dim", "polytope");
  for (const auto& row : j.at("A")) {
    Vec r;
    for (const auto& x : row) r.push_back(x.get<double>());
    p.A.push_back(std::move(r));
  }
  p.b = get_vec(j, "b", "polytope");
  p.validate();
  return p;
}

Json dump_polytope(const CapacityPolytope& p) {
  return Json{{"dim", p.dim}, {"A", p.A}, {"b", p.b}};
}

DistortionMatrix load_distortion_matrix(const Json& j) {
  DistortionMatrix m(get_size(j, "sources", "distortion_matrix"),
                     get_size(j, "nodes", "distortion_matrix"));
  m.d = get_vec(j, "d", "distortion_matrix");
  if (m.d.size() != m.source_count * m.node_count)
    fail("distortion_matrix", "'d' length must equal sources * nodes");
  return m;
}

Json dump_distortion_matrix(const DistortionMatrix& m) {
  return Json{{"sources", m.source_count}, {"nodes", m.node_count}, {"d", m.d}};
}

GenieRateMatrix load_genie_rate_matrix(const Json& j) {
  GenieRateMatrix m(get_size(j, "sources", "rate_matrix"), get_size(j, "nodes", "rate_matrix"));
  const auto& e = j.at("entries");
  if (e.size() != m.r.size()) fail("rate_matrix", "'entries' length mismatch");
  for (std::size_t i = 0; i < m.r.size(); ++i)
    m.r[i] = e[i].is_string() ? kGenieUndefined : e[i].get<double>();
  return m;
}

Json dump_genie_rate_matrix(const GenieRateMatrix& m) {
  Json entries = Json::array();
  for (double v : m.r) {
    if (v == kGenieUndefined) entries.push_back("diamond");
    else entries.push_back(v);
  }
  return Json{{"sources", m.source_count}, {"nodes", m.node_count}, {"entries", entries}};
}

BaseJointCode load_base_code(const Json& j) {
  BaseJointCode b;
  b.m = j.value("m", std::size_t(1));
  b.n = j.value("n", std::size_t(1));
  for (const auto& enc : j.at("encoders")) {
    std::vector<std::vector<std::uint32_t>> sessions;
    for (const auto& tab : enc) {
      std::vector<std::uint32_t> t;
      for (const auto& x : tab) t.push_back(x.get<std::uint32_t>());
      sessions.push_back(std::move(t));
    }
    b.encoders.push_back(std::move(sessions));
  }
  for (const auto& dec : j.at("decoders")) {
    std::vector<std::uint32_t> t;
    for (const auto& x : dec.at("table")) t.push_back(x.get<std::uint32_t>());
    b.decoders[{get_size(dec, "source", "base_code.decoder"),
                get_size(dec, "node", "base_code.decoder")}] = std::move(t);
  }
  return b;
}

Json dump_base_code(const BaseJointCode& b) {
  Json j{{"m", b.m}, {"n", b.n}, {"encoders", b.encoders}};
  j["decoders"] = Json::array();
  for (const auto& [key, table] : b.decoders)
    j["decoders"].push_back(
        Json{{"source", key.first}, {"node", key.second}, {"table", table}});
  return j;
}

SolverConfig load_solver_config(const Json& j) {
  SolverConfig cfg;
  cfg.tolerance = j.value("tolerance", cfg.tolerance);
  cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
  if (j.contains("lagrange_grid")) cfg.lagrange_grid = get_vec(j, "lagrange_grid", "config");
  cfg.multistart_count = j.value("multistart_count", cfg.multistart_count);
  return cfg;
}

Json dump_solver_result(const SolverResult& r) {
  Json j{{"value", r.value},
         {"lower_bound", r.lower_bound},
         {"upper_bound", r.upper_bound},
         {"iterations", r.iterations},
         {"converged", r.converged},
         {"argument", r.argument.p}};
  if (r.test_channel) j["test_channel"] = dump_dmc(*r.test_channel);
  return j;
}

Json dump_order_vector(const OrderVector& o) {
  Json j = Json::object();
  for (const auto& [src, slots] : o.orders) j[std::to_string(src)] = slots;
  return j;
}

Json dump_aux_chain(const AuxChain& c) {
  Json j{{"group", dump_group(c.group)}, {"expected_distortions", c.expected_distortions}};
  j["v_laws"] = Json::array();
  for (const auto& v : c.v_laws) j["v_laws"].push_back(v.p);
  j["u_laws"] = Json::array();
  for (const auto& u : c.u_laws) j["u_laws"].push_back(u.p);
  return j;
}

Json dump_sim_report(const SimReport& r) {
  Json j{{"trials", r.trials},
         {"e1", r.e1},
         {"e2", r.e2},
         {"e3", r.e3},
         {"e3_per_source", r.e3_per_source},
         {"distortions", r.distortions},
         {"mean_tv", r.mean_tv},
         {"error_rate", r.error_rate},
         {"seed", r.seed},
         {"stream", r.stream},
         {"n_prime", r.n_prime},
         {"delta", r.delta},
         {"rates", r.rates}};
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  Json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
}

std::string file_content_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace sepnet
