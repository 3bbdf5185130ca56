#include "sepnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace sepnet {

void NetworkSpec::validate() const {
  if (node_count == 0) throw std::invalid_argument("network: node_count must be positive");
  for (const auto& e : edges) {
    if (e.from < 1 || e.from > node_count || e.to < 1 || e.to > node_count)
      throw std::invalid_argument("network: edge endpoint out of range");
    e.channel.validate();
  }
  if (sources.empty()) throw std::invalid_argument("network: no sources");
  if (joint_source_law.rank() != sources.size())
    throw std::invalid_argument("network: joint law rank must equal source count");
  joint_source_law.validate();
  if (distortion_measures.size() != sources.size())
    throw std::invalid_argument("network: one distortion measure per source required");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (sources[i].id != i + 1)
      throw std::invalid_argument("network: source ids must be 1..M in order");
    if (distortion_measures[i].ns != joint_source_law.dims[i])
      throw std::invalid_argument("network: distortion measure alphabet mismatch");
    for (std::size_t node : sources[i].placement)
      if (node < 1 || node > node_count)
        throw std::invalid_argument("network: placement node out of range");
  }
  if (kappa <= 0) throw std::invalid_argument("network: kappa must be positive");
  for (const auto& [node, srcs] : demands) {
    if (node < 1 || node > node_count)
      throw std::invalid_argument("network: demand node out of range");
    for (std::size_t s : srcs)
      if (s < 1 || s > sources.size())
        throw std::invalid_argument("network: demand references unknown source");
  }
  if (mode == NetworkMode::Jscmud) {
    // each source is reconstructed at a single destination
    std::set<std::size_t> seen;
    for (const auto& [node, srcs] : demands)
      for (std::size_t s : srcs)
        if (!seen.insert(s).second)
          throw std::invalid_argument("network: unicast demand sets must be disjoint");
  }
  if (mode != NetworkMode::Dnjscc) {
    // independent-source modes: the joint law must factorize
    Vec prod(joint_source_law.total(), 1.0);
    std::vector<Pmf> margs;
    for (std::size_t a = 0; a < joint_source_law.rank(); ++a)
      margs.push_back(joint_source_law.marginal(a));
    std::vector<std::size_t> idx(joint_source_law.rank(), 0);
    for (std::size_t flat = 0; flat < joint_source_law.total(); ++flat) {
      double v = 1.0;
      for (std::size_t a = 0; a < idx.size(); ++a) v *= margs[a][idx[a]];
      if (std::abs(v - joint_source_law.p[flat]) > 1e-12)
        throw std::invalid_argument("network: independent-source mode requires a product law");
      for (std::size_t a = idx.size(); a-- > 0;) {
        if (++idx[a] < joint_source_law.dims[a]) break;
        idx[a] = 0;
      }
    }
  }
}

Pmf NetworkSpec::source_marginal(std::size_t source_id) const {
  if (source_id < 1 || source_id > sources.size())
    throw std::invalid_argument("network: source id out of range");
  return joint_source_law.marginal(source_id - 1);
}

std::set<std::size_t> NetworkSpec::destinations_of(std::size_t source_id) const {
  std::set<std::size_t> q;
  for (const auto& [node, srcs] : demands)
    if (srcs.count(source_id)) q.insert(node);
  return q;
}

DistortionMatrix DistortionMatrix::with_defaults(
    const NetworkSpec& spec,
    const std::map<std::pair<std::size_t, std::size_t>, double>& demanded) {
  DistortionMatrix m(spec.sources.size(), spec.node_count);
  for (std::size_t i = 1; i <= spec.sources.size(); ++i) {
    const double dmax = spec.distortion_measures[i - 1].d_max(spec.source_marginal(i));
    for (std::size_t j = 1; j <= spec.node_count; ++j) m.at(i, j) = dmax;
    if (spec.sources[i - 1].placement.count(i)) m.at(i, i) = 0.0;
  }
  for (const auto& [key, val] : demanded) {
    if (val < 0) throw std::invalid_argument("distortion matrix: negative entry");
    m.at(key.first, key.second) = val;
  }
  return m;
}

void CapacityPolytope::validate() const {
  if (dim == 0) throw std::invalid_argument("polytope: dimension must be positive");
  if (A.size() != b.size()) throw std::invalid_argument("polytope: row count mismatch");
  for (std::size_t r = 0; r < A.size(); ++r) {
    if (A[r].size() != dim) throw std::invalid_argument("polytope: row width mismatch");
    for (double a : A[r])
      if (a < 0 || !std::isfinite(a))
        throw std::invalid_argument(
            "polytope: coefficients must be nonnegative (downward-closed region)");
    if (b[r] < 0 || !std::isfinite(b[r]))
      throw std::invalid_argument("polytope: bounds must be nonnegative");
  }
}

bool CapacityPolytope::contains(const Vec& r, double tol) const {
  if (r.size() != dim) return false;
  for (double x : r)
    if (x < -tol) return false;
  for (std::size_t row = 0; row < A.size(); ++row) {
    double lhs = 0;
    for (std::size_t k = 0; k < dim; ++k) lhs += A[row][k] * r[k];
    if (lhs > b[row] + tol) return false;
  }
  return true;
}

std::vector<double> edge_capacities(const NetworkSpec& spec, const SolverConfig& cfg) {
  std::vector<double> caps;
  caps.reserve(spec.edges.size());
  for (const auto& e : spec.edges) {
    auto r = channel_capacity(e.channel, cfg);
    if (!r.converged)
      throw std::runtime_error("edge_capacities: capacity solver did not converge on edge " +
                               std::to_string(e.from) + "->" + std::to_string(e.to));
    caps.push_back(r.value);
  }
  return caps;
}

double min_cut_bound(const NetworkSpec& spec, std::size_t source_node, std::size_t sink_node,
                     const SolverConfig& cfg) {
  if (source_node < 1 || source_node > spec.node_count || sink_node < 1 ||
      sink_node > spec.node_count)
    throw std::invalid_argument("min_cut_bound: node out of range");
  if (source_node == sink_node) throw std::invalid_argument("min_cut_bound: source equals sink");
  auto caps = edge_capacities(spec, cfg);
  // Edmonds-Karp on the directed graph with residual capacities
  const std::size_t n = spec.node_count;
  std::vector<std::vector<double>> cap(n, std::vector<double>(n, 0.0));
  for (std::size_t e = 0; e < spec.edges.size(); ++e)
    cap[spec.edges[e].from - 1][spec.edges[e].to - 1] += caps[e];
  const std::size_t s = source_node - 1, t = sink_node - 1;
  double flow = 0;
  for (;;) {
    std::vector<long> parent(n, -1);
    parent[s] = long(s);
    std::queue<std::size_t> bfs;
    bfs.push(s);
    while (!bfs.empty() && parent[t] < 0) {
      std::size_t u = bfs.front();
      bfs.pop();
      for (std::size_t v = 0; v < n; ++v)
        if (parent[v] < 0 && cap[u][v] > 1e-12) {
          parent[v] = long(u);
          bfs.push(v);
        }
    }
    if (parent[t] < 0) break;
    double aug = std::numeric_limits<double>::infinity();
    for (std::size_t v = t; v != s; v = std::size_t(parent[v]))
      aug = std::min(aug, cap[std::size_t(parent[v])][v]);
    for (std::size_t v = t; v != s; v = std::size_t(parent[v])) {
      cap[std::size_t(parent[v])][v] -= aug;
      cap[v][std::size_t(parent[v])] += aug;
    }
    flow += aug;
  }
  return flow;
}

FeasibilityVerdict separation_feasible_unicast(const NetworkSpec& spec,
                                               const CapacityPolytope& region, const Vec& D,
                                               const SolverConfig& cfg) {
  spec.validate();
  region.validate();
  if (spec.mode != NetworkMode::Jscmud)
    throw std::invalid_argument("separation_feasible_unicast: requires a unicast-mode spec");
  const std::size_t M = spec.sources.size();
  if (region.dim != M)
    throw std::invalid_argument("separation_feasible_unicast: polytope dimension mismatch");
  if (D.size() != M)
    throw std::invalid_argument("separation_feasible_unicast: one distortion per source required");

  FeasibilityVerdict v;
  v.required_rates.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    if (D[i] < 0) throw std::invalid_argument("separation_feasible_unicast: negative distortion");
    auto rd = rate_distortion(spec.source_marginal(i + 1), spec.distortion_measures[i], D[i], cfg);
    v.required_rates[i] = rd.value / spec.kappa;
  }
  // the region is downward closed, so feasibility holds iff the corner point
  // r_i = R_i(D_i)/kappa itself lies inside; it is also the lexicographically
  // smallest satisfying point
  v.feasible = region.contains(v.required_rates, 1e-9);
  if (v.feasible) v.witness = v.required_rates;
  return v;
}

double separation_frontier_point_to_point(const Pmf& src, const DistortionMeasure& d,
                                          const Dmc& ch, double kappa,
                                          const SolverConfig& cfg) {
  if (kappa < 0) throw std::invalid_argument("separation frontier: kappa must be >= 0");
  if (kappa == 0) return d.d_max(src);
  auto cap = channel_capacity(ch, cfg);
  return distortion_rate(src, d, kappa * cap.value, cfg).value;
}

}  // namespace sepnet
