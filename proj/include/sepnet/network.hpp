#pragma once
// Network data model: graphs of point-to-point channels with correlated or
// independent sources, distortion demands, capacity polytopes, and the
// separation-region feasibility computations built on top of the solvers.
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sepnet/solvers.hpp"

namespace sepnet {

enum class NetworkMode { Dnjscc, Jscmud, Jscmmd };

struct NetworkEdge {
  std::size_t from = 0, to = 0;  // 1-based node ids
  Dmc channel;
};

struct NetworkSource {
  std::size_t id = 0;          // 1-based source id; axis id-1 of the joint law
  std::set<std::size_t> placement;  // nodes where the source is observed
};

struct NetworkSpec {
  NetworkMode mode = NetworkMode::Dnjscc;
  std::size_t node_count = 0;
  std::vector<NetworkEdge> edges;
  std::vector<NetworkSource> sources;
  std::map<std::size_t, std::set<std::size_t>> demands;  // node -> source ids
  JointPmf joint_source_law;  // axis i-1 = source i
  std::vector<DistortionMeasure> distortion_measures;  // per source, id order
  double kappa = 1.0;

  void validate() const;
  Pmf source_marginal(std::size_t source_id) const;
  // destinations demanding source i: the set {j : i in T_j}
  std::set<std::size_t> destinations_of(std::size_t source_id) const;
};

// Entries D[i][j] for source i, destination j; missing demands are filled with
// the rate-zero distortion of the source (the value achievable with no data).
struct DistortionMatrix {
  std::size_t source_count = 0, node_count = 0;
  std::vector<double> d;  // row-major source x node

  DistortionMatrix() = default;
  DistortionMatrix(std::size_t ns, std::size_t nn)
      : source_count(ns), node_count(nn), d(ns * nn, 0.0) {}
  double& at(std::size_t src, std::size_t node) { return d[(src - 1) * node_count + (node - 1)]; }
  double at(std::size_t src, std::size_t node) const {
    return d[(src - 1) * node_count + (node - 1)];
  }
  // fill non-demanded entries with each source's rate-zero distortion
  static DistortionMatrix with_defaults(const NetworkSpec& spec,
                                        const std::map<std::pair<std::size_t, std::size_t>, double>&
                                            demanded);
};

// {R >= 0 : A R <= b}; loading enforces A, b >= 0 entrywise so the region is
// downward closed (any rate can be reduced without leaving the region).
struct CapacityPolytope {
  std::size_t dim = 0;
  std::vector<Vec> A;  // rows
  Vec b;

  void validate() const;
  bool contains(const Vec& r, double tol = 1e-9) const;
};

struct FeasibilityVerdict {
  bool feasible = false;
  Vec witness;        // rate vector when feasible
  Vec required_rates; // R_i(D_i)/kappa per source
};

// per-edge Shannon capacities (DNJSCC mode)
std::vector<double> edge_capacities(const NetworkSpec& spec, const SolverConfig& cfg = {});

// max-flow outer bound between two nodes with edge capacities from the solver
double min_cut_bound(const NetworkSpec& spec, std::size_t source_node, std::size_t sink_node,
                     const SolverConfig& cfg = {});

// membership test for the separation distortion region of the unicast problem:
// feasible iff some R in the polytope has R_i >= R_i(D_i)/kappa for all i
FeasibilityVerdict separation_feasible_unicast(const NetworkSpec& spec,
                                               const CapacityPolytope& region, const Vec& D,
                                               const SolverConfig& cfg = {});

// point-to-point separation frontier: D(kappa * C(ch))
double separation_frontier_point_to_point(const Pmf& src, const DistortionMeasure& d,
                                          const Dmc& ch, double kappa,
                                          const SolverConfig& cfg = {});

}  // namespace sepnet
