#pragma once
// JSON (de)serialization for every on-disk artifact: laws, channels, groups,
// distortion measures, additive structures, network specs, polytopes, rate
// matrices, base codes, solver results, and simulation reports.
#include <string>

#include <json.hpp>

#include "sepnet/genie.hpp"
#include "sepnet/sim.hpp"

namespace sepnet {

using Json = nlohmann::json;

// --- loading (throws std::invalid_argument with a field path on bad input) ---
Pmf load_pmf(const Json& j);
JointPmf load_joint_pmf(const Json& j);
Dmc load_dmc(const Json& j);
FiniteAbelianGroup load_group(const Json& j);
DistortionMeasure load_distortion(const Json& j);
AdditiveStructure load_additive_structure(const Json& j);
NetworkSpec load_network_spec(const Json& j);
CapacityPolytope load_polytope(const Json& j);
DistortionMatrix load_distortion_matrix(const Json& j);
GenieRateMatrix load_genie_rate_matrix(const Json& j);
BaseJointCode load_base_code(const Json& j);
SolverConfig load_solver_config(const Json& j);  // partial objects allowed

// --- dumping ---
Json dump_pmf(const Pmf& p);
Json dump_joint_pmf(const JointPmf& j);
Json dump_dmc(const Dmc& ch);
Json dump_group(const FiniteAbelianGroup& g);
Json dump_distortion(const DistortionMeasure& d);
Json dump_additive_structure(const AdditiveStructure& s);
Json dump_network_spec(const NetworkSpec& spec);
Json dump_polytope(const CapacityPolytope& p);
Json dump_distortion_matrix(const DistortionMatrix& m);
Json dump_genie_rate_matrix(const GenieRateMatrix& m);  // diamonds as "diamond"
Json dump_base_code(const BaseJointCode& b);
Json dump_solver_result(const SolverResult& r);
Json dump_order_vector(const OrderVector& o);
Json dump_aux_chain(const AuxChain& c);
Json dump_sim_report(const SimReport& r);

// --- files ---
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

// FNV-1a 64-bit content hash of a file, as 16 hex digits
std::string file_content_hash(const std::string& path);

}  // namespace sepnet
