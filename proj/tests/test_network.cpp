#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "sepnet/json_io.hpp"
#include "sepnet/network.hpp"

using namespace sepnet;

#ifndef SEPNET_FIXTURE_DIR
#define SEPNET_FIXTURE_DIR "fixtures"
#endif

namespace {
double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }
std::string fixture(const std::string& name) {
  return std::string(SEPNET_FIXTURE_DIR) + "/" + name;
}
}

TEST_CASE("figure fixtures load, validate, and round-trip bit-exactly") {
  for (const std::string name : {"fig2.json", "fig4.json", "fig5.json", "fig7.json"}) {
    auto j = read_json_file(fixture(name));
    auto spec = load_network_spec(j);
    CHECK_NOTHROW(spec.validate());
    // serializer round trip: dump -> load -> dump must be byte-identical
    auto dumped = dump_network_spec(spec);
    auto reloaded = load_network_spec(dumped);
    CHECK(dump_network_spec(reloaded).dump() == dumped.dump());
  }
}

TEST_CASE("law serialization round-trips bit-exactly") {
  Pmf p({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  CHECK(dump_pmf(load_pmf(dump_pmf(p))).dump() == dump_pmf(p).dump());
  auto ch = Dmc::bsc(0.11);
  CHECK(dump_dmc(load_dmc(dump_dmc(ch))).dump() == dump_dmc(ch).dump());
  JointPmf j({2, 2}, {0.1, 0.2, 0.3, 0.4});
  CHECK(dump_joint_pmf(load_joint_pmf(dump_joint_pmf(j))).dump() ==
        dump_joint_pmf(j).dump());
}

TEST_CASE("spec validation rejects malformed networks") {
  auto spec = load_network_spec(read_json_file(fixture("fig2.json")));
  auto bad = spec;
  bad.edges[0].to = 9;  // dangling endpoint
  CHECK_THROWS(bad.validate());
  bad = spec;
  bad.demands[3].insert(7);  // unknown source id
  CHECK_THROWS(bad.validate());
}

TEST_CASE("unicast specs require disjoint destinations per source") {
  auto spec = load_network_spec(read_json_file(fixture("fig5.json")));
  // fig5 multicasts source 1; it must not validate as a unicast problem
  spec.mode = NetworkMode::Jscmud;
  CHECK_THROWS(spec.validate());
}

TEST_CASE("edge capacities of the correlated-source fixture") {
  auto spec = load_network_spec(read_json_file(fixture("fig2.json")));
  auto caps = edge_capacities(spec);
  REQUIRE(caps.size() == 3);
  for (double c : caps) CHECK(c == doctest::Approx(1 - h2(0.05)).epsilon(1e-6));
}

TEST_CASE("min-cut bound") {
  auto spec = load_network_spec(read_json_file(fixture("fig2.json")));
  double c = 1 - h2(0.05);
  // node 1 reaches node 4 through the single direct edge
  CHECK(min_cut_bound(spec, 1, 4) == doctest::Approx(c).epsilon(1e-6));
  // no path from node 3 anywhere
  CHECK(min_cut_bound(spec, 3, 4) == doctest::Approx(0.0));
}

TEST_CASE("polytope containment and downward closure") {
  CapacityPolytope p;
  p.dim = 2;
  p.A = {{1.0, 1.0}};
  p.b = {1.0};
  CHECK_NOTHROW(p.validate());
  CHECK(p.contains({0.5, 0.5}));
  CHECK(p.contains({0.0, 0.0}));
  CHECK_FALSE(p.contains({0.8, 0.4}));
  CHECK_FALSE(p.contains({-0.1, 0.0}));  // rates must be nonnegative
  CapacityPolytope bad;
  bad.dim = 1;
  bad.A = {{-1.0}};
  bad.b = {1.0};
  CHECK_THROWS(bad.validate());  // negative coefficients break downward closure
}

TEST_CASE("separation feasibility on the unicast fixture") {
  auto spec = load_network_spec(read_json_file(fixture("fig4.json")));
  auto region = load_polytope(read_json_file(fixture("fig4_region.json")));
  // loose distortions: tiny required rates, clearly inside the region
  auto ok = separation_feasible_unicast(spec, region, {0.4, 0.4, 0.4});
  CHECK(ok.feasible);
  REQUIRE(ok.witness.size() == 3);
  CHECK(region.contains(ok.witness));
  // tight distortions: rates near 1 bit each exceed the region
  auto bad = separation_feasible_unicast(spec, region, {0.001, 0.001, 0.001});
  CHECK_FALSE(bad.feasible);
  for (double r : bad.required_rates) CHECK(r > 0.7136);
}

TEST_CASE("point-to-point separation frontier matches the matched-channel oracle") {
  // binary uniform source over BSC(eps) with kappa = 1: R(D) = C at D = eps
  Pmf u = Pmf::uniform(2);
  auto d = DistortionMeasure::hamming(2);
  double D = separation_frontier_point_to_point(u, d, Dmc::bsc(0.11), 1.0);
  CHECK(D == doctest::Approx(0.11).epsilon(1e-3));
  // kappa = 0: no channel uses, rate zero, d_max
  double D0 = separation_frontier_point_to_point(u, d, Dmc::bsc(0.11), 0.0);
  CHECK(D0 == doctest::Approx(0.5).epsilon(1e-6));
  // doubling kappa strictly improves the distortion
  double D2 = separation_frontier_point_to_point(u, d, Dmc::bsc(0.11), 2.0);
  CHECK(D2 < D);
}

TEST_CASE("distortion matrix defaults") {
  auto spec = load_network_spec(read_json_file(fixture("fig2.json")));
  std::map<std::pair<std::size_t, std::size_t>, double> demanded{
      {{1, 3}, 0.05}, {{1, 4}, 0.05}, {{2, 4}, 0.05}};
  auto dm = DistortionMatrix::with_defaults(spec, demanded);
  CHECK(dm.at(1, 3) == doctest::Approx(0.05));
  CHECK(dm.at(1, 1) == doctest::Approx(0.0));   // source observed at its own node
  CHECK(dm.at(2, 3) == doctest::Approx(0.5));   // not demanded: rate-zero distortion
}

TEST_CASE("polytope serialization") {
  auto p = load_polytope(read_json_file(fixture("fig4_region.json")));
  CHECK(p.dim == 3);
  auto j = dump_polytope(p);
  auto q = load_polytope(j);
  CHECK(dump_polytope(q).dump() == j.dump());
}
