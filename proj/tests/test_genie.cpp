#include <doctest.h>

#include <cmath>

#include "sepnet/genie.hpp"
#include "sepnet/json_io.hpp"

using namespace sepnet;

#ifndef SEPNET_FIXTURE_DIR
#define SEPNET_FIXTURE_DIR "fixtures"
#endif

namespace {
std::string fixture(const std::string& name) {
  return std::string(SEPNET_FIXTURE_DIR) + "/" + name;
}

DistortionMatrix fig7_matrix() {
  return load_distortion_matrix(read_json_file(fixture("fig7_distortions.json")));
}

std::map<std::size_t, std::set<std::size_t>> fig7_demands() {
  return load_network_spec(read_json_file(fixture("fig7.json"))).demands;
}
}

TEST_CASE("orders sort destinations by strictly decreasing distortion") {
  auto O = induce_orders(fig7_matrix(), fig7_demands());
  auto s1 = O.slots(1);
  REQUIRE(s1.size() == 2);
  CHECK(s1[0] == 3);  // D = 0.4 first
  CHECK(s1[1] == 4);  // D = 0.1 second
  CHECK(O.depth(1) == 2);
  CHECK(O.fanout(1) == 2);
  CHECK(O.slots(2) == std::vector<std::size_t>{4});
  CHECK(O.slots(3) == std::vector<std::size_t>{3});
}

TEST_CASE("equal distortions merge into a super-destination") {
  DistortionMatrix dm(1, 3);
  dm.at(1, 2) = 0.2;
  dm.at(1, 3) = 0.2;
  std::map<std::size_t, std::set<std::size_t>> demands{{2, {1}}, {3, {1}}};
  auto O = induce_orders(dm, demands);
  CHECK(O.depth(1) == 1);   // one merged slot
  CHECK(O.fanout(1) == 2);  // covering two destinations
}

TEST_CASE("quadratic genie matrix on the multicast fixture") {
  auto O = induce_orders(fig7_matrix(), fig7_demands());
  auto rm = quadratic_genie_rate_matrix(fig7_matrix(), O);
  int defined = 0;
  for (double v : rm.r)
    if (v != kGenieUndefined) {
      ++defined;
      CHECK(v == doctest::Approx(0.5));
    }
  CHECK(defined == 2);
  CHECK(rm.defined(1, 3));
  CHECK(rm.defined(1, 4));
  CHECK_FALSE(rm.defined(2, 4));  // single-destination sources stay diamond
  CHECK(aggregate_throughput(rm, O) == doctest::Approx(1.5));
}

TEST_CASE("aux chain convolution invariants") {
  auto z4 = FiniteAbelianGroup::make_cyclic(4);
  auto d = DistortionMeasure::difference(z4, {0.0, 1.0, 2.0, 1.0});
  std::vector<Pmf> v{Pmf({0.85, 0.05, 0.05, 0.05}), Pmf({0.9, 0.05, 0.0, 0.05})};
  Vec D_row{0.6, 0.2};
  auto chain = build_aux_chain(v, z4, d, D_row);
  REQUIRE(chain.u_laws.size() == 2);
  // U_K = V_K, U_1 = V_1 + V_2
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(chain.u_laws[1][i] == doctest::Approx(v[1][i]));
  auto conv = group_convolve(v[1], v[0], z4);
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(chain.u_laws[0][i] == doctest::Approx(conv[i]));
  // budgets honored
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(chain.expected_distortions[k] <= D_row[k] + 1e-12);
  // violating a budget throws with the failing level named
  CHECK_THROWS(build_aux_chain(v, z4, d, {0.6, 0.01}));
}

TEST_CASE("genie rate matrix via the solver agrees with hand computation") {
  auto z2 = FiniteAbelianGroup::make_cyclic(2);
  auto d = DistortionMeasure::difference(z2, {0.0, 1.0});
  auto s = AdditiveStructure::from_group(z2, {0.0, 1.0});
  DistortionMatrix dm(1, 3);
  dm.at(1, 2) = 0.3;
  dm.at(1, 3) = 0.1;
  std::map<std::size_t, std::set<std::size_t>> demands{{2, {1}}, {3, {1}}};
  auto O = induce_orders(dm, demands);
  std::vector<Pmf> v{Pmf({0.75, 0.25}), Pmf({0.9, 0.1})};
  auto chain = build_aux_chain(v, z2, d, {0.3, 0.1});
  std::map<std::size_t, AuxChain> chains;
  chains.emplace(1, chain);
  auto rm = genie_rate_matrix(dm, O, chains, {s});
  auto h2 = [](double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); };
  // slot 1: C(0.3, U_1) with U_1 = Bern(0.25 + 0.1 - 2*0.025) = Bern(0.3)
  double u1 = 0.25 * 0.9 + 0.75 * 0.1;
  CHECK(rm.at(1, 2) == doctest::Approx(h2(0.3 + u1 - 2 * 0.3 * u1) - h2(u1)).epsilon(1e-3));
  // slot 2: C(0.1, U_2) with U_2 = Bern(0.1): input Bern(0.1)
  CHECK(rm.at(1, 3) == doctest::Approx(h2(0.1 + 0.1 - 0.02) - h2(0.1)).epsilon(1e-3));
}

TEST_CASE("degraded-message-set rates are consistent") {
  auto z2 = FiniteAbelianGroup::make_cyclic(2);
  auto d = DistortionMeasure::difference(z2, {0.0, 1.0});
  auto s = AdditiveStructure::from_group(z2, {0.0, 1.0});
  std::vector<Pmf> v{Pmf({0.8, 0.2}), Pmf({0.92, 0.08})};
  Vec D_row{0.35, 0.08};
  auto chain = build_aux_chain(v, z2, d, D_row);
  auto rates = dms_rates(Pmf::uniform(2), chain, s, D_row);
  REQUIRE(rates.size() == 2);
  // each rate = information term - genie capacity, both finite
  for (double r : rates) {
    CHECK(std::isfinite(r));
    CHECK(r < 1.0);
  }
}

TEST_CASE("rate-loss inequalities hold on a hand-built instance") {
  auto z2 = FiniteAbelianGroup::make_cyclic(2);
  auto d = DistortionMeasure::difference(z2, {0.0, 1.0});
  auto s = AdditiveStructure::from_group(z2, {0.0, 1.0});
  std::vector<Pmf> v{Pmf({0.8, 0.2}), Pmf({0.9, 0.1})};
  Vec D_row{0.3, 0.1};
  auto chain = build_aux_chain(v, z2, d, D_row);
  // reconstruction channels: BSC-style conditionals meeting budgets 0.3, 0.1
  std::vector<Dmc> recon{Dmc::bsc(0.25), Dmc::bsc(0.08)};
  Vec budgets{0.3, 0.1};
  auto slacks =
      verify_rate_loss_bounds(Pmf::uniform(2), recon, budgets, chain, s, d);
  CHECK(slacks.size() == recon.size() * chain.u_laws.size());
  for (const auto& sl : slacks) CHECK(sl.slack >= -1e-9);
}

TEST_CASE("rate-loss verification rejects budget-violating reconstructions") {
  auto z2 = FiniteAbelianGroup::make_cyclic(2);
  auto d = DistortionMeasure::difference(z2, {0.0, 1.0});
  auto s = AdditiveStructure::from_group(z2, {0.0, 1.0});
  std::vector<Pmf> v{Pmf({0.9, 0.1})};
  auto chain = build_aux_chain(v, z2, d, {0.1});
  std::vector<Dmc> recon{Dmc::bsc(0.4)};  // distortion 0.4 > budget 0.1
  CHECK_THROWS(verify_rate_loss_bounds(Pmf::uniform(2), recon, {0.1}, chain, s, d));
}

TEST_CASE("chain optimizer returns a feasible chain") {
  auto z4 = FiniteAbelianGroup::make_cyclic(4);
  auto d = DistortionMeasure::difference(z4, {0.0, 1.0, 2.0, 1.0});
  auto s = AdditiveStructure::from_group(z4, {0.0, 1.0, 2.0, 1.0});
  SeededRng rng(11, 0);
  auto chain = optimize_aux_chain(z4, d, {0.8, 0.3}, s, rng);
  REQUIRE(chain.u_laws.size() == 2);
  CHECK(chain.expected_distortions[0] <= 0.8 + 1e-9);
  CHECK(chain.expected_distortions[1] <= 0.3 + 1e-9);
}

TEST_CASE("rate matrix serialization with diamonds") {
  GenieRateMatrix rm(2, 3);
  rm.at(1, 2) = 0.5;
  auto j = dump_genie_rate_matrix(rm);
  CHECK(j["entries"][1] == 0.5);
  CHECK(j["entries"][0] == "diamond");
  auto back = load_genie_rate_matrix(j);
  CHECK(back.at(1, 2) == 0.5);
  CHECK_FALSE(back.defined(1, 1));
}
