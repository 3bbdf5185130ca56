#include <doctest.h>

#include <cmath>

#include "sepnet/json_io.hpp"
#include "sepnet/sim.hpp"

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

TEST_CASE("miss probability matches direct evaluation in safe regimes") {
  // p = 0.01, M = 2^10 = 1024: compare with log((1-p)^M)
  double lp = std::log(0.01);
  double direct = 1024.0 * std::log(0.99);
  CHECK(log_miss_probability(lp, 10.0) == doctest::Approx(direct).epsilon(1e-12));
  // certain success
  CHECK(log_miss_probability(0.0, 5.0) == -std::numeric_limits<double>::infinity());
  // impossible event: miss with certainty
  CHECK(log_miss_probability(-std::numeric_limits<double>::infinity(), 5.0) == 0.0);
  // astronomically many codewords vs tiny p: M*p = exp(2000 ln2 - 900), so
  // ln P(miss) = -M*p exactly in this regime (p far below the log1p scale)
  double lm = log_miss_probability(-900.0, 2000.0);  // M = 2^2000, p = e^-900
  CHECK(lm == doctest::Approx(-std::exp(2000.0 * std::log(2.0) - 900.0)).epsilon(1e-9));
  double lm2 = log_miss_probability(-2000.0, 100.0);  // p far below 1/M
  CHECK(lm2 == doctest::Approx(-std::exp(100.0 * std::log(2.0) - 2000.0)).epsilon(1e-6));
}

TEST_CASE("covering probability matches brute-force sequence enumeration") {
  // joint of a uniform binary input through BSC(0.25); block of 4 with counts (2,2)
  auto joint = JointPmf::from_2d(Pmf::uniform(2), Dmc::bsc(0.25));
  const std::size_t n = 4;
  std::vector<std::size_t> x_counts{2, 2};
  std::vector<std::size_t> xs{0, 0, 1, 1};
  const double delta = 0.26;
  // codeword law: uniform over delta-typical output types, uniform arrangement
  Pmf py = joint.marginal(1);
  auto types = enumerate_typical_types(py, n, delta);
  REQUIRE(!types.empty());
  double prob = 0;
  for (std::size_t bits = 0; bits < (1u << n); ++bits) {
    std::vector<std::size_t> ys(n);
    std::size_t ones = 0;
    for (std::size_t i = 0; i < n; ++i) {
      ys[i] = (bits >> i) & 1u;
      ones += ys[i];
    }
    // weight of this sequence under the type-class codeword law
    bool in_types = false;
    for (const auto& t : types) in_types |= (t[1] == ones);
    if (!in_types) continue;
    double binom = 1;
    for (std::size_t k = 1; k <= ones; ++k) binom = binom * double(n - ones + k) / double(k);
    double w = 1.0 / (double(types.size()) * binom);
    // jointly typical with xs? per-cell counts within the window
    std::vector<std::size_t> cell(4, 0);
    for (std::size_t i = 0; i < n; ++i) ++cell[xs[i] * 2 + ys[i]];
    bool typ = true;
    for (std::size_t c = 0; c < 4; ++c) {
      double ref = joint.p[c];
      typ &= std::abs(double(cell[c]) / double(n) - ref) <= delta + 1e-12;
    }
    if (typ) prob += w;
  }
  SeededRng rng(5, 0);
  auto out = simulate_covering(x_counts, joint, delta, 2.0, rng);
  CHECK(std::exp(out.log_cover_prob_single) == doctest::Approx(prob).epsilon(1e-9));
}

TEST_CASE("conditional covering probability matches brute-force enumeration") {
  // asymmetric input counts (3,1): conditional windows scale with the rows
  auto joint = JointPmf::from_2d(Pmf::uniform(2), Dmc::bsc(0.25));
  const std::size_t n = 4;
  std::vector<std::size_t> x_counts{3, 1};
  std::vector<std::size_t> xs{0, 0, 0, 1};
  const double delta = 0.3;
  Pmf py = joint.marginal(1);
  double prob = 0;
  for (std::size_t bits = 0; bits < (1u << n); ++bits) {
    std::vector<std::size_t> ys(n);
    double w = 1;  // i.i.d. codeword law Q^n
    for (std::size_t i = 0; i < n; ++i) {
      ys[i] = (bits >> i) & 1u;
      w *= py[ys[i]];
    }
    // conditionally typical with xs? per-cell counts within n_x * (P(y|x) +- delta)
    std::vector<std::size_t> cell(4, 0);
    for (std::size_t i = 0; i < n; ++i) ++cell[xs[i] * 2 + ys[i]];
    bool typ = true;
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < 2; ++y) {
        double cond = joint.p[x * 2 + y] / (joint.p[x * 2] + joint.p[x * 2 + 1]);
        typ &= std::abs(double(cell[x * 2 + y]) / double(x_counts[x]) - cond) <= delta + 1e-12;
      }
    if (typ) prob += w;
  }
  SeededRng rng(6, 0);
  auto out = simulate_covering(x_counts, joint, delta, 2.0, rng, true);
  CHECK(std::exp(out.log_cover_prob_single) == doctest::Approx(prob).epsilon(1e-9));
}

TEST_CASE("covering at generous rate succeeds and yields a consistent table") {
  auto joint = JointPmf::from_2d(Pmf::uniform(2), Dmc::bsc(0.1));
  SeededRng rng(7, 0);
  std::vector<std::size_t> counts{100, 100};
  auto out = simulate_covering(counts, joint, 0.05, 3.0, rng);
  REQUIRE(out.covered);
  for (std::size_t x = 0; x < 2; ++x) {
    std::size_t row = out.table[x][0] + out.table[x][1];
    CHECK(row == counts[x]);
  }
  CHECK(out.tv < 0.12);
  // miss probability falls with the rate
  SeededRng rng2(7, 0);
  auto low = simulate_covering(counts, joint, 0.05, 0.9, rng2);
  CHECK(low.log_miss_prob > out.log_miss_prob);
}

TEST_CASE("output placement matches the sampled table") {
  auto joint = JointPmf::from_2d(Pmf::uniform(2), Dmc::bsc(0.1));
  SeededRng rng(9, 0);
  std::vector<std::size_t> xs;
  for (int i = 0; i < 60; ++i) xs.push_back(i % 2);
  std::vector<std::size_t> counts{30, 30};
  auto out = simulate_covering(counts, joint, 0.06, 3.0, rng);
  REQUIRE(out.covered);
  auto ys = place_outputs(xs, out.table, 2, rng);
  std::vector<std::size_t> cell(4, 0);
  for (std::size_t i = 0; i < xs.size(); ++i) ++cell[xs[i] * 2 + ys[i]];
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < 2; ++y) CHECK(cell[x * 2 + y] == out.table[x][y]);
}

TEST_CASE("competitor typicality probability matches brute force") {
  // uniform binary competitor against a fixed sequence, BSC(0.2)-style joint
  auto joint = JointPmf::from_2d(Pmf::uniform(2), Dmc::bsc(0.2));
  const std::size_t n = 10;
  std::vector<std::size_t> other{0, 1, 0, 0, 1, 1, 0, 1, 0, 0};
  std::vector<std::size_t> oc{6, 4};
  const double delta = 0.15;
  double hj = 0;
  for (double p : joint.p) hj -= p * std::log2(p);
  double brute = 0;
  for (std::size_t bits = 0; bits < (1u << n); ++bits) {
    double ll = 0;
    for (std::size_t i = 0; i < n; ++i)
      ll -= std::log2(joint.p[((bits >> i) & 1u) * 2 + other[i]]);
    if (std::abs(ll / double(n) - hj) <= delta) brute += std::pow(2.0, -double(n));
  }
  double lg = log2_competitor_typical_prob(Pmf::uniform(2), joint, oc, n, delta);
  CHECK(std::pow(2.0, lg) == doctest::Approx(brute).epsilon(1e-9));
}

TEST_CASE("competitor analysis declines unsupported shapes") {
  // non-uniform generation law
  auto joint = JointPmf::from_2d(Pmf({0.3, 0.7}), Dmc::bsc(0.2));
  CHECK_THROWS(log2_competitor_typical_prob(Pmf({0.3, 0.7}), joint, {5, 5}, 10, 0.1));
}

TEST_CASE("identity base code reproduces the hand-written fixture") {
  auto spec = load_network_spec(read_json_file(fixture("fig2.json")));
  auto ident = BaseJointCode::identity_for(spec);
  auto file = load_base_code(read_json_file(fixture("base_identity_fig2.json")));
  CHECK(ident.encoders == file.encoders);
  CHECK(ident.decoders == file.decoders);
}

TEST_CASE("base-code analysis is exact on the correlated fixture") {
  auto spec = load_network_spec(read_json_file(fixture("fig2.json")));
  auto base = BaseJointCode::identity_for(spec);
  auto a = analyze_base_code(spec, base);
  double c = 1 - h2(0.05);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(a.edge_capacities[e] == doctest::Approx(c).epsilon(1e-6));
    // identity encoders with uniform marginals achieve capacity exactly
    CHECK(a.edge_session_info[e][0] == doctest::Approx(c).epsilon(1e-9));
  }
  CHECK(a.exact_distortions.at({1, 3}) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(a.exact_distortions.at({1, 4}) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(a.exact_distortions.at({2, 4}) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("majority-vote base code beats the raw crossover") {
  auto spec = load_network_spec(read_json_file(fixture("p2p_rep3.json")));
  auto base = load_base_code(read_json_file(fixture("base_majority_rep3.json")));
  auto a = analyze_base_code(spec, base);
  // three-fold repetition over BSC(0.2): error = 3 e^2 (1-e) + e^3 = 0.104
  CHECK(a.exact_distortions.at({1, 2}) == doctest::Approx(0.104).epsilon(1e-9));
}

TEST_CASE("channel simulation experiment is deterministic under a fixed seed") {
  SeededRng r1(123, 0), r2(123, 0);
  auto a = channel_simulation_experiment(Dmc::bsc(0.1), Pmf::uniform(2), 200, 0.04, 0.1,
                                         5, r1);
  auto b = channel_simulation_experiment(Dmc::bsc(0.1), Pmf::uniform(2), 200, 0.04, 0.1,
                                         5, r2);
  CHECK(a.e2 == b.e2);
  CHECK(a.mean_tv == doctest::Approx(b.mean_tv));
  CHECK(a.to_csv() == b.to_csv());
  SeededRng r3(124, 0);
  auto c = channel_simulation_experiment(Dmc::bsc(0.1), Pmf::uniform(2), 200, 0.04, 0.1,
                                         5, r3);
  CHECK(a.rows.size() == c.rows.size());  // same shape, independent draws
}

TEST_CASE("network experiment respects the capacity accounting") {
  auto spec = load_network_spec(read_json_file(fixture("fig2.json")));
  auto base = BaseJointCode::identity_for(spec);
  SeededRng rng(77, 0);
  auto rep = dnjscc_separation_experiment(spec, base, 300, 0.05, 4, rng);
  CHECK(rep.trials == 4);
  REQUIRE(rep.rates.size() == 3);
  double c = 1 - h2(0.05);
  for (double r : rep.rates) CHECK(r == doctest::Approx(c + 0.05).epsilon(1e-6));
  // distortions land near the exact 0.05 when the construction succeeds
  for (const auto& [k, v] : rep.distortions) CHECK(v < 0.25);
}

TEST_CASE("super-channel experiment runs and reports per-source failures") {
  auto spec = load_network_spec(read_json_file(fixture("p2p.json")));
  auto base = BaseJointCode::identity_for(spec);
  SeededRng rng(31, 0);
  auto rep = jscmud_superchannel_experiment(spec, base, {0.12}, 0.0, 0.1, 500, 10, rng);
  CHECK(rep.trials == 10);
  REQUIRE(rep.e3_per_source.size() == 1);
  CHECK(rep.distortions.count("S1") == 1);
  // rate = R(0.12) - 0.1 is well below the super-channel information: mostly clean
  CHECK(rep.error_rate < 0.5);
}

TEST_CASE("baseline experiment stays above the converse") {
  Pmf u = Pmf::uniform(2);
  auto d = DistortionMeasure::hamming(2);
  SeededRng rng(55, 0);
  auto rep = separation_baseline_experiment(u, d, Dmc::bsc(0.11), 1.0, 0.2, 0.1, 400, 5,
                                            rng);
  CHECK(rep.trials == 5);
  // OPTA at kappa 1 over BSC(0.11) is 0.11; targeting 0.2 must not beat it
  CHECK(rep.distortions.at("end_to_end") > 0.11 - 0.02);
}

TEST_CASE("report serialization") {
  SeededRng rng(2, 0);
  auto rep = channel_simulation_experiment(Dmc::bsc(0.1), Pmf::uniform(2), 100, 0.06, 0.2,
                                           3, rng);
  auto j = dump_sim_report(rep);
  CHECK(j["trials"] == 3);
  CHECK(j.contains("rates"));
  auto csv = rep.to_csv();
  CHECK(csv.rfind("trial,e1,e2,e3,distortion,tv\n", 0) == 0);
}
