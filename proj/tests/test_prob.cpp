#include <doctest.h>

#include <cmath>

#include "sepnet/prob.hpp"

using namespace sepnet;

namespace {
double h2(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }
}

TEST_CASE("pmf validation") {
  CHECK_THROWS(Pmf({0.5, 0.6}));
  CHECK_THROWS(Pmf({-0.1, 1.1}));
  Pmf u = Pmf::uniform(4);
  CHECK(u[0] == doctest::Approx(0.25));
  Pmf pt = Pmf::point_mass(3, 1);
  CHECK(pt[1] == 1.0);
  CHECK(pt[0] == 0.0);
}

TEST_CASE("entropy golden values") {
  CHECK(entropy(Pmf::uniform(8)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(entropy(Pmf({0.11, 0.89})) == doctest::Approx(h2(0.11)).epsilon(1e-12));
  CHECK(entropy(Pmf::point_mass(5, 2)) == doctest::Approx(0.0));
}

TEST_CASE("mutual information oracles") {
  // independent pair: zero
  JointPmf indep({2, 2}, {0.25, 0.25, 0.25, 0.25});
  CHECK(mutual_information(indep) == doctest::Approx(0.0).epsilon(1e-12));
  // identity channel: H(X)
  JointPmf ident({2, 2}, {0.3, 0.0, 0.0, 0.7});
  CHECK(mutual_information(ident) == doctest::Approx(h2(0.3)).epsilon(1e-12));
  // BSC(0.11) with uniform input: 1 - h(0.11)
  auto j = JointPmf::from_2d(Pmf::uniform(2), Dmc::bsc(0.11));
  CHECK(mutual_information(j) == doctest::Approx(1 - h2(0.11)).epsilon(1e-12));
}

TEST_CASE("conditional mutual information") {
  // Z independent of (X,Y): I(X;Y|Z) = I(X;Y)
  JointPmf xy({2, 2}, {0.4, 0.1, 0.1, 0.4});
  double mi = mutual_information(xy);
  Vec p3;
  for (double z : {0.5, 0.5})
    for (double v : xy.p) p3.push_back(v * z);
  // layout (x, y, z): build rank-3 with z last
  Vec q(8);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) q[x * 4 + y * 2 + z] = xy.p[x * 2 + y] * 0.5;
  JointPmf xyz({2, 2, 2}, q);
  CHECK(conditional_mutual_information(xyz) == doctest::Approx(mi).epsilon(1e-12));
  // X -> Z -> Y Markov with Z = X: I(X;Y|Z) = 0
  Vec m(8, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) m[x * 4 + y * 2 + x] = 0.5 * (y == x ? 0.9 : 0.1);
  CHECK(conditional_mutual_information(JointPmf({2, 2, 2}, m)) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("divergences") {
  Vec p{0.5, 0.5}, q{0.9, 0.1};
  CHECK(kl_divergence(p, p) == doctest::Approx(0.0));
  CHECK(kl_divergence(p, q) > 0);
  CHECK(tv_distance(p, q) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(tv_distance(q, p) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("cyclic group and convolution") {
  auto g = FiniteAbelianGroup::make_cyclic(5);
  CHECK(g.check_axioms());
  CHECK(g.add(3, 4) == 2);
  CHECK(g.neg(2) == 3);
  CHECK(g.sub(1, 3) == 3);
  // Z2: Bern(a) + Bern(b) = Bern(a(1-b) + b(1-a))
  auto z2 = FiniteAbelianGroup::make_cyclic(2);
  auto c = group_convolve(Pmf({0.8, 0.2}), Pmf({0.7, 0.3}), z2);
  CHECK(c[1] == doctest::Approx(0.2 * 0.7 + 0.3 * 0.8).epsilon(1e-12));
}

TEST_CASE("klein four-group from table") {
  // Z2 x Z2 packed as {0,1,2,3} with XOR addition
  std::vector<std::uint32_t> tab(16);
  for (std::uint32_t a = 0; a < 4; ++a)
    for (std::uint32_t b = 0; b < 4; ++b) tab[a * 4 + b] = a ^ b;
  auto g = FiniteAbelianGroup::from_table(tab, 4);
  CHECK(g.check_axioms());
  CHECK(g.neg(3) == 3);  // every element self-inverse
}

TEST_CASE("distortion measures") {
  auto d = DistortionMeasure::hamming(2);
  CHECK(d.at(0, 0) == 0.0);
  CHECK(d.at(0, 1) == 1.0);
  CHECK(d.d_max(Pmf({0.3, 0.7})) == doctest::Approx(0.3));
  JointPmf j({2, 2}, {0.45, 0.05, 0.05, 0.45});
  CHECK(d.expected(j) == doctest::Approx(0.1).epsilon(1e-12));
  auto z4 = FiniteAbelianGroup::make_cyclic(4);
  auto dd = DistortionMeasure::difference(z4, {0.0, 1.0, 2.0, 1.0});
  CHECK(dd.is_difference);
  CHECK(dd.at(1, 0) == 1.0);
  CHECK(dd.at(0, 2) == 2.0);
  CHECK(dd.expected_noise(Pmf({0.4, 0.3, 0.2, 0.1})) ==
        doctest::Approx(0.3 + 0.4 + 0.1).epsilon(1e-12));
}

TEST_CASE("seeded rng determinism and streams") {
  SeededRng a(42, 0), b(42, 0), c(42, 1);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  SeededRng a2(42, 0);
  for (int i = 0; i < 16; ++i) differs |= (a2.next_u64() != c.next_u64());
  CHECK(differs);
  auto child1 = a.child(7);
  auto child2 = b.child(7);
  CHECK(child1.next_u64() == child2.next_u64());
}

TEST_CASE("sampling matches the law") {
  SeededRng rng(1, 0);
  Pmf p({0.2, 0.5, 0.3});
  std::vector<std::size_t> counts(3, 0);
  const int N = 20000;
  for (int i = 0; i < N; ++i) ++counts[rng.sample(p)];
  for (int k = 0; k < 3; ++k)
    CHECK(double(counts[k]) / N == doctest::Approx(p[k]).epsilon(0.05));
  auto perm = rng.permutation(10);
  std::vector<bool> seen(10, false);
  for (auto i : perm) seen[i] = true;
  for (bool s : seen) CHECK(s);
}

TEST_CASE("typicality") {
  Pmf p({0.7, 0.3});
  std::vector<std::size_t> seq{0, 0, 0, 0, 0, 0, 0, 1, 1, 1};
  CHECK(is_strongly_typical(seq, p, 0.05));
  CHECK_FALSE(is_strongly_typical(std::vector<std::size_t>(10, 0), p, 0.05));
  // zero-probability symbols are forbidden
  Pmf q({1.0, 0.0});
  CHECK_FALSE(is_strongly_typical(seq, q, 0.5));
  // enumerate: window [n(p-d), n(p+d)] per symbol
  auto types = enumerate_typical_types(p, 10, 0.05);
  for (const auto& t : types) {
    CHECK(t[0] + t[1] == 10);
    CHECK(counts_strongly_typical(t, 10, p, 0.05));
  }
  CHECK(!types.empty());
}

TEST_CASE("typical samplers produce typical sequences") {
  SeededRng rng(3, 0);
  Pmf p({0.6, 0.4});
  auto s1 = sample_typical_uniform(p, 50, 0.1, rng);
  CHECK(is_strongly_typical(s1, p, 0.1));
  auto s2 = sample_typical_type_class(p, 50, 0.1, rng);
  CHECK(is_strongly_typical(s2, p, 0.1));
}

TEST_CASE("log factorial table") {
  LogFact lf(20);
  CHECK(lf.lfact(0) == doctest::Approx(0.0));
  CHECK(lf.lfact(5) == doctest::Approx(std::log(120.0)).epsilon(1e-12));
  CHECK(lf.lbinom(10, 3) == doctest::Approx(std::log(120.0)).epsilon(1e-12));
  CHECK(lf.lmultinom(4, {2, 1, 1}) == doctest::Approx(std::log(12.0)).epsilon(1e-12));
}

TEST_CASE("joint pmf marginals and projections") {
  JointPmf j({2, 3}, {0.1, 0.2, 0.1, 0.15, 0.25, 0.2});
  auto mx = j.marginal(0);
  CHECK(mx[0] == doctest::Approx(0.4));
  auto my = j.marginal(1);
  CHECK(my[1] == doctest::Approx(0.45));
  auto swapped = j.project({1, 0});
  CHECK(swapped.dims[0] == 3);
  CHECK(swapped.p[0 * 2 + 1] == doctest::Approx(j.p[1 * 3 + 0]));
}

TEST_CASE("dmc basics") {
  auto ch = Dmc::bsc(0.11);
  CHECK(ch.at(0, 1) == doctest::Approx(0.11));
  auto out = ch.output_law(Pmf({0.5, 0.5}));
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK_THROWS(Dmc(2, 2, {0.5, 0.6, 0.5, 0.5}));
}
