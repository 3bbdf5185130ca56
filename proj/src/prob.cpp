#include "sepnet/prob.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace sepnet {

namespace {
constexpr double kLog2 = 0.6931471805599453;
double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }
}  // namespace

Pmf Pmf::point_mass(std::size_t n, std::size_t at) {
  Vec v(n, 0.0);
  v.at(at) = 1.0;
  return Pmf(std::move(v));
}

void Pmf::validate() const {
  double s = 0;
  for (double x : p) {
    if (x < 0) throw std::invalid_argument("Pmf: negative probability");
    s += x;
  }
  if (p.empty() || std::abs(s - 1.0) > 1e-9)
    throw std::invalid_argument("Pmf: probabilities must sum to 1");
}

JointPmf::JointPmf(std::vector<std::size_t> d, Vec probs) : dims(std::move(d)), p(std::move(probs)) {
  validate();
}

void JointPmf::validate() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  if (n != p.size()) throw std::invalid_argument("JointPmf: dims/probs mismatch");
  double s = 0;
  for (double x : p) {
    if (x < 0) throw std::invalid_argument("JointPmf: negative probability");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-9)
    throw std::invalid_argument("JointPmf: must sum to 1, got " + std::to_string(s));
}

Pmf JointPmf::marginal(std::size_t axis) const { return Pmf(project({axis}).p); }

JointPmf JointPmf::project(const std::vector<std::size_t>& axes) const {
  std::vector<std::size_t> out_dims;
  for (auto a : axes) out_dims.push_back(dims.at(a));
  std::size_t out_total = 1;
  for (auto d : out_dims) out_total *= d;
  Vec out(out_total, 0.0);
  std::vector<std::size_t> idx(dims.size(), 0);
  for (std::size_t flat = 0; flat < p.size(); ++flat) {
    std::size_t o = 0;
    for (auto a : axes) o = o * dims[a] + idx[a];
    out[o] += p[flat];
    for (std::size_t k = dims.size(); k-- > 0;) {
      if (++idx[k] < dims[k]) break;
      idx[k] = 0;
    }
  }
  JointPmf r;
  r.dims = std::move(out_dims);
  r.p = std::move(out);
  return r;
}

JointPmf JointPmf::from_2d(const Pmf& x, const Dmc& ch) {
  if (x.size() != ch.in_size) throw std::invalid_argument("from_2d: size mismatch");
  Vec j(ch.in_size * ch.out_size);
  for (std::size_t a = 0; a < ch.in_size; ++a)
    for (std::size_t b = 0; b < ch.out_size; ++b) j[a * ch.out_size + b] = x[a] * ch.at(a, b);
  return JointPmf({ch.in_size, ch.out_size}, std::move(j));
}

Dmc::Dmc(std::size_t in, std::size_t out, Vec rows) : in_size(in), out_size(out), t(std::move(rows)) {
  validate();
}

void Dmc::validate() const {
  if (t.size() != in_size * out_size) throw std::invalid_argument("Dmc: shape mismatch");
  for (std::size_t x = 0; x < in_size; ++x) {
    double s = 0;
    for (std::size_t y = 0; y < out_size; ++y) {
      if (at(x, y) < 0) throw std::invalid_argument("Dmc: negative entry");
      s += at(x, y);
    }
    if (std::abs(s - 1.0) > 1e-9) throw std::invalid_argument("Dmc: row must sum to 1");
  }
}

Pmf Dmc::output_law(const Pmf& input) const {
  Vec out(out_size, 0.0);
  for (std::size_t x = 0; x < in_size; ++x)
    for (std::size_t y = 0; y < out_size; ++y) out[y] += input[x] * at(x, y);
  return Pmf(std::move(out));
}

Dmc Dmc::identity(std::size_t n) {
  Vec t(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
  return Dmc(n, n, std::move(t));
}

Dmc Dmc::bsc(double eps) { return Dmc(2, 2, {1 - eps, eps, eps, 1 - eps}); }

FiniteAbelianGroup FiniteAbelianGroup::make_cyclic(std::size_t q) {
  FiniteAbelianGroup g;
  g.order = q;
  g.identity = 0;
  g.cyclic = true;
  return g;
}

FiniteAbelianGroup FiniteAbelianGroup::from_table(std::vector<std::uint32_t> tab, std::size_t q) {
  FiniteAbelianGroup g;
  g.order = q;
  g.table = std::move(tab);
  g.cyclic = false;
  // locate identity
  bool found = false;
  for (std::size_t e = 0; e < q && !found; ++e) {
    bool ok = true;
    for (std::size_t a = 0; a < q; ++a)
      if (g.table[e * q + a] != a) { ok = false; break; }
    if (ok) { g.identity = e; found = true; }
  }
  if (!found || !g.check_axioms()) throw std::invalid_argument("group table fails axioms");
  return g;
}

std::size_t FiniteAbelianGroup::neg(std::size_t a) const {
  if (cyclic) return a == 0 ? 0 : order - a;
  for (std::size_t b = 0; b < order; ++b)
    if (add(a, b) == identity) return b;
  throw std::logic_error("group element without inverse");
}

bool FiniteAbelianGroup::check_axioms() const {
  if (cyclic) return order > 0;
  const std::size_t q = order;
  if (table.size() != q * q) return false;
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b) {
      if (table[a * q + b] >= q) return false;
      if (table[a * q + b] != table[b * q + a]) return false;  // commutative
    }
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b)
      for (std::size_t c = 0; c < q; ++c)
        if (add(add(a, b), c) != add(a, add(b, c))) return false;
  for (std::size_t a = 0; a < q; ++a) {
    if (add(identity, a) != a) return false;
    bool inv = false;
    for (std::size_t b = 0; b < q; ++b)
      if (add(a, b) == identity) inv = true;
    if (!inv) return false;
  }
  return true;
}

DistortionMeasure::DistortionMeasure(std::size_t s, std::size_t r, Vec mat)
    : ns(s), nr(r), m(std::move(mat)) {
  validate();
}

DistortionMeasure DistortionMeasure::hamming(std::size_t n) {
  Vec mat(n * n, 1.0);
  for (std::size_t i = 0; i < n; ++i) mat[i * n + i] = 0.0;
  DistortionMeasure d(n, n, std::move(mat));
  d.is_difference = true;
  d.group = FiniteAbelianGroup::make_cyclic(n);
  d.dvec.assign(n, 1.0);
  d.dvec[0] = 0.0;
  return d;
}

DistortionMeasure DistortionMeasure::difference(const FiniteAbelianGroup& g, Vec diff_profile) {
  if (diff_profile.size() != g.order) throw std::invalid_argument("difference profile size");
  const std::size_t q = g.order;
  Vec mat(q * q);
  for (std::size_t s = 0; s < q; ++s)
    for (std::size_t r = 0; r < q; ++r) mat[s * q + r] = diff_profile[g.sub(s, r)];
  DistortionMeasure d(q, q, std::move(mat));
  d.is_difference = true;
  d.group = g;
  d.dvec = std::move(diff_profile);
  return d;
}

void DistortionMeasure::validate() const {
  if (m.size() != ns * nr) throw std::invalid_argument("distortion: shape mismatch");
  for (std::size_t s = 0; s < ns; ++s) {
    double mn = 1e300;
    for (std::size_t r = 0; r < nr; ++r) {
      if (at(s, r) < 0) throw std::invalid_argument("distortion: negative entry");
      mn = std::min(mn, at(s, r));
    }
    if (mn > 1e-12) throw std::invalid_argument("distortion: row minimum must be zero");
  }
}

double DistortionMeasure::d_max(const Pmf& src) const {
  double best = 1e300;
  for (std::size_t r = 0; r < nr; ++r) {
    double e = 0;
    for (std::size_t s = 0; s < ns; ++s) e += src[s] * at(s, r);
    best = std::min(best, e);
  }
  return best;
}

double DistortionMeasure::expected(const JointPmf& joint) const {
  if (joint.rank() != 2 || joint.dims[0] != ns || joint.dims[1] != nr)
    throw std::invalid_argument("expected: joint shape mismatch");
  double e = 0;
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t r = 0; r < nr; ++r) e += joint.p[s * nr + r] * at(s, r);
  return e;
}

double DistortionMeasure::expected_noise(const Pmf& noise) const {
  if (!is_difference || noise.size() != dvec.size())
    throw std::invalid_argument("expected_noise: needs difference measure");
  double e = 0;
  for (std::size_t i = 0; i < dvec.size(); ++i) e += noise[i] * dvec[i];
  return e;
}

std::uint64_t SeededRng::mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t SeededRng::sample(const Vec& probs) {
  double u = uniform(), c = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    c += probs[i];
    if (u < c) return i;
  }
  return probs.size() - 1;
}

std::vector<std::size_t> SeededRng::permutation(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = std::size_t(uniform() * double(i));
    if (j >= i) j = i - 1;
    std::swap(v[i - 1], v[j]);
  }
  return v;
}

double entropy(const Vec& p) {
  double h = 0;
  for (double x : p) h -= xlogx(x);
  return h / kLog2;
}

double entropy(const Pmf& p) { return entropy(p.p); }

double mutual_information(const JointPmf& j) {
  if (j.rank() != 2) throw std::invalid_argument("mutual_information: rank-2 required");
  const auto mx = j.project({0}).p, my = j.project({1}).p;
  return entropy(mx) + entropy(my) - entropy(j.p);
}

double conditional_mutual_information(const JointPmf& j) {
  if (j.rank() != 3) throw std::invalid_argument("cmi: rank-3 required");
  // I(X;Y|Z) = H(XZ) + H(YZ) - H(Z) - H(XYZ)
  const auto xz = j.project({0, 2}).p, yz = j.project({1, 2}).p, z = j.project({2}).p;
  return entropy(xz) + entropy(yz) - entropy(z) - entropy(j.p);
}

double kl_divergence(const Vec& p, const Vec& q) {
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) {
      if (q[i] <= 0) return 1e300;
      d += p[i] * std::log(p[i] / q[i]);
    }
  }
  return d / kLog2;
}

double tv_distance(const Vec& p, const Vec& q) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

Pmf group_convolve(const Pmf& a, const Pmf& b, const FiniteAbelianGroup& g) {
  if (a.size() != g.order || b.size() != g.order)
    throw std::invalid_argument("group_convolve: size mismatch");
  Vec out(g.order, 0.0);
  for (std::size_t i = 0; i < g.order; ++i)
    for (std::size_t j = 0; j < g.order; ++j) out[g.add(i, j)] += a[i] * b[j];
  return Pmf(std::move(out));
}

std::vector<std::size_t> empirical_counts(const std::vector<std::size_t>& seq, std::size_t alphabet) {
  std::vector<std::size_t> c(alphabet, 0);
  for (auto s : seq) c.at(s)++;
  return c;
}

Pmf empirical_pmf(const std::vector<std::size_t>& seq, std::size_t alphabet) {
  auto c = empirical_counts(seq, alphabet);
  Vec p(alphabet);
  for (std::size_t i = 0; i < alphabet; ++i) p[i] = double(c[i]) / double(seq.size());
  return Pmf(std::move(p));
}

bool counts_strongly_typical(const std::vector<std::size_t>& counts, std::size_t n,
                             const Pmf& p, double delta) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    double f = double(counts[i]) / double(n);
    if (p[i] <= 0 && counts[i] > 0) return false;
    if (std::abs(f - p[i]) > delta) return false;
  }
  return true;
}

bool is_strongly_typical(const std::vector<std::size_t>& seq, const Pmf& p, double delta) {
  return counts_strongly_typical(empirical_counts(seq, p.size()), seq.size(), p, delta);
}

std::vector<std::size_t> sample_typical_uniform(const Pmf& p, std::size_t n, double delta,
                                                SeededRng& rng, std::size_t budget) {
  for (std::size_t tries = 0; tries < budget; ++tries) {
    std::vector<std::size_t> seq(n);
    for (auto& s : seq) s = rng.sample(p);
    if (is_strongly_typical(seq, p, delta)) return seq;
  }
  throw std::runtime_error("sample_typical_uniform: rejection budget exhausted (n too small for delta)");
}

std::vector<std::vector<std::size_t>> enumerate_typical_types(const Pmf& p, std::size_t n,
                                                              double delta) {
  const std::size_t A = p.size();
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(A, 0);
  // recursive composition enumeration with per-symbol typicality windows
  auto lo_hi = [&](std::size_t a) {
    if (p[a] <= 0) return std::pair<std::size_t, std::size_t>{0, 0};
    double lo = (p[a] - delta) * double(n), hi = (p[a] + delta) * double(n);
    std::size_t l = lo <= 0 ? 0 : std::size_t(std::ceil(lo - 1e-9));
    std::size_t h = std::min<std::size_t>(n, std::size_t(std::floor(hi + 1e-9)));
    return std::pair<std::size_t, std::size_t>{l, h};
  };
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t a, std::size_t used) {
    if (a + 1 == A) {
      std::size_t rem = n - used;
      auto [l, h] = lo_hi(a);
      if (rem >= l && rem <= h) {
        cur[a] = rem;
        out.push_back(cur);
      }
      return;
    }
    auto [l, h] = lo_hi(a);
    for (std::size_t k = l; k <= h && used + k <= n; ++k) {
      cur[a] = k;
      rec(a + 1, used + k);
    }
  };
  rec(0, 0);
  return out;
}

std::vector<std::size_t> sample_typical_type_class(const Pmf& p, std::size_t n, double delta,
                                                   SeededRng& rng) {
  auto types = enumerate_typical_types(p, n, delta);
  if (types.empty()) throw std::runtime_error("sample_typical_type_class: empty typical set");
  std::size_t pick = std::size_t(rng.uniform() * double(types.size()));
  if (pick >= types.size()) pick = types.size() - 1;
  const auto& counts = types[pick];
  std::vector<std::size_t> seq;
  seq.reserve(n);
  for (std::size_t a = 0; a < counts.size(); ++a)
    seq.insert(seq.end(), counts[a], a);
  auto perm = rng.permutation(n);
  std::vector<std::size_t> shuffled(n);
  for (std::size_t i = 0; i < n; ++i) shuffled[i] = seq[perm[i]];
  return shuffled;
}

LogFact::LogFact(std::size_t n_max) : tbl_(n_max + 1, 0.0) {
  for (std::size_t i = 1; i <= n_max; ++i) tbl_[i] = tbl_[i - 1] + std::log(double(i));
}

double LogFact::lmultinom(std::size_t n, const std::vector<std::size_t>& parts) const {
  double v = tbl_[n];
  for (auto k : parts) v -= tbl_[k];
  return v;
}

}  // namespace sepnet
