#pragma once
// Finite-alphabet probability substrate: distributions, channels, distortion
// measures, finite Abelian groups, information measures (bits), typicality,
// and seeded sampling.
#include <cstdint>
#include <cstddef>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace sepnet {

using Vec = std::vector<double>;

constexpr double kPmfTol = 1e-12;

struct Pmf {
  Vec p;

  Pmf() = default;
  explicit Pmf(Vec probs) : p(std::move(probs)) { validate(); }
  static Pmf uniform(std::size_t n) { return Pmf(Vec(n, 1.0 / double(n))); }
  static Pmf point_mass(std::size_t n, std::size_t at);

  std::size_t size() const { return p.size(); }
  double operator[](std::size_t i) const { return p[i]; }
  void validate() const;
};

struct JointPmf {
  std::vector<std::size_t> dims;
  Vec p;  // row-major

  JointPmf() = default;
  JointPmf(std::vector<std::size_t> d, Vec probs);
  std::size_t rank() const { return dims.size(); }
  std::size_t total() const { return p.size(); }
  void validate() const;
  Pmf marginal(std::size_t axis) const;
  // Collapse to the given axes (in order), summing out the rest.
  JointPmf project(const std::vector<std::size_t>& axes) const;
  static JointPmf from_2d(const Pmf& x, const struct Dmc& ch);
};

struct Dmc {
  std::size_t in_size = 0, out_size = 0;
  Vec t;  // row-major P(y|x)

  Dmc() = default;
  Dmc(std::size_t in, std::size_t out, Vec rows);
  double at(std::size_t x, std::size_t y) const { return t[x * out_size + y]; }
  void validate() const;
  Pmf output_law(const Pmf& input) const;
  static Dmc identity(std::size_t n);
  static Dmc bsc(double eps);
};

struct FiniteAbelianGroup {
  std::size_t order = 0;
  std::size_t identity = 0;
  std::vector<std::uint32_t> table;  // row-major a+b
  bool cyclic = false;               // true when table is mod-order addition

  static FiniteAbelianGroup make_cyclic(std::size_t q);
  static FiniteAbelianGroup from_table(std::vector<std::uint32_t> tab, std::size_t q);
  std::size_t add(std::size_t a, std::size_t b) const {
    return cyclic ? (a + b) % order : table[a * order + b];
  }
  std::size_t neg(std::size_t a) const;
  std::size_t sub(std::size_t a, std::size_t b) const { return add(a, neg(b)); }
  bool check_axioms() const;
};

// d(s, s_hat); when is_difference, d depends only on s - s_hat in the group.
struct DistortionMeasure {
  std::size_t ns = 0, nr = 0;
  Vec m;  // row-major ns x nr
  bool is_difference = false;
  Vec dvec;                                  // difference profile, indexed by group element
  std::optional<FiniteAbelianGroup> group;   // set when is_difference

  DistortionMeasure() = default;
  DistortionMeasure(std::size_t s, std::size_t r, Vec mat);
  static DistortionMeasure hamming(std::size_t n);
  static DistortionMeasure difference(const FiniteAbelianGroup& g, Vec diff_profile);
  double at(std::size_t s, std::size_t r) const { return m[s * nr + r]; }
  void validate() const;
  // min over s_hat of E d(S, s_hat): the distortion achievable at rate zero.
  double d_max(const Pmf& src) const;
  double expected(const JointPmf& joint) const;  // rank-2 (S, S_hat)
  double expected_noise(const Pmf& noise) const; // E dvec(N), difference measures
};

struct SeededRng {
  std::uint64_t seed = 0, stream_id = 0;
  std::mt19937_64 eng;

  SeededRng(std::uint64_t s, std::uint64_t stream) : seed(s), stream_id(stream) {
    eng.seed(mix(s, stream));
  }
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b);
  SeededRng child(std::uint64_t substream) const {
    return SeededRng(seed, mix(stream_id + 1, substream));
  }
  std::uint64_t next_u64() { return eng(); }
  double uniform() { return double(eng() >> 11) * 0x1.0p-53; }
  std::size_t sample(const Vec& probs);
  std::size_t sample(const Pmf& pmf) { return sample(pmf.p); }
  // Fisher-Yates over indices [0, n)
  std::vector<std::size_t> permutation(std::size_t n);
};

// --- information measures (bits) ---
double entropy(const Vec& p);
double entropy(const Pmf& p);
double mutual_information(const JointPmf& j);             // rank-2
double conditional_mutual_information(const JointPmf& j); // rank-3: I(axis0; axis1 | axis2)
double kl_divergence(const Vec& p, const Vec& q);
double tv_distance(const Vec& p, const Vec& q);

// --- group convolution: law of A + B ---
Pmf group_convolve(const Pmf& a, const Pmf& b, const FiniteAbelianGroup& g);

// --- typicality ---
std::vector<std::size_t> empirical_counts(const std::vector<std::size_t>& seq, std::size_t alphabet);
Pmf empirical_pmf(const std::vector<std::size_t>& seq, std::size_t alphabet);
bool is_strongly_typical(const std::vector<std::size_t>& seq, const Pmf& p, double delta);
bool counts_strongly_typical(const std::vector<std::size_t>& counts, std::size_t n,
                             const Pmf& p, double delta);

// Rejection sampler: i.i.d. draws from p until strongly typical.
std::vector<std::size_t> sample_typical_uniform(const Pmf& p, std::size_t n, double delta,
                                                SeededRng& rng, std::size_t budget = 10000);
// Exact sampler: a type drawn uniformly among delta-typical types, then a
// uniform arrangement. Default codebook generator.
std::vector<std::size_t> sample_typical_type_class(const Pmf& p, std::size_t n, double delta,
                                                   SeededRng& rng);
// All delta-typical types (counts vectors) for (p, n, delta).
std::vector<std::vector<std::size_t>> enumerate_typical_types(const Pmf& p, std::size_t n,
                                                              double delta);

// log (natural) of factorial / binomial / multinomial coefficients, exact cumsum table
class LogFact {
 public:
  explicit LogFact(std::size_t n_max);
  double lfact(std::size_t n) const { return tbl_[n]; }
  double lbinom(std::size_t n, std::size_t k) const {
    return tbl_[n] - tbl_[k] - tbl_[n - k];
  }
  double lmultinom(std::size_t n, const std::vector<std::size_t>& parts) const;

 private:
  Vec tbl_;
};

}  // namespace sepnet
