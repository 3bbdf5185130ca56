#include "sepnet/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sepnet {

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double logsumexp(const Vec& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (mx == kNegInf) return kNegInf;
  double s = 0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// --- node/code indexing helpers -------------------------------------------

std::vector<std::size_t> observed_sources(const NetworkSpec& spec, std::size_t node) {
  std::vector<std::size_t> obs;
  for (const auto& src : spec.sources)
    if (src.placement.count(node)) obs.push_back(src.id);
  return obs;
}

std::vector<std::size_t> incoming_edges(const NetworkSpec& spec, std::size_t node) {
  std::vector<std::size_t> in;
  for (std::size_t e = 0; e < spec.edges.size(); ++e)
    if (spec.edges[e].to == node) in.push_back(e);
  return in;
}

// local source block index at a node for a given joint realization (m = 1)
std::size_t local_source_index(const NetworkSpec& spec, std::size_t node,
                               const std::vector<std::size_t>& s_vals) {
  std::size_t idx = 0;
  for (std::size_t k : observed_sources(spec, node))
    idx = idx * spec.joint_source_law.dims[k - 1] + s_vals[k - 1];
  return idx;
}

}  // namespace

BaseJointCode BaseJointCode::identity_for(const NetworkSpec& spec) {
  BaseJointCode b;
  b.m = 1;
  b.n = 1;
  b.encoders.resize(spec.edges.size());
  for (std::size_t e = 0; e < spec.edges.size(); ++e) {
    const auto& edge = spec.edges[e];
    auto obs = observed_sources(spec, edge.from);
    if (obs.size() != 1)
      throw std::invalid_argument(
          "identity base code: sending node must observe exactly one source");
    std::size_t alpha = spec.joint_source_law.dims[obs[0] - 1];
    if (edge.channel.in_size != alpha)
      throw std::invalid_argument("identity base code: channel input alphabet mismatch");
    std::vector<std::uint32_t> table(alpha);
    for (std::size_t s = 0; s < alpha; ++s) table[s] = std::uint32_t(s);
    b.encoders[e].push_back(std::move(table));
  }
  for (const auto& [node, srcs] : spec.demands) {
    auto in = incoming_edges(spec, node);
    std::size_t rx_total = 1;
    for (std::size_t e : in) rx_total *= spec.edges[e].channel.out_size;
    auto obs = observed_sources(spec, node);
    std::size_t local = 1;
    for (std::size_t k : obs) local *= spec.joint_source_law.dims[k - 1];
    for (std::size_t k : srcs) {
      // reconstruct source k from the unique edge whose sender observes it
      long use_edge = -1;
      for (std::size_t pos = 0; pos < in.size(); ++pos) {
        auto sender_obs = observed_sources(spec, spec.edges[in[pos]].from);
        if (sender_obs.size() == 1 && sender_obs[0] == k) use_edge = long(pos);
      }
      if (use_edge < 0)
        throw std::invalid_argument("identity base code: no incoming edge carries source " +
                                    std::to_string(k));
      std::vector<std::uint32_t> table(local * rx_total);
      for (std::size_t li = 0; li < local; ++li)
        for (std::size_t rx = 0; rx < rx_total; ++rx) {
          // unpack the rx index (edge order = `in`, most significant first)
          std::size_t rem = rx, y = 0;
          for (std::size_t pos = in.size(); pos-- > 0;) {
            std::size_t sz = spec.edges[in[pos]].channel.out_size;
            std::size_t sym = rem % sz;
            rem /= sz;
            if (long(pos) == use_edge) y = sym;
          }
          table[li * rx_total + rx] = std::uint32_t(y);
        }
      b.decoders[{k, node}] = std::move(table);
    }
  }
  return b;
}

BaseCodeAnalysis analyze_base_code(const NetworkSpec& spec, const BaseJointCode& base,
                                   const SolverConfig& cfg) {
  spec.validate();
  if (base.m != 1 || base.n != 1)
    throw std::invalid_argument("analyze_base_code: only m = n = 1 block codes are supported");
  if (base.encoders.size() != spec.edges.size())
    throw std::invalid_argument("analyze_base_code: one encoder per edge required");

  BaseCodeAnalysis a;
  a.edge_capacities = edge_capacities(spec, cfg);

  // forward enumeration state: joint source realization x all edge outputs
  std::size_t states = spec.joint_source_law.total();
  for (const auto& e : spec.edges) states *= e.channel.out_size;
  if (states > kEnumerationCap)
    throw std::runtime_error("analyze_base_code: enumeration cap exceeded (" +
                             std::to_string(states) + " states)");

  const std::size_t E = spec.edges.size();
  a.edge_session_joints.resize(E);
  a.edge_session_info.resize(E);

  // x symbol per edge given the source realization (single session, no history)
  std::vector<std::vector<std::size_t>> s_vals_of_flat;
  {
    std::vector<std::size_t> idx(spec.joint_source_law.rank(), 0);
    for (std::size_t flat = 0; flat < spec.joint_source_law.total(); ++flat) {
      s_vals_of_flat.push_back(idx);
      for (std::size_t ax = idx.size(); ax-- > 0;) {
        if (++idx[ax] < spec.joint_source_law.dims[ax]) break;
        idx[ax] = 0;
      }
    }
  }
  auto encode_edge = [&](std::size_t e, const std::vector<std::size_t>& s_vals) {
    std::size_t li = local_source_index(spec, spec.edges[e].from, s_vals);
    const auto& table = base.encoders[e][0];
    if (li >= table.size())
      throw std::invalid_argument("analyze_base_code: encoder table too small for edge " +
                                  std::to_string(e));
    return std::size_t(table[li]);
  };

  for (std::size_t e = 0; e < E; ++e) {
    const Dmc& ch = spec.edges[e].channel;
    Vec jp(ch.in_size * ch.out_size, 0.0);
    for (std::size_t flat = 0; flat < spec.joint_source_law.total(); ++flat) {
      double ps = spec.joint_source_law.p[flat];
      if (ps <= 0) continue;
      std::size_t x = encode_edge(e, s_vals_of_flat[flat]);
      for (std::size_t y = 0; y < ch.out_size; ++y)
        jp[x * ch.out_size + y] += ps * ch.at(x, y);
    }
    JointPmf j({ch.in_size, ch.out_size}, jp);
    a.edge_session_joints[e].push_back(j);
    a.edge_session_info[e].push_back(mutual_information(j));
  }

  // exact demand joints: enumerate (source realization, all edge outputs)
  for (const auto& [node, srcs] : spec.demands) {
    auto in = incoming_edges(spec, node);
    std::size_t rx_total = 1;
    for (std::size_t e : in) rx_total *= spec.edges[e].channel.out_size;
    for (std::size_t k : srcs) {
      auto dit = base.decoders.find({k, node});
      if (dit == base.decoders.end())
        throw std::invalid_argument("analyze_base_code: missing decoder for source " +
                                    std::to_string(k) + " at node " + std::to_string(node));
      const auto& dec = dit->second;
      const std::size_t ns = spec.joint_source_law.dims[k - 1];
      const std::size_t nr = spec.distortion_measures[k - 1].nr;
      Vec jp(ns * nr, 0.0);
      for (std::size_t flat = 0; flat < spec.joint_source_law.total(); ++flat) {
        double ps = spec.joint_source_law.p[flat];
        if (ps <= 0) continue;
        const auto& s_vals = s_vals_of_flat[flat];
        std::size_t li = local_source_index(spec, node, s_vals);
        // enumerate all rx combinations with their channel probabilities
        for (std::size_t rx = 0; rx < rx_total; ++rx) {
          double py = 1.0;
          std::size_t rem = rx;
          for (std::size_t pos = in.size(); pos-- > 0;) {
            const Dmc& ch = spec.edges[in[pos]].channel;
            std::size_t y = rem % ch.out_size;
            rem /= ch.out_size;
            std::size_t x = encode_edge(in[pos], s_vals);
            py *= ch.at(x, y);
          }
          if (py <= 0) continue;
          std::size_t shat = dec.at(li * rx_total + rx);
          if (shat >= nr)
            throw std::invalid_argument("analyze_base_code: decoder output out of range");
          jp[s_vals[k - 1] * nr + shat] += ps * py;
        }
      }
      JointPmf j({ns, nr}, jp);
      a.demand_joints.emplace(std::make_pair(k, node), j);
      a.exact_distortions[{k, node}] = spec.distortion_measures[k - 1].expected(j);
    }
  }
  return a;
}

// --- covering engine -------------------------------------------------------

double log_miss_probability(double log_p_single, double log2_count) {
  if (log_p_single >= 0) return kNegInf;  // certain cover per codeword
  if (log_p_single == kNegInf) return 0.0;
  const double logM = log2_count * kLog2;  // natural log of the codeword count
  // ln P(miss) = M * ln(1-p) = -exp(logM + ln(-ln(1-p))), evaluated fully in
  // the log domain so that neither M nor 1/p can overflow or underflow.
  // For small p, ln(-ln(1-p)) = ln(p) + O(p), so below the exp underflow
  // threshold the inner log is log_p_single itself.
  double ln_neg_ln1mp;
  if (log_p_single > -36.0) {
    ln_neg_ln1mp = std::log(-std::log1p(-std::exp(log_p_single)));
  } else {
    ln_neg_ln1mp = log_p_single;
  }
  const double a = logM + ln_neg_ln1mp;
  if (a > 700) return kNegInf;
  return -std::exp(a);
}

namespace {

struct TableSet {
  std::vector<std::vector<std::vector<std::size_t>>> tables;
  Vec log_weights;                 // placement log-probability (without 1/T)
  double log_type_count = kNegInf;  // ln T, typical output types
};

// enumerate delta-typical output types (counts over the y alphabet) and joint
// tables consistent with the x counts and the per-cell typicality windows
TableSet enumerate_tables(const std::vector<std::size_t>& x_counts, const JointPmf& joint,
                          double delta, const LogFact& lf, bool conditional) {
  const std::size_t nx = joint.dims[0], ny = joint.dims[1];
  std::size_t n = 0;
  for (std::size_t c : x_counts) n += c;
  Pmf py = joint.marginal(1);
  Pmf px = joint.marginal(0);

  // typical y-type windows (joint mode only)
  std::vector<long> lo(ny), hi(ny);
  for (std::size_t y = 0; y < ny; ++y) {
    if (py[y] <= 0) { lo[y] = hi[y] = 0; continue; }
    lo[y] = std::max<long>(0, long(std::ceil(double(n) * (py[y] - delta))));
    hi[y] = std::min<long>(long(n), long(std::floor(double(n) * (py[y] + delta))));
  }

  TableSet ts;
  if (!conditional) {
    std::size_t type_count = 0;
    // recursive count of compositions of n within the per-symbol windows
    std::function<void(std::size_t, long)> rec = [&](std::size_t y, long rem) {
      if (type_count > kEnumerationCap)
        throw std::runtime_error("covering: output-type enumeration cap exceeded");
      if (y + 1 == ny) {
        long last = rem;
        if (last >= lo[y] && last <= hi[y]) ++type_count;
        return;
      }
      for (long c = lo[y]; c <= hi[y] && c <= rem; ++c) rec(y + 1, rem - c);
    };
    rec(0, long(n));
    if (type_count == 0) return ts;
    ts.log_type_count = std::log(double(type_count));
  }

  // per-cell windows: joint mode bounds k[x][y]/n around P(x,y); conditional
  // mode bounds k[x][y]/n_x around P(y|x), so the windows move with the
  // observed input counts and stay feasible under input-type fluctuation
  std::vector<long> clo(nx * ny), chi(nx * ny);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      double pxy = joint.p[x * ny + y];
      if (pxy <= 0) { clo[x * ny + y] = chi[x * ny + y] = 0; continue; }
      if (conditional) {
        const double scale = double(x_counts[x]);
        const double cond = pxy / px[x];
        clo[x * ny + y] = std::max<long>(0, long(std::ceil(scale * (cond - delta))));
        chi[x * ny + y] = std::min<long>(long(scale), long(std::floor(scale * (cond + delta))));
      } else {
        clo[x * ny + y] = std::max<long>(0, long(std::ceil(double(n) * (pxy - delta))));
        chi[x * ny + y] = std::min<long>(long(n), long(std::floor(double(n) * (pxy + delta))));
      }
    }

  // enumerate tables row by row, cells within windows, rows summing to x_counts
  std::vector<std::vector<std::size_t>> table(nx, std::vector<std::size_t>(ny, 0));
  std::function<void(std::size_t, std::size_t, long, double)> rec =
      [&](std::size_t x, std::size_t y, long row_rem, double lw) {
        if (ts.tables.size() > kEnumerationCap)
          throw std::runtime_error("covering: table enumeration cap exceeded");
        if (x == nx) {
          std::vector<std::size_t> m(ny, 0);
          for (std::size_t yy = 0; yy < ny; ++yy)
            for (std::size_t xx = 0; xx < nx; ++xx) m[yy] += table[xx][yy];
          double lp;
          if (conditional) {
            // i.i.d. codebook: P(table) = prod_x multinom(n_x; row) * prod_y Q(y)^m_y
            lp = lw;
            for (std::size_t yy = 0; yy < ny; ++yy)
              if (m[yy] > 0) lp += double(m[yy]) * std::log(py[yy]);
          } else {
            // column sums must form a typical y type
            for (std::size_t yy = 0; yy < ny; ++yy)
              if (long(m[yy]) < lo[yy] || long(m[yy]) > hi[yy]) return;
            // placement probability: rows multinomial over the codeword type
            lp = lw - lf.lmultinom(n, m);
          }
          ts.tables.push_back(table);
          ts.log_weights.push_back(lp);
          return;
        }
        if (y + 1 == ny) {
          long c = row_rem;
          if (c < clo[x * ny + y] || c > chi[x * ny + y]) return;
          table[x][y] = std::size_t(c);
          std::vector<std::size_t> row(table[x].begin(), table[x].end());
          rec(x + 1, 0, x + 1 < nx ? long(x_counts[x + 1]) : 0,
              lw + lf.lmultinom(x_counts[x], row));
          return;
        }
        for (long c = clo[x * ny + y]; c <= chi[x * ny + y] && c <= row_rem; ++c) {
          table[x][y] = std::size_t(c);
          rec(x, y + 1, row_rem - c, lw);
        }
      };
  rec(0, 0, nx > 0 ? long(x_counts[0]) : 0, 0.0);
  return ts;
}

}  // namespace

CoveringOutcome simulate_covering(const std::vector<std::size_t>& x_counts,
                                  const JointPmf& joint_xy, double delta, double rate_bits,
                                  SeededRng& rng, bool conditional) {
  if (joint_xy.rank() != 2) throw std::invalid_argument("covering: rank-2 joint required");
  if (x_counts.size() != joint_xy.dims[0])
    throw std::invalid_argument("covering: input count vector size mismatch");
  std::size_t n = 0;
  for (std::size_t c : x_counts) n += c;
  if (n == 0) throw std::invalid_argument("covering: empty block");

  LogFact fact(n + 1);

  CoveringOutcome out;
  auto ts = enumerate_tables(x_counts, joint_xy, delta, fact, conditional);
  if (ts.tables.empty()) {
    out.log_cover_prob_single = kNegInf;
    out.log_miss_prob = 0.0;
    out.covered = false;
    return out;
  }
  out.log_cover_prob_single =
      logsumexp(ts.log_weights) - (conditional ? 0.0 : ts.log_type_count);
  const double rate_total = rate_bits * double(n);
  out.log_miss_prob = log_miss_probability(out.log_cover_prob_single, rate_total);
  out.covered = std::log(std::max(rng.uniform(), 1e-300)) >= out.log_miss_prob;
  if (!out.covered) return out;

  // conditional joint type of the selected codeword: proportional to weight
  double total = logsumexp(ts.log_weights);
  double u = rng.uniform();
  double acc = 0;
  std::size_t pick = ts.tables.size() - 1;
  for (std::size_t i = 0; i < ts.tables.size(); ++i) {
    acc += std::exp(ts.log_weights[i] - total);
    if (u <= acc) { pick = i; break; }
  }
  out.table = ts.tables[pick];
  double tv = 0;
  const std::size_t ny = joint_xy.dims[1];
  for (std::size_t x = 0; x < joint_xy.dims[0]; ++x)
    for (std::size_t y = 0; y < ny; ++y)
      tv += std::abs(double(out.table[x][y]) / double(n) - joint_xy.p[x * ny + y]);
  out.tv = 0.5 * tv;
  return out;
}

std::vector<std::size_t> place_outputs(const std::vector<std::size_t>& xs,
                                       const std::vector<std::vector<std::size_t>>& table,
                                       std::size_t out_alphabet, SeededRng& rng) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> ys(n, 0);
  const std::size_t nx = table.size();
  for (std::size_t a = 0; a < nx; ++a) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < n; ++i)
      if (xs[i] == a) pos.push_back(i);
    std::size_t expect = 0;
    for (std::size_t y = 0; y < out_alphabet; ++y) expect += table[a][y];
    if (expect != pos.size())
      throw std::invalid_argument("place_outputs: table row inconsistent with input counts");
    auto perm = rng.permutation(pos.size());
    std::size_t cursor = 0;
    for (std::size_t y = 0; y < out_alphabet; ++y)
      for (std::size_t c = 0; c < table[a][y]; ++c) ys[pos[perm[cursor++]]] = y;
  }
  return ys;
}

double log2_competitor_typical_prob(const Pmf& law, const JointPmf& joint,
                                    const std::vector<std::size_t>& other_counts,
                                    std::size_t n, double delta) {
  if (joint.rank() != 2) throw std::invalid_argument("competitor: rank-2 joint required");
  const std::size_t ns = joint.dims[0], nb = joint.dims[1];
  if (law.size() != ns) throw std::invalid_argument("competitor: law alphabet mismatch");
  if (other_counts.size() != nb)
    throw std::invalid_argument("competitor: fixed-sequence counts mismatch");

  // the drawn sequence's own empirical entropy must land in the window; with a
  // uniform-on-support law this holds with certainty
  double first_logp = 0;
  bool first_set = false;
  for (std::size_t s = 0; s < ns; ++s) {
    if (law[s] <= 0) continue;
    if (!first_set) { first_logp = std::log2(law[s]); first_set = true; }
    else if (std::abs(std::log2(law[s]) - first_logp) > 1e-12)
      throw std::runtime_error(
          "competitor analysis: requires a generation law uniform on its support");
  }

  // per-position joint log-probability values; must be identical across fixed
  // symbols and collapse to at most two distinct values
  std::vector<std::pair<double, double>> dist;  // (value, prob) of the first class
  bool dist_set = false;
  for (std::size_t b = 0; b < nb; ++b) {
    if (other_counts[b] == 0) continue;
    std::vector<std::pair<double, double>> cur;
    for (std::size_t s = 0; s < ns; ++s) {
      if (law[s] <= 0) continue;
      double pj = joint.p[s * nb + b];
      double v = pj > 0 ? std::log2(pj) : -1e9;
      bool merged = false;
      for (auto& [val, pr] : cur)
        if (std::abs(val - v) <= 1e-12) { pr += law[s]; merged = true; break; }
      if (!merged) cur.emplace_back(v, law[s]);
    }
    std::sort(cur.begin(), cur.end());
    if (!dist_set) { dist = cur; dist_set = true; }
    else {
      if (cur.size() != dist.size())
        throw std::runtime_error("competitor analysis: value classes differ across symbols");
      for (std::size_t i = 0; i < cur.size(); ++i)
        if (std::abs(cur[i].first - dist[i].first) > 1e-12 ||
            std::abs(cur[i].second - dist[i].second) > 1e-12)
          throw std::runtime_error("competitor analysis: value classes differ across symbols");
    }
  }
  if (!dist_set) throw std::invalid_argument("competitor: empty fixed sequence");
  if (dist.size() > 2)
    throw std::runtime_error(
        "competitor analysis: more than two per-position likelihood values unsupported");

  // joint entropy target
  double hj = 0;
  for (double p : joint.p)
    if (p > 0) hj -= p * std::log2(p);

  if (dist.size() == 1) {
    // deterministic sum: typical iff the single value matches the entropy
    double dev = std::abs(-dist[0].first - hj);
    return dev <= delta ? 0.0 : kNegInf;
  }
  // two values: the count k of value-2 positions is Binomial(n, p2); the sum
  // -(1/n) log2 P = -(v1 + k/n (v2 - v1)); window |sum - hj| <= delta
  const double v1 = dist[0].first, v2 = dist[1].first, p2 = dist[1].second;
  const double dv = v2 - v1;
  // -(v1 + (k/n) dv) in [hj - delta, hj + delta]
  double alo = (-(hj + delta) - v1) / dv;
  double ahi = (-(hj - delta) - v1) / dv;
  if (alo > ahi) std::swap(alo, ahi);
  long klo = std::max<long>(0, long(std::ceil(alo * double(n) - 1e-9)));
  long khi = std::min<long>(long(n), long(std::floor(ahi * double(n) + 1e-9)));
  if (klo > khi) return kNegInf;
  LogFact lf(n + 1);
  Vec terms;
  const double l2p2 = std::log(p2), l2p1 = std::log(1 - p2);
  for (long k = klo; k <= khi; ++k)
    terms.push_back(lf.lbinom(n, std::size_t(k)) + double(k) * l2p2 +
                    double(long(n) - k) * l2p1);
  return logsumexp(terms) / kLog2;
}

std::string SimReport::to_csv() const {
  std::ostringstream os;
  os << "trial,e1,e2,e3,distortion,tv\n";
  for (const auto& r : rows)
    os << r.trial << ',' << r.e1 << ',' << r.e2 << ',' << r.e3 << ',' << r.distortion << ','
       << r.tv << '\n';
  return os.str();
}

// --- experiments -----------------------------------------------------------

SimReport channel_simulation_experiment(const Dmc& ch, const Pmf& input_law,
                                        std::size_t n_prime, double delta, double rate_margin,
                                        long trials, SeededRng& rng) {
  if (n_prime == 0 || trials <= 0)
    throw std::invalid_argument("channel simulation: n_prime and trials must be positive");
  auto joint = JointPmf::from_2d(input_law, ch);
  const double info = mutual_information(joint);
  const double rate = info + rate_margin;

  SimReport rep;
  rep.trials = trials;
  rep.n_prime = n_prime;
  rep.delta = delta;
  rep.seed = rng.seed;
  rep.stream = rng.stream_id;
  rep.rates = {rate};

  double tv_sum = 0;
  long tv_count = 0;
  for (long t = 0; t < trials; ++t) {
    auto trng = rng.child(std::uint64_t(t));
    // draw the input block i.i.d.; only its counts matter downstream
    std::vector<std::size_t> counts(input_law.size(), 0);
    for (std::size_t i = 0; i < n_prime; ++i) ++counts[trng.sample(input_law)];
    TrialRow row;
    row.trial = t;
    if (!counts_strongly_typical(counts, n_prime, input_law, delta)) row.e1 = 1;
    auto cov = simulate_covering(counts, joint, delta, std::max(rate, 0.0), trng);
    if (!cov.covered) {
      row.e2 = 1;
      row.tv = 1.0;
    } else {
      row.tv = cov.tv;
      tv_sum += cov.tv;
      ++tv_count;
    }
    rep.e1 += row.e1;
    rep.e2 += row.e2;
    rep.rows.push_back(row);
  }
  rep.mean_tv = tv_count > 0 ? tv_sum / double(tv_count) : 1.0;
  long bad = 0;
  for (const auto& r : rep.rows) bad += (r.e1 || r.e2 || r.e3) ? 1 : 0;
  rep.error_rate = double(bad) / double(trials);
  return rep;
}

SimReport dnjscc_separation_experiment(const NetworkSpec& spec, const BaseJointCode& base,
                                       std::size_t n_prime, double delta, long trials,
                                       SeededRng& rng, const SolverConfig& cfg) {
  auto analysis = analyze_base_code(spec, base, cfg);
  const std::size_t E = spec.edges.size();

  SimReport rep;
  rep.trials = trials;
  rep.n_prime = n_prime;
  rep.delta = delta;
  rep.seed = rng.seed;
  rep.stream = rng.stream_id;

  // per-edge codebook rates, with the capacity accounting assertion
  for (std::size_t e = 0; e < E; ++e) {
    double info = analysis.edge_session_info[e][0];
    if (info > analysis.edge_capacities[e] + delta + 1e-9)
      throw std::runtime_error(
          "dnjscc experiment: session information rate exceeds edge capacity plus delta on edge " +
          std::to_string(e));
    rep.rates.push_back(info + delta);
  }

  std::map<std::pair<std::size_t, std::size_t>, double> dist_sums;
  double tv_sum = 0;
  long tv_count = 0;

  for (long t = 0; t < trials; ++t) {
    auto trng = rng.child(std::uint64_t(t));
    // draw n_prime joint source realizations
    std::vector<std::size_t> flat(n_prime);
    for (auto& f : flat) f = trng.sample(spec.joint_source_law.p);
    // unpack per-source symbols
    std::vector<std::vector<std::size_t>> s_vals(n_prime,
                                                 std::vector<std::size_t>(spec.sources.size()));
    for (std::size_t v = 0; v < n_prime; ++v) {
      std::size_t rem = flat[v];
      for (std::size_t ax = spec.sources.size(); ax-- > 0;) {
        s_vals[v][ax] = rem % spec.joint_source_law.dims[ax];
        rem /= spec.joint_source_law.dims[ax];
      }
    }
    TrialRow row;
    row.trial = t;
    double trial_tv = 0;
    long trial_tv_n = 0;

    // simulate each edge's channel via the covering construction
    std::vector<std::vector<std::size_t>> y_sim(E);
    for (std::size_t e = 0; e < E; ++e) {
      const auto& joint = analysis.edge_session_joints[e][0];
      std::vector<std::size_t> xs(n_prime);
      for (std::size_t v = 0; v < n_prime; ++v) {
        std::size_t li = local_source_index(spec, spec.edges[e].from, s_vals[v]);
        xs[v] = base.encoders[e][0].at(li);
      }
      std::vector<std::size_t> counts(spec.edges[e].channel.in_size, 0);
      for (std::size_t x : xs) ++counts[x];
      if (!counts_strongly_typical(counts, n_prime, Pmf(joint.marginal(0)), delta)) row.e1 = 1;
      auto erng = trng.child(e);
      // conditional windows: feasibility must not hinge on the input block's
      // own type fluctuation, only the codebook has to cover the block
      auto cov = simulate_covering(counts, joint, delta, rep.rates[e], erng, true);
      if (!cov.covered) {
        row.e2 = 1;
        // declared error: substitute an independent draw from the output law
        auto py = joint.marginal(1);
        y_sim[e].resize(n_prime);
        for (auto& y : y_sim[e]) y = erng.sample(py);
      } else {
        trial_tv += cov.tv;
        ++trial_tv_n;
        y_sim[e] = place_outputs(xs, cov.table, spec.edges[e].channel.out_size, erng);
      }
    }
    if (trial_tv_n > 0) {
      tv_sum += trial_tv / double(trial_tv_n);
      ++tv_count;
      row.tv = trial_tv / double(trial_tv_n);
    } else {
      row.tv = 1.0;
    }

    // decode and account distortions
    double dist_acc = 0;
    std::size_t dist_terms = 0;
    for (const auto& [node, srcs] : spec.demands) {
      auto in = incoming_edges(spec, node);
      std::size_t rx_total = 1;
      for (std::size_t e : in) rx_total *= spec.edges[e].channel.out_size;
      for (std::size_t k : srcs) {
        const auto& dec = base.decoders.at({k, node});
        const auto& meas = spec.distortion_measures[k - 1];
        const std::size_t nr = meas.nr;
        std::vector<std::size_t> recon(n_prime);
        double dsum = 0;
        std::vector<std::size_t> pair_counts(spec.joint_source_law.dims[k - 1] * nr, 0);
        for (std::size_t v = 0; v < n_prime; ++v) {
          std::size_t li = local_source_index(spec, node, s_vals[v]);
          std::size_t rx = 0;
          for (std::size_t pos = 0; pos < in.size(); ++pos)
            rx = rx * spec.edges[in[pos]].channel.out_size + y_sim[in[pos]][v];
          recon[v] = dec.at(li * rx_total + rx);
          dsum += meas.at(s_vals[v][k - 1], recon[v]);
          ++pair_counts[s_vals[v][k - 1] * nr + recon[v]];
        }
        double dmean = dsum / double(n_prime);
        dist_sums[{k, node}] += dmean;
        dist_acc += dmean;
        ++dist_terms;
        // reconstruction-typicality event against the exact base-code joint
        const auto& dj = analysis.demand_joints.at({k, node});
        Pmf flat_pair(dj.p);
        if (!counts_strongly_typical(pair_counts, n_prime, flat_pair, delta)) row.e3 = 1;
      }
    }
    row.distortion = dist_terms > 0 ? dist_acc / double(dist_terms) : 0.0;
    rep.e1 += row.e1;
    rep.e2 += row.e2;
    rep.e3 += row.e3;
    rep.rows.push_back(row);
  }

  for (const auto& [key, sum] : dist_sums)
    rep.distortions[std::to_string(key.first) + "->" + std::to_string(key.second)] =
        sum / double(trials);
  rep.mean_tv = tv_count > 0 ? tv_sum / double(tv_count) : 1.0;
  long bad = 0;
  for (const auto& r : rep.rows) bad += (r.e1 || r.e2 || r.e3) ? 1 : 0;
  rep.error_rate = double(bad) / double(trials);
  return rep;
}

SimReport jscmud_superchannel_experiment(const NetworkSpec& spec, const BaseJointCode& base,
                                         const Vec& target_D, double epsilon, double delta,
                                         std::size_t n_prime, long trials, SeededRng& rng,
                                         const SolverConfig& cfg) {
  spec.validate();
  if (spec.mode != NetworkMode::Jscmud)
    throw std::invalid_argument("superchannel experiment: unicast-mode spec required");
  if (target_D.size() != spec.sources.size())
    throw std::invalid_argument("superchannel experiment: one target distortion per source");
  auto analysis = analyze_base_code(spec, base, cfg);

  SimReport rep;
  rep.trials = trials;
  rep.n_prime = n_prime;
  rep.delta = delta;
  rep.seed = rng.seed;
  rep.stream = rng.stream_id;
  rep.e3_per_source.assign(spec.sources.size(), 0);

  // per-source super-channel P(Shat_i | S_i) and codebook rate
  struct SourcePlan {
    Pmf marginal;
    Dmc super_channel;
    JointPmf pair;  // (S, Shat) under the base code
    double rate;    // bits per source sample
    double log2_M;  // total codebook exponent
  };
  std::vector<SourcePlan> plans;
  for (std::size_t i = 1; i <= spec.sources.size(); ++i) {
    auto dests = spec.destinations_of(i);
    if (dests.size() != 1)
      throw std::invalid_argument("superchannel experiment: each source needs one destination");
    SourcePlan pl;
    pl.marginal = spec.source_marginal(i);
    pl.pair = analysis.demand_joints.at({i, *dests.begin()});
    // conditional P(shat|s)
    const std::size_t ns = pl.pair.dims[0], nr = pl.pair.dims[1];
    Vec rows(ns * nr, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      double ps = 0;
      for (std::size_t r2 = 0; r2 < nr; ++r2) ps += pl.pair.p[s * nr + r2];
      for (std::size_t r2 = 0; r2 < nr; ++r2)
        rows[s * nr + r2] = ps > 0 ? pl.pair.p[s * nr + r2] / ps : (r2 == 0 ? 1.0 : 0.0);
    }
    pl.super_channel = Dmc(ns, nr, rows);
    auto rd = rate_distortion(pl.marginal, spec.distortion_measures[i - 1],
                              target_D[i - 1] + epsilon, cfg);
    pl.rate = std::max(0.0, rd.value - delta);
    pl.log2_M = pl.rate * double(n_prime);
    rep.rates.push_back(pl.rate);
    plans.push_back(std::move(pl));
  }

  std::map<std::size_t, double> dist_sums;
  for (long t = 0; t < trials; ++t) {
    auto trng = rng.child(std::uint64_t(t));
    TrialRow row;
    row.trial = t;
    double dist_acc = 0;
    for (std::size_t i = 0; i < plans.size(); ++i) {
      auto& pl = plans[i];
      auto srng = trng.child(i);
      // the transmitted codeword is itself an i.i.d. draw from the source law
      std::vector<std::size_t> s(n_prime), shat(n_prime);
      for (std::size_t v = 0; v < n_prime; ++v) {
        s[v] = srng.sample(pl.marginal);
        Vec cond(pl.super_channel.t.begin() + long(s[v] * pl.super_channel.out_size),
                 pl.super_channel.t.begin() + long((s[v] + 1) * pl.super_channel.out_size));
        shat[v] = srng.sample(cond);
      }
      // weak joint typicality of the true pair
      const std::size_t nr = pl.pair.dims[1];
      double joint_ll = 0, s_ll = 0;
      bool zero = false;
      for (std::size_t v = 0; v < n_prime; ++v) {
        double pj = pl.pair.p[s[v] * nr + shat[v]];
        if (pj <= 0) { zero = true; break; }
        joint_ll -= std::log2(pj);
        s_ll -= std::log2(pl.marginal[s[v]]);
      }
      double hj = 0;
      for (double p : pl.pair.p)
        if (p > 0) hj -= p * std::log2(p);
      double hs = entropy(pl.marginal);
      bool typical = !zero && std::abs(joint_ll / double(n_prime) - hj) <= delta &&
                     std::abs(s_ll / double(n_prime) - hs) <= delta;
      if (!typical) {
        row.e2 = 1;  // the true codeword is not decodable
      }
      // probability another of the M - 1 codewords is also jointly typical
      std::vector<std::size_t> shat_counts(nr, 0);
      for (std::size_t v = 0; v < n_prime; ++v) ++shat_counts[shat[v]];
      double log2_pt =
          log2_competitor_typical_prob(pl.marginal, pl.pair, shat_counts, n_prime, delta);
      double log_miss = log_miss_probability(log2_pt * kLog2, pl.log2_M);
      bool confusion = std::log(std::max(srng.uniform(), 1e-300)) >= log_miss;
      if (pl.log2_M < 1) confusion = false;  // degenerate single-codeword case
      if (confusion) {
        row.e3 = 1;
        ++rep.e3_per_source[i];
      }
      // distortion: exact on success; on failure the decoder commits to a
      // wrong codeword, i.e. an independent draw from the reconstruction law
      double dsum = 0;
      const auto& meas = spec.distortion_measures[i];
      if (!typical || confusion) {
        Pmf shat_law = pl.pair.marginal(1);
        for (std::size_t v = 0; v < n_prime; ++v)
          dsum += meas.at(s[v], srng.sample(shat_law));
      } else {
        for (std::size_t v = 0; v < n_prime; ++v) dsum += meas.at(s[v], shat[v]);
      }
      double dmean = dsum / double(n_prime);
      dist_sums[i + 1] += dmean;
      dist_acc += dmean;
    }
    row.distortion = dist_acc / double(plans.size());
    rep.e2 += row.e2;
    rep.e3 += row.e3;
    rep.rows.push_back(row);
  }
  for (const auto& [src, sum] : dist_sums)
    rep.distortions["S" + std::to_string(src)] = sum / double(trials);
  long bad = 0;
  for (const auto& r : rep.rows) bad += (r.e1 || r.e2 || r.e3) ? 1 : 0;
  rep.error_rate = double(bad) / double(trials);
  rep.mean_tv = 0.0;
  return rep;
}

SimReport separation_baseline_experiment(const Pmf& src, const DistortionMeasure& d,
                                         const Dmc& ch, double kappa, double target_D,
                                         double delta, std::size_t n, long trials,
                                         SeededRng& rng, const SolverConfig& cfg) {
  const std::size_t n_ch = std::size_t(std::llround(kappa * double(n)));
  if (n_ch == 0) throw std::invalid_argument("baseline: kappa * n must be a positive integer");
  if (std::abs(kappa * double(n) - double(n_ch)) > 1e-9)
    throw std::invalid_argument("baseline: kappa * n must be an integer channel use count");

  auto rd = rate_distortion(src, d, target_D, cfg);
  if (!rd.test_channel) throw std::runtime_error("baseline: no quantizer test channel available");
  const Dmc& w = *rd.test_channel;  // P(shat | s)
  auto joint_q = JointPmf::from_2d(src, w);
  Pmf repro = joint_q.marginal(1);
  const double rate_s = rd.value + delta;  // bits per source sample

  auto cap = channel_capacity(ch, cfg);
  const Pmf& px = cap.argument;
  auto joint_c = JointPmf::from_2d(px, ch);

  SimReport rep;
  rep.trials = trials;
  rep.n_prime = n;
  rep.delta = delta;
  rep.seed = rng.seed;
  rep.stream = rng.stream_id;
  rep.rates = {rate_s, rate_s * double(n) / double(n_ch)};

  double dist_total = 0, tv_sum = 0;
  long tv_count = 0;
  for (long t = 0; t < trials; ++t) {
    auto trng = rng.child(std::uint64_t(t));
    TrialRow row;
    row.trial = t;

    // quantization stage: implicit rate-distortion codebook covering
    std::vector<std::size_t> s(n);
    std::vector<std::size_t> counts(src.size(), 0);
    for (auto& sv : s) { sv = trng.sample(src); ++counts[sv]; }
    auto cov = simulate_covering(counts, joint_q, delta, rate_s, trng);
    double quant_dist;
    bool quant_ok = cov.covered;
    if (quant_ok) {
      double dsum = 0;
      for (std::size_t a = 0; a < src.size(); ++a)
        for (std::size_t b = 0; b < repro.size(); ++b)
          dsum += double(cov.table[a][b]) * d.at(a, b);
      quant_dist = dsum / double(n);
      row.tv = cov.tv;
      tv_sum += cov.tv;
      ++tv_count;
    } else {
      row.e2 = 1;
      // arbitrary codeword: independent draw from the reproduction law
      double dsum = 0;
      for (std::size_t v = 0; v < n; ++v) dsum += d.at(s[v], trng.sample(repro));
      quant_dist = dsum / double(n);
      row.tv = 1.0;
    }

    // channel stage: capacity-achieving random code, joint-typicality decoding
    std::vector<std::size_t> x(n_ch), y(n_ch), y_counts(ch.out_size, 0);
    for (std::size_t v = 0; v < n_ch; ++v) {
      x[v] = trng.sample(px);
      Vec cond(ch.t.begin() + long(x[v] * ch.out_size),
               ch.t.begin() + long((x[v] + 1) * ch.out_size));
      y[v] = trng.sample(cond);
      ++y_counts[y[v]];
    }
    double joint_ll = 0, x_ll = 0;
    bool zero = false;
    for (std::size_t v = 0; v < n_ch; ++v) {
      double pj = joint_c.p[x[v] * ch.out_size + y[v]];
      if (pj <= 0) { zero = true; break; }
      joint_ll -= std::log2(pj);
      x_ll -= std::log2(px[x[v]]);
    }
    double hj = 0;
    for (double p : joint_c.p)
      if (p > 0) hj -= p * std::log2(p);
    bool true_typical = !zero &&
                        std::abs(joint_ll / double(n_ch) - hj) <= delta &&
                        std::abs(x_ll / double(n_ch) - entropy(px)) <= delta;
    double log2_pt = log2_competitor_typical_prob(px, joint_c, y_counts, n_ch, delta);
    const double log2_M = rate_s * double(n);  // index count matches the quantizer
    double log_miss = log_miss_probability(log2_pt * kLog2, log2_M);
    bool confusion = std::log(std::max(trng.uniform(), 1e-300)) >= log_miss;
    if (log2_M < 1) confusion = false;
    bool decode_ok = true_typical && !confusion;
    if (!true_typical) row.e1 = 1;
    if (confusion) row.e3 = 1;

    double end_dist;
    if (decode_ok) {
      end_dist = quant_dist;
    } else {
      // wrong index: the reconstruction is an unrelated codeword
      double dsum = 0;
      for (std::size_t v = 0; v < n; ++v) dsum += d.at(s[v], trng.sample(repro));
      end_dist = dsum / double(n);
    }
    row.distortion = end_dist;
    dist_total += end_dist;
    rep.e1 += row.e1;
    rep.e2 += row.e2;
    rep.e3 += row.e3;
    rep.rows.push_back(row);
  }
  rep.distortions["end_to_end"] = dist_total / double(trials);
  rep.mean_tv = tv_count > 0 ? tv_sum / double(tv_count) : 1.0;
  long bad = 0;
  for (const auto& r : rep.rows) bad += (r.e1 || r.e2 || r.e3) ? 1 : 0;
  rep.error_rate = double(bad) / double(trials);
  return rep;
}

}  // namespace sepnet
