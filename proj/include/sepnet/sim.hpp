#pragma once
// Seeded Monte-Carlo execution of the two constructive mechanisms at small
// blocklength: channel simulation by lossy coding of the channel input (with
// implicit exponential codebooks simulated exactly through their covering
// statistics), the super-channel scheme with joint-typicality decoding, and a
// plain separation baseline against the OPTA frontier.
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sepnet/network.hpp"

namespace sepnet {

// Explicit lookup-table joint source-channel code over a network spec.
// Encoders see the local source block and all channel outputs received at the
// node in earlier sessions; decoders see the local source block (if any) and
// the full received history.
struct BaseJointCode {
  std::size_t m = 1;  // source samples per block
  std::size_t n = 1;  // channel uses (sessions) per block
  // encoders[e][t]: channel input of edge e at session t+1, indexed by
  // local_source_block_index * rx_hist_size(t) + rx_hist_index
  std::vector<std::vector<std::vector<std::uint32_t>>> encoders;
  // decoders[{k, j}]: reconstruction block for source k at node j, indexed by
  // local_source_block_index * rx_total_size + rx_full_index
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::uint32_t>> decoders;

  // identity code for m = n = 1 specs whose encoders forward the (single)
  // observed source symbol and whose decoders output the received symbol
  static BaseJointCode identity_for(const NetworkSpec& spec);
};

// Exact analysis of a base code by forward enumeration over source
// realizations and channel noise (capped at kEnumerationCap states).
struct BaseCodeAnalysis {
  // per edge e and session t: joint law of (X_e(t), Y_e(t))
  std::vector<std::vector<JointPmf>> edge_session_joints;
  std::vector<std::vector<double>> edge_session_info;  // I(X;Y) bits
  std::vector<double> edge_capacities;                 // C_e bits
  // exact per-demand distortions E d(S_k, Shat_{k,j}) and joints
  std::map<std::pair<std::size_t, std::size_t>, double> exact_distortions;
  std::map<std::pair<std::size_t, std::size_t>, JointPmf> demand_joints;
};

constexpr std::size_t kEnumerationCap = std::size_t(1) << 24;

BaseCodeAnalysis analyze_base_code(const NetworkSpec& spec, const BaseJointCode& base,
                                   const SolverConfig& cfg = {});

// --- implicit-codebook covering engine ---
// A codebook of exp2(n * rate_bits) codewords, each drawn uniformly from a
// uniformly chosen delta-typical type class of the output marginal, is never
// materialized; instead the exact probability that it covers the given input
// (contains a strongly jointly typical codeword) is computed by enumerating
// joint contingency tables, and the selected codeword's joint type is sampled
// from the exact conditional law.
struct CoveringOutcome {
  bool covered = false;
  double log_cover_prob_single = 0;  // ln P(one codeword jointly typical)
  double log_miss_prob = 0;          // ln P(no codeword jointly typical)
  std::vector<std::vector<std::size_t>> table;  // joint counts [x][y] when covered
  double tv = 1.0;  // total-variation distance of the joint type from the law
};

// Covering statistics for one block. Two window models:
//  - joint (conditional = false): per-cell windows |k/n - P(x,y)| <= delta and
//    delta-typical column sums, codewords uniform over typical output types;
//  - conditional (conditional = true): per-cell windows centered on the
//    input-conditioned law, |k[x][y]/n_x - P(y|x)| <= delta, codewords i.i.d.
//    from the output marginal. Row feasibility then never depends on the
//    input block's own type fluctuation.
CoveringOutcome simulate_covering(const std::vector<std::size_t>& x_counts,
                                  const JointPmf& joint_xy, double delta, double rate_bits,
                                  SeededRng& rng, bool conditional = false);

// distribute output symbols uniformly at random within each input-symbol class
std::vector<std::size_t> place_outputs(const std::vector<std::size_t>& xs,
                                       const std::vector<std::vector<std::size_t>>& table,
                                       std::size_t out_alphabet, SeededRng& rng);

// ln P(no success among exp2(log2_count) independent trials of probability
// exp(log_p_single)); numerically stable for astronomically large counts
double log_miss_probability(double log_p_single_nats, double log2_count);

// log2 probability that an independent sequence drawn i.i.d. from `law`
// (uniform on its support) is weakly jointly typical, within window
// delta, with a fixed sequence whose symbol counts are `other_counts`, under
// the pair law `joint` (axis 0 = drawn, axis 1 = fixed). Supported when the
// per-position log-probability value distribution is identical across fixed
// symbols and takes at most two distinct values; otherwise throws.
double log2_competitor_typical_prob(const Pmf& law, const JointPmf& joint,
                                    const std::vector<std::size_t>& other_counts,
                                    std::size_t n, double delta);

// --- reports ---
struct TrialRow {
  long trial = 0;
  int e1 = 0, e2 = 0, e3 = 0;
  double distortion = 0;
  double tv = 0;
};

struct SimReport {
  long trials = 0;
  long e1 = 0, e2 = 0, e3 = 0;          // error-event trial counts
  std::vector<long> e3_per_source;      // unicast: per-source decoding failures
  std::map<std::string, double> distortions;  // "k->j" -> mean empirical distortion
  double mean_tv = 1.0;                 // mean joint-type TV over covered trials
  double error_rate = 0;                // trials with any event / trials
  std::uint64_t seed = 0, stream = 0;
  std::size_t n_prime = 0;
  double delta = 0;
  Vec rates;                            // codebook rates in play (bits)
  std::vector<TrialRow> rows;

  std::string to_csv() const;
};

// Theorem-1 mechanism, single edge: lossy-code the channel input against a
// codebook drawn from the output law at rate I(X;Y) + rate_margin
SimReport channel_simulation_experiment(const Dmc& ch, const Pmf& input_law,
                                        std::size_t n_prime, double delta, double rate_margin,
                                        long trials, SeededRng& rng);

// Theorem-1 mechanism, full network: run the base code across n_prime super
// blocks with every channel replaced by its simulated counterpart
SimReport dnjscc_separation_experiment(const NetworkSpec& spec, const BaseJointCode& base,
                                       std::size_t n_prime, double delta, long trials,
                                       SeededRng& rng, const SolverConfig& cfg = {});

// Theorem-2 mechanism: source codebooks over the end-to-end super channel with
// unique weak-joint-typicality decoding at rate R_i(D_i + epsilon) - delta
SimReport jscmud_superchannel_experiment(const NetworkSpec& spec, const BaseJointCode& base,
                                         const Vec& target_D, double epsilon, double delta,
                                         std::size_t n_prime, long trials, SeededRng& rng,
                                         const SolverConfig& cfg = {});

// separation baseline: quantize at R(target_D) + delta, ship the index across
// the channel with a capacity-achieving random code, measure end distortion
SimReport separation_baseline_experiment(const Pmf& src, const DistortionMeasure& d,
                                         const Dmc& ch, double kappa, double target_D,
                                         double delta, std::size_t n, long trials,
                                         SeededRng& rng, const SolverConfig& cfg = {});

}  // namespace sepnet
