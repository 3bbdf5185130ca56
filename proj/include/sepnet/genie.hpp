#pragma once
// Genie-aided multicast machinery: distortion-induced destination orders,
// auxiliary additive noise chains, genie rate matrices, degraded-message-set
// rates, and numerical verification of the rate-loss inequalities.
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sepnet/network.hpp"

namespace sepnet {

struct OrderVector {
  // per source i (1-based): destination nodes ordered by strictly decreasing
  // distortion; equal-distortion destinations are merged into one slot
  std::map<std::size_t, std::vector<std::vector<std::size_t>>> orders;

  // flattened representative order (first node of each merged slot)
  std::vector<std::size_t> slots(std::size_t source_id) const;
  std::size_t depth(std::size_t source_id) const;  // K_i = number of slots
  // total destination count |Q_i| including merged duplicates
  std::size_t fanout(std::size_t source_id) const;
};

struct AuxChain {
  FiniteAbelianGroup group;
  std::vector<Pmf> v_laws;  // V_{O(1)} ... V_{O(K)}, independent components
  std::vector<Pmf> u_laws;  // U_{O(j)} = U_{O(j+1)} + V_{O(j)}, U_{O(K)} = V_{O(K)}
  Vec expected_distortions;  // E d(U_{O(j)}) per slot
};

constexpr double kGenieUndefined = -1.0;  // diamond entries of the rate matrix

struct GenieRateMatrix {
  std::size_t source_count = 0, node_count = 0;
  std::vector<double> r;  // row-major; kGenieUndefined marks diamond

  GenieRateMatrix() = default;
  GenieRateMatrix(std::size_t ns, std::size_t nn)
      : source_count(ns), node_count(nn), r(ns * nn, kGenieUndefined) {}
  double& at(std::size_t src, std::size_t node) { return r[(src - 1) * node_count + (node - 1)]; }
  double at(std::size_t src, std::size_t node) const {
    return r[(src - 1) * node_count + (node - 1)];
  }
  bool defined(std::size_t src, std::size_t node) const {
    return at(src, node) != kGenieUndefined;
  }
};

// destinations with equal distortion merge into a super-destination before
// sorting by strictly decreasing distortion
OrderVector induce_orders(const DistortionMatrix& D,
                          const std::map<std::size_t, std::set<std::size_t>>& demands);

// U laws by iterated convolution; validates E d(U_k) <= D_k per slot
AuxChain build_aux_chain(const std::vector<Pmf>& v_laws, const FiniteAbelianGroup& g,
                         const DistortionMeasure& d, const Vec& D_row);

// defined entries R*[i][O_i(j)] = C(D_{i,O_i(j)}, U_{i,O_i(j)}) for |Q_i| > 1
GenieRateMatrix genie_rate_matrix(const DistortionMatrix& D, const OrderVector& O,
                                  const std::map<std::size_t, AuxChain>& chains,
                                  const std::vector<AdditiveStructure>& structures,
                                  const SolverConfig& cfg = {});

// quadratic specialization: every defined entry is exactly 1/2 bit
GenieRateMatrix quadratic_genie_rate_matrix(const DistortionMatrix& D, const OrderVector& O);

// sum of defined entries weighted by how many destinations receive each slot:
// slot j of source i serves (|Q_i| - j + 1) destinations along the chain
double aggregate_throughput(const GenieRateMatrix& rstar, const OrderVector& O);

// single-letter degraded-message-set rates:
//   R^c_1 = I(S+U_1; S) - C(D_1, U_1)
//   R^c_k = I(S+U_k; S | S+U_{k-1}) - C(D_k, U_k), k = 2..K
// raw values, possibly negative
Vec dms_rates(const Pmf& src, const AuxChain& chain, const AdditiveStructure& structure,
              const Vec& D_row, const SolverConfig& cfg = {});

struct RateLossSlack {
  std::size_t recon_index = 0;  // i: which reconstruction channel
  std::size_t chain_index = 0;  // k: which aux level (1-based)
  double left = 0;              // information gap, bits
  double bound = 0;             // C(D_i, U_k), bits
  double slack = 0;             // bound - left
};

// numerically evaluates the rate-loss inequalities for every reconstruction i
// and chain level k, asserting left <= bound + 1e-9
std::vector<RateLossSlack> verify_rate_loss_bounds(const Pmf& src,
                                                   const std::vector<Dmc>& recon_channels,
                                                   const Vec& recon_budgets,
                                                   const AuxChain& chain,
                                                   const AdditiveStructure& structure,
                                                   const DistortionMeasure& d,
                                                   const SolverConfig& cfg = {});

// heuristic coordinate-descent search over V laws minimizing the largest
// defined genie entry, with seeded multistarts
AuxChain optimize_aux_chain(const FiniteAbelianGroup& g, const DistortionMeasure& d,
                            const Vec& D_row, const AdditiveStructure& structure,
                            SeededRng& rng, const SolverConfig& cfg = {});

}  // namespace sepnet
