#include "sepnet/genie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sepnet {

namespace {

constexpr double kDistTieTol = 1e-12;

}  // namespace

std::vector<std::size_t> OrderVector::slots(std::size_t source_id) const {
  auto it = orders.find(source_id);
  if (it == orders.end()) return {};
  std::vector<std::size_t> reps;
  for (const auto& slot : it->second) reps.push_back(slot.front());
  return reps;
}

std::size_t OrderVector::depth(std::size_t source_id) const {
  auto it = orders.find(source_id);
  return it == orders.end() ? 0 : it->second.size();
}

std::size_t OrderVector::fanout(std::size_t source_id) const {
  auto it = orders.find(source_id);
  if (it == orders.end()) return 0;
  std::size_t n = 0;
  for (const auto& slot : it->second) n += slot.size();
  return n;
}

OrderVector induce_orders(const DistortionMatrix& D,
                          const std::map<std::size_t, std::set<std::size_t>>& demands) {
  OrderVector O;
  for (std::size_t i = 1; i <= D.source_count; ++i) {
    std::vector<std::size_t> dests;
    for (const auto& [node, srcs] : demands)
      if (srcs.count(i)) dests.push_back(node);
    if (dests.empty()) continue;
    std::sort(dests.begin(), dests.end());  // lowest node first within ties
    // merge equal-distortion destinations into super-destinations
    std::vector<std::vector<std::size_t>> slots;
    std::vector<double> slot_d;
    for (std::size_t node : dests) {
      double dv = D.at(i, node);
      bool merged = false;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (std::abs(slot_d[s] - dv) <= kDistTieTol) {
          slots[s].push_back(node);
          merged = true;
          break;
        }
      if (!merged) {
        slots.push_back({node});
        slot_d.push_back(dv);
      }
    }
    // strictly decreasing distortion
    std::vector<std::size_t> perm(slots.size());
    for (std::size_t s = 0; s < perm.size(); ++s) perm[s] = s;
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return slot_d[a] > slot_d[b]; });
    std::vector<std::vector<std::size_t>> ordered;
    for (std::size_t s : perm) ordered.push_back(slots[s]);
    O.orders[i] = std::move(ordered);
  }
  return O;
}

AuxChain build_aux_chain(const std::vector<Pmf>& v_laws, const FiniteAbelianGroup& g,
                         const DistortionMeasure& d, const Vec& D_row) {
  if (v_laws.empty()) throw std::invalid_argument("aux chain: at least one noise law required");
  if (D_row.size() != v_laws.size())
    throw std::invalid_argument("aux chain: one distortion budget per level required");
  if (!d.is_difference || d.dvec.size() != g.order)
    throw std::invalid_argument("aux chain: difference distortion measure on the group required");
  for (const auto& v : v_laws)
    if (v.size() != g.order) throw std::invalid_argument("aux chain: noise law alphabet mismatch");

  AuxChain c;
  c.group = g;
  c.v_laws = v_laws;
  const std::size_t K = v_laws.size();
  c.u_laws.resize(K);
  c.u_laws[K - 1] = v_laws[K - 1];
  for (std::size_t j = K - 1; j-- > 0;)
    c.u_laws[j] = group_convolve(c.u_laws[j + 1], v_laws[j], g);
  c.expected_distortions.resize(K);
  for (std::size_t j = 0; j < K; ++j) {
    c.expected_distortions[j] = d.expected_noise(c.u_laws[j]);
    if (c.expected_distortions[j] > D_row[j] + 1e-9)
      throw std::invalid_argument("aux chain: distortion budget violated at level " +
                                  std::to_string(j + 1) + " (E d = " +
                                  std::to_string(c.expected_distortions[j]) + " > " +
                                  std::to_string(D_row[j]) + ")");
  }
  return c;
}

GenieRateMatrix genie_rate_matrix(const DistortionMatrix& D, const OrderVector& O,
                                  const std::map<std::size_t, AuxChain>& chains,
                                  const std::vector<AdditiveStructure>& structures,
                                  const SolverConfig& cfg) {
  if (structures.size() != D.source_count)
    throw std::invalid_argument("genie matrix: one additive structure per source required");
  GenieRateMatrix m(D.source_count, D.node_count);
  for (const auto& [i, slots] : O.orders) {
    if (O.fanout(i) <= 1) continue;  // single destination: all entries undefined
    auto cit = chains.find(i);
    if (cit == chains.end())
      throw std::invalid_argument("genie matrix: missing aux chain for source " +
                                  std::to_string(i));
    const AuxChain& chain = cit->second;
    if (chain.u_laws.size() != slots.size())
      throw std::invalid_argument("genie matrix: chain depth mismatch for source " +
                                  std::to_string(i));
    for (std::size_t j = 0; j < slots.size(); ++j) {
      const double Dij = D.at(i, slots[j].front());
      SolverResult r;
      try {
        r = constrained_additive_capacity(chain.u_laws[j], structures[i - 1], Dij, cfg);
      } catch (const std::exception& e) {
        throw std::runtime_error("genie matrix: solver failed at source " + std::to_string(i) +
                                 ", destination " + std::to_string(slots[j].front()) + ": " +
                                 e.what());
      }
      for (std::size_t node : slots[j]) m.at(i, node) = r.value;
    }
  }
  return m;
}

GenieRateMatrix quadratic_genie_rate_matrix(const DistortionMatrix& D, const OrderVector& O) {
  GenieRateMatrix m(D.source_count, D.node_count);
  for (const auto& [i, slots] : O.orders) {
    if (O.fanout(i) <= 1) continue;
    for (const auto& slot : slots)
      for (std::size_t node : slot) m.at(i, node) = 0.5;
  }
  return m;
}

double aggregate_throughput(const GenieRateMatrix& rstar, const OrderVector& O) {
  double total = 0;
  for (const auto& [i, slots] : O.orders) {
    if (O.fanout(i) <= 1) continue;
    // layer j is delivered to every destination from slot j onward
    std::size_t downstream = O.fanout(i);
    for (const auto& slot : slots) {
      const double entry = rstar.at(i, slot.front());
      if (entry != kGenieUndefined) total += entry * double(downstream);
      downstream -= slot.size();
    }
  }
  return total;
}

namespace {

// joint law of (S + U, B, S + U + V) where B is S itself or a reconstruction
// drawn from recon(.|s); U ~ u_law and V ~ v_law independent of everything
JointPmf chain_joint(const Pmf& src, const Dmc* recon, const Pmf& u_law, const Pmf* v_law,
                     const FiniteAbelianGroup& g) {
  const std::size_t q = g.order;
  const std::size_t nb = recon ? recon->out_size : q;
  if (v_law) {
    Vec jp(q * nb * q, 0.0);
    for (std::size_t s = 0; s < q; ++s) {
      if (src[s] <= 0) continue;
      for (std::size_t u = 0; u < q; ++u) {
        if (u_law[u] <= 0) continue;
        const std::size_t a = g.add(s, u);
        for (std::size_t v = 0; v < q; ++v) {
          if ((*v_law)[v] <= 0) continue;
          const std::size_t c = g.add(a, v);
          const double base = src[s] * u_law[u] * (*v_law)[v];
          if (recon) {
            for (std::size_t b = 0; b < nb; ++b)
              jp[(a * nb + b) * q + c] += base * recon->at(s, b);
          } else {
            jp[(a * nb + s) * q + c] += base;
          }
        }
      }
    }
    return JointPmf({q, nb, q}, jp);
  }
  Vec jp(q * nb, 0.0);
  for (std::size_t s = 0; s < q; ++s) {
    if (src[s] <= 0) continue;
    for (std::size_t u = 0; u < q; ++u) {
      if (u_law[u] <= 0) continue;
      const std::size_t a = g.add(s, u);
      const double base = src[s] * u_law[u];
      if (recon) {
        for (std::size_t b = 0; b < nb; ++b) jp[a * nb + b] += base * recon->at(s, b);
      } else {
        jp[a * nb + s] += base;
      }
    }
  }
  return JointPmf({q, nb}, jp);
}

// joint law of (S, B, S + U_{K-1}) for the last chain inequality
JointPmf terminal_joint(const Pmf& src, const Dmc* recon, const Pmf& u_prev,
                        const FiniteAbelianGroup& g) {
  const std::size_t q = g.order;
  const std::size_t nb = recon ? recon->out_size : q;
  Vec jp(q * nb * q, 0.0);
  for (std::size_t s = 0; s < q; ++s) {
    if (src[s] <= 0) continue;
    for (std::size_t u = 0; u < q; ++u) {
      if (u_prev[u] <= 0) continue;
      const std::size_t c = g.add(s, u);
      const double base = src[s] * u_prev[u];
      if (recon) {
        for (std::size_t b = 0; b < nb; ++b) jp[(s * nb + b) * q + c] += base * recon->at(s, b);
      } else {
        jp[(s * nb + s) * q + c] += base;
      }
    }
  }
  return JointPmf({q, nb, q}, jp);
}

}  // namespace

Vec dms_rates(const Pmf& src, const AuxChain& chain, const AdditiveStructure& structure,
              const Vec& D_row, const SolverConfig& cfg) {
  const std::size_t K = chain.u_laws.size();
  if (D_row.size() != K) throw std::invalid_argument("dms_rates: distortion row size mismatch");
  if (src.size() != chain.group.order)
    throw std::invalid_argument("dms_rates: source alphabet must match the chain group");
  Vec rates(K);
  for (std::size_t k = 0; k < K; ++k) {
    double info;
    if (k == 0) {
      info = mutual_information(chain_joint(src, nullptr, chain.u_laws[0], nullptr, chain.group));
    } else {
      // condition on S + U_{k-1} = (S + U_k) + V_{k-1}
      info = conditional_mutual_information(
          chain_joint(src, nullptr, chain.u_laws[k], &chain.v_laws[k - 1], chain.group));
    }
    auto cap = constrained_additive_capacity(chain.u_laws[k], structure, D_row[k], cfg);
    rates[k] = info - cap.value;
  }
  return rates;
}

std::vector<RateLossSlack> verify_rate_loss_bounds(const Pmf& src,
                                                   const std::vector<Dmc>& recon_channels,
                                                   const Vec& recon_budgets,
                                                   const AuxChain& chain,
                                                   const AdditiveStructure& structure,
                                                   const DistortionMeasure& d,
                                                   const SolverConfig& cfg) {
  if (recon_channels.size() != recon_budgets.size())
    throw std::invalid_argument("verify_rate_loss_bounds: one budget per reconstruction");
  const std::size_t K = chain.u_laws.size();
  const FiniteAbelianGroup& g = chain.group;

  // precondition: every reconstruction meets its declared distortion budget
  for (std::size_t i = 0; i < recon_channels.size(); ++i) {
    auto joint = JointPmf::from_2d(src, recon_channels[i]);
    double ed = d.expected(joint);
    if (ed > recon_budgets[i] + 1e-9)
      throw std::invalid_argument("verify_rate_loss_bounds: reconstruction " +
                                  std::to_string(i + 1) + " misses its budget (E d = " +
                                  std::to_string(ed) + " > " +
                                  std::to_string(recon_budgets[i]) + ")");
  }

  std::vector<RateLossSlack> report;
  for (std::size_t i = 0; i < recon_channels.size(); ++i) {
    const Dmc& recon = recon_channels[i];
    for (std::size_t k = 0; k < K; ++k) {
      double left;
      if (k == 0) {
        double with_s = mutual_information(
            chain_joint(src, nullptr, chain.u_laws[0], nullptr, g));
        double with_r = mutual_information(
            chain_joint(src, &recon, chain.u_laws[0], nullptr, g));
        left = with_s - with_r;
      } else if (k + 1 < K) {
        double with_s = conditional_mutual_information(
            chain_joint(src, nullptr, chain.u_laws[k], &chain.v_laws[k - 1], g));
        double with_r = conditional_mutual_information(
            chain_joint(src, &recon, chain.u_laws[k], &chain.v_laws[k - 1], g));
        left = with_s - with_r;
      } else {
        // last level: the reconstruction term drops the additive noise
        double with_s = conditional_mutual_information(
            chain_joint(src, nullptr, chain.u_laws[k], &chain.v_laws[k - 1], g));
        double with_r = conditional_mutual_information(
            terminal_joint(src, &recon, chain.u_laws[k - 1], g));
        left = with_s - with_r;
      }
      auto cap = constrained_additive_capacity(chain.u_laws[k], structure, recon_budgets[i], cfg);
      RateLossSlack s;
      s.recon_index = i + 1;
      s.chain_index = k + 1;
      s.left = left;
      s.bound = cap.upper_bound;  // certified bound side
      s.slack = s.bound - s.left;
      report.push_back(s);
    }
  }
  return report;
}

AuxChain optimize_aux_chain(const FiniteAbelianGroup& g, const DistortionMeasure& d,
                            const Vec& D_row, const AdditiveStructure& structure,
                            SeededRng& rng, const SolverConfig& cfg) {
  const std::size_t K = D_row.size();
  const std::size_t q = g.order;
  if (K == 0) throw std::invalid_argument("optimize_aux_chain: empty distortion row");

  auto feasible_vs = [&](std::vector<Pmf> vs) -> std::optional<AuxChain> {
    // shrink each noise toward the zero element until the chain fits its budgets
    for (int shrink = 0; shrink < 80; ++shrink) {
      try {
        return build_aux_chain(vs, g, d, D_row);
      } catch (const std::invalid_argument&) {
        for (auto& v : vs) {
          Vec w(q);
          for (std::size_t x = 0; x < q; ++x)
            w[x] = 0.7 * v[x] + (x == g.identity ? 0.3 : 0.0);
          v = Pmf(w);
        }
      }
    }
    return std::nullopt;
  };

  auto objective = [&](const AuxChain& c) {
    double worst = 0;
    for (std::size_t k = 0; k < K; ++k) {
      auto cap = constrained_additive_capacity(c.u_laws[k], structure, D_row[k], cfg);
      worst = std::max(worst, cap.value);
    }
    return worst;
  };

  std::optional<AuxChain> best;
  double best_obj = std::numeric_limits<double>::infinity();
  const int starts = std::max(1, cfg.multistart_count);
  for (int s = 0; s < starts; ++s) {
    std::vector<Pmf> vs;
    for (std::size_t k = 0; k < K; ++k) {
      Vec v(q);
      double Z = 0;
      for (auto& x : v) {
        x = -std::log(rng.uniform() + 1e-300);
        Z += x;
      }
      for (std::size_t x = 0; x < q; ++x)
        v[x] = 0.4 * v[x] / Z + (x == g.identity ? 0.6 : 0.0);
      vs.push_back(Pmf(v));
    }
    auto cand = feasible_vs(vs);
    if (!cand) continue;
    double obj = objective(*cand);
    // coordinate passes: mix each V toward the zero element or toward uniform
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < K; ++k) {
        for (double alpha : {0.5, 0.25}) {
          for (int dir = 0; dir < 2; ++dir) {
            std::vector<Pmf> trial = cand->v_laws;
            Vec w(q);
            for (std::size_t x = 0; x < q; ++x) {
              double target = dir == 0 ? (x == g.identity ? 1.0 : 0.0) : 1.0 / double(q);
              w[x] = (1 - alpha) * trial[k][x] + alpha * target;
            }
            trial[k] = Pmf(w);
            auto t = feasible_vs(trial);
            if (!t) continue;
            double tobj = objective(*t);
            if (tobj < obj - 1e-9) {
              obj = tobj;
              cand = t;
            }
          }
        }
      }
    }
    if (obj < best_obj) {
      best_obj = obj;
      best = cand;
    }
  }
  if (!best) throw std::runtime_error("optimize_aux_chain: no feasible chain found");
  return *best;
}

}  // namespace sepnet
