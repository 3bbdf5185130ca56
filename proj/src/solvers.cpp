#include "sepnet/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace sepnet {

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr double kInf = std::numeric_limits<double>::infinity();

// ---- small radix-2 FFT for convolutions ----
void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = 2 * M_PI / double(len) * (inverse ? 1 : -1);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1);
      for (std::size_t k = 0; k < len / 2; ++k) {
        auto u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= double(n);
}

Vec fft_conv(const Vec& a, const Vec& b) {
  const std::size_t out = a.size() + b.size() - 1;
  if (std::size_t(a.size()) * b.size() < 4096) {  // small: direct
    Vec r(out, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
  }
  std::size_t n = 1;
  while (n < out) n <<= 1;
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  fft(fa, false);
  fft(fb, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft(fa, true);
  Vec r(out);
  for (std::size_t i = 0; i < out; ++i) r[i] = fa[i].real();
  return r;
}

// convolution against a fixed kernel, with cached transform/twiddle tables;
// split re/im storage keeps the butterflies in plain double arithmetic
class FixedConv {
 public:
  FixedConv() = default;
  FixedConv(const Vec& kernel, std::size_t a_len) : klen_(kernel.size()) {
    out_ = a_len + klen_ - 1;
    direct_ = a_len * klen_ < 20000;  // below this, direct beats the FFT
    if (direct_) {
      k_ = kernel;
      return;
    }
    n_ = 1;
    while (n_ < out_) n_ <<= 1;
    rev_.resize(n_);
    for (std::size_t i = 1, j = 0; i < n_; ++i) {
      std::size_t bit = n_ >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      rev_[i] = j;
    }
    for (std::size_t len = 2; len <= n_; len <<= 1)
      for (std::size_t k = 0; k < len / 2; ++k) {
        double ang = -2 * M_PI * double(k) / double(len);
        twr_.push_back(std::cos(ang));
        twi_.push_back(std::sin(ang));
      }
    fkr_.assign(n_, 0.0);
    fki_.assign(n_, 0.0);
    for (std::size_t i = 0; i < klen_; ++i) fkr_[i] = kernel[i];
    fft_cached(fkr_, fki_);
    sr_.resize(n_);
    si_.resize(n_);
  }
  void apply(const Vec& a, Vec& r) {
    r.assign(out_, 0.0);
    if (direct_) {
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0)
          for (std::size_t j = 0; j < klen_; ++j) r[i + j] += a[i] * k_[j];
      return;
    }
    std::fill(sr_.begin(), sr_.end(), 0.0);
    std::fill(si_.begin(), si_.end(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) sr_[i] = a[i];
    fft_cached(sr_, si_);
    for (std::size_t i = 0; i < n_; ++i) {
      double xr = sr_[i] * fkr_[i] - si_[i] * fki_[i];
      double xi = sr_[i] * fki_[i] + si_[i] * fkr_[i];
      sr_[i] = xr;
      si_[i] = -xi;  // conjugate: inverse transform = conj(fft(conj(.)))/n
    }
    fft_cached(sr_, si_);
    const double inv = 1.0 / double(n_);
    for (std::size_t i = 0; i < out_; ++i) r[i] = sr_[i] * inv;
  }

 private:
  void fft_cached(Vec& re, Vec& im) const {
    for (std::size_t i = 1; i < n_; ++i)
      if (i < rev_[i]) {
        std::swap(re[i], re[rev_[i]]);
        std::swap(im[i], im[rev_[i]]);
      }
    std::size_t toff = 0;
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const double* wr = twr_.data() + toff;
      const double* wi = twi_.data() + toff;
      for (std::size_t i = 0; i < n_; i += len) {
        double* lor = re.data() + i;
        double* loi = im.data() + i;
        double* hir = lor + half;
        double* hii = loi + half;
        for (std::size_t k = 0; k < half; ++k) {
          double vr = hir[k] * wr[k] - hii[k] * wi[k];
          double vi = hir[k] * wi[k] + hii[k] * wr[k];
          double ur = lor[k], ui = loi[k];
          lor[k] = ur + vr;
          loi[k] = ui + vi;
          hir[k] = ur - vr;
          hii[k] = ui - vi;
        }
      }
      toff += half;
    }
  }

  std::size_t klen_ = 0, out_ = 0, n_ = 0;
  bool direct_ = true;
  Vec k_;
  std::vector<std::size_t> rev_;
  Vec twr_, twi_, fkr_, fki_, sr_, si_;
};

double entropy_nats(const Vec& p) {
  double h = 0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

// ---- generic accelerated Blahut-Arimoto core ----
// Maximizes F(p) = I(p) - s*cost(p) over the simplex. Callbacks:
//   dx_of(p, dx): fills per-letter exponents dx[x] = D(row_x || q_y(p)) - s*cost[x] in nats
//   plus returns I(p) in nats.
// Valid bounds at every iterate: F* >= F(p); F* <= max_x dx[x].
struct BaOutcome {
  double best_F = -kInf;  // nats
  double best_ub = kInf;  // nats, min over iterations of max_x dx
  double I = 0, cost = 0; // at best_F iterate
  Vec p;
  long iterations = 0;
  bool converged = false;
};

template <typename DxFn>
BaOutcome ba_maximize(std::size_t q, const Vec* cost, double /*s*/, double tol_nats, long max_iter,
                      DxFn&& dx_of, const std::vector<std::size_t>* sym_map, double gamma = 1.0) {
  Vec p(q, 1.0 / double(q)), dx(q), w(q);
  BaOutcome out;
  for (long it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    double I = dx_of(p, dx);
    double F = 0, ub = -kInf, c = 0;
    for (std::size_t x = 0; x < q; ++x) {
      F += p[x] * dx[x];
      ub = std::max(ub, dx[x]);
      if (cost) c += p[x] * (*cost)[x];
    }
    if (ub < out.best_ub) out.best_ub = ub;
    if (F > out.best_F) {
      out.best_F = F;
      out.I = I;
      out.cost = c;
      out.p = p;
    }
    if (out.best_ub - out.best_F < tol_nats) {
      out.converged = true;
      break;
    }
    double Z = 0;
    for (std::size_t x = 0; x < q; ++x) {
      w[x] = p[x] * std::exp(gamma * (dx[x] - ub));
      Z += w[x];
    }
    if (!(Z > 0) || !std::isfinite(Z)) {  // fall back to the plain update
      Z = 0;
      for (std::size_t x = 0; x < q; ++x) {
        w[x] = p[x] * std::exp(dx[x] - ub);
        Z += w[x];
      }
    }
    for (std::size_t x = 0; x < q; ++x) w[x] /= Z;
    if (sym_map)
      for (std::size_t x = 0; x < q; ++x) p[x] = 0.5 * (w[x] + w[(*sym_map)[x]]);
    else
      p.swap(w);
  }
  if (out.p.empty()) out.p = p;
  return out;
}

}  // namespace

SolverResult channel_capacity(const Dmc& ch, const SolverConfig& cfg) {
  const std::size_t q = ch.in_size, m = ch.out_size;
  Vec row_h(q);
  for (std::size_t x = 0; x < q; ++x) {
    double h = 0;
    for (std::size_t y = 0; y < m; ++y) {
      double t = ch.at(x, y);
      if (t > 0) h -= t * std::log(t);
    }
    row_h[x] = h;
  }
  Vec qy(m);
  auto dx_of = [&](const Vec& p, Vec& dx) {
    std::fill(qy.begin(), qy.end(), 0.0);
    for (std::size_t x = 0; x < q; ++x)
      if (p[x] > 0)
        for (std::size_t y = 0; y < m; ++y) qy[y] += p[x] * ch.at(x, y);
    double I = 0;
    for (std::size_t x = 0; x < q; ++x) {
      double cross = 0;
      for (std::size_t y = 0; y < m; ++y)
        if (ch.at(x, y) > 0) cross += ch.at(x, y) * std::log(qy[y]);
      dx[x] = -row_h[x] - cross;
      I += p[x] * dx[x];
    }
    return I;
  };
  auto out = ba_maximize(q, nullptr, 0.0, cfg.tolerance * kLog2, cfg.max_iterations, dx_of, nullptr);
  SolverResult r;
  r.lower_bound = out.best_F / kLog2;
  r.upper_bound = out.best_ub / kLog2;
  r.value = 0.5 * (r.lower_bound + r.upper_bound);
  r.argument = Pmf(out.p);
  r.iterations = out.iterations;
  r.converged = out.converged;
  return r;
}

namespace {

// One Blahut iteration sweep for R(D) at fixed multiplier lam (nats per unit
// distortion). Returns achievable points and a dual lower bound.
struct RdEval {
  double I_bits = 0, Ed = 0;
  double dual_lb_bits = -kInf;  // valid lower bound on R(D) for caller's D
  Dmc cond;                     // achieving conditional
  long iterations = 0;
  bool converged = false;
};

RdEval rd_fixed_lambda(const Pmf& src, const DistortionMeasure& d, double lam, double D,
                       double tol_nats, long max_iter) {
  const std::size_t ns = d.ns, nr = d.nr;
  Vec w(nr, 1.0 / double(nr));  // reproduction marginal
  Vec cond(ns * nr, 0.0);
  RdEval ev;
  double prev_obj = kInf;
  for (long it = 0; it < max_iter; ++it) {
    ev.iterations = it + 1;
    // q(r|s) ~ w_r exp(-lam d(s,r)); also the dual bound uses the row partition sums
    double dual = 0;  // -lam*D - sum_s p_s ln Z_s
    double I = 0, Ed = 0;
    Vec w_new(nr, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      if (src[s] <= 0) continue;
      double Z = 0;
      for (std::size_t r = 0; r < nr; ++r) Z += w[r] * std::exp(-lam * d.at(s, r));
      dual -= src[s] * std::log(Z);
      for (std::size_t r = 0; r < nr; ++r) {
        double q = w[r] * std::exp(-lam * d.at(s, r)) / Z;
        cond[s * nr + r] = q;
        w_new[r] += src[s] * q;
        if (q > 0 && w[r] > 0) I += src[s] * q * std::log(q / w[r]);
        Ed += src[s] * q * d.at(s, r);
      }
    }
    dual -= lam * D;
    ev.dual_lb_bits = std::max(ev.dual_lb_bits, dual / kLog2);
    ev.I_bits = I / kLog2;
    ev.Ed = Ed;
    double obj = I + lam * Ed;
    if (std::abs(prev_obj - obj) < tol_nats) {
      ev.converged = true;
      break;
    }
    prev_obj = obj;
    w = w_new;
  }
  Vec rows(ns * nr);
  for (std::size_t s = 0; s < ns; ++s) {
    double rs = 0;
    for (std::size_t r = 0; r < nr; ++r) rs += cond[s * nr + r];
    for (std::size_t r = 0; r < nr; ++r)
      rows[s * nr + r] = rs > 0 ? cond[s * nr + r] / rs : (r == 0 ? 1.0 : 0.0);
  }
  ev.cond = Dmc(ns, nr, rows);
  return ev;
}

}  // namespace

SolverResult rate_distortion(const Pmf& src, const DistortionMeasure& d, double D,
                             const SolverConfig& cfg) {
  if (D < 0) throw std::invalid_argument("rate_distortion: D must be >= 0");
  if (src.size() != d.ns) throw std::invalid_argument("rate_distortion: alphabet mismatch");
  const double dmax = d.d_max(src);
  SolverResult r;
  if (D >= dmax) {
    // rate-zero regime: constant reproduction at the minimizing letter
    std::size_t best = 0;
    double bv = kInf;
    for (std::size_t rr = 0; rr < d.nr; ++rr) {
      double e = 0;
      for (std::size_t s = 0; s < d.ns; ++s) e += src[s] * d.at(s, rr);
      if (e < bv - 1e-12) { bv = e; best = rr; }
    }
    r.value = r.lower_bound = r.upper_bound = 0.0;
    r.converged = true;
    r.argument = src;
    Vec rows(d.ns * d.nr, 0.0);
    for (std::size_t s = 0; s < d.ns; ++s) rows[s * d.nr + best] = 1.0;
    r.test_channel = Dmc(d.ns, d.nr, rows);
    return r;
  }

  const double tol_nats = cfg.tolerance * kLog2;
  const long per_eval = std::min<long>(cfg.max_iterations, 20000);
  struct Pt { double Ed, I_bits; Dmc cond; };
  std::vector<Pt> pts;
  double best_dual = 0.0;  // R(D) >= 0 always
  long total_it = 0;

  auto eval = [&](double lam) {
    auto ev = rd_fixed_lambda(src, d, lam, D, tol_nats * 0.1, per_eval);
    total_it += ev.iterations;
    pts.push_back({ev.Ed, ev.I_bits, ev.cond});
    best_dual = std::max(best_dual, ev.dual_lb_bits);
    return ev;
  };

  if (!cfg.lagrange_grid.empty()) {
    for (double lb_bits : cfg.lagrange_grid) eval(std::max(0.0, lb_bits) * kLog2);
  } else {
    // adaptive: bracket the target distortion, then bisect the multiplier
    double lo = 0.0, hi = 1.0;
    auto e_hi = eval(hi);
    while (e_hi.Ed > D && hi < 1e6) {
      hi *= 2;
      e_hi = eval(hi);
    }
    for (int k = 0; k < 80; ++k) {
      // current primal/dual envelope
      double ub = kInf;
      for (const auto& pt : pts)
        if (pt.Ed <= D + 1e-15) ub = std::min(ub, pt.I_bits);
      for (const auto& a : pts)
        for (const auto& b : pts)
          if (a.Ed > D && b.Ed <= D) {
            double t = (D - b.Ed) / (a.Ed - b.Ed);
            ub = std::min(ub, t * a.I_bits + (1 - t) * b.I_bits);
          }
      if (ub - best_dual < cfg.tolerance) break;
      double mid = 0.5 * (lo + hi);
      auto e = eval(mid);
      if (e.Ed > D) lo = mid;
      else hi = mid;
    }
  }

  double ub = kInf;
  const Dmc* best_cond = nullptr;
  for (const auto& pt : pts)
    if (pt.Ed <= D + 1e-15 && pt.I_bits < ub) { ub = pt.I_bits; best_cond = &pt.cond; }
  std::optional<Dmc> mixed_cond;
  for (const auto& a : pts)
    for (const auto& b : pts)
      if (a.Ed > D && b.Ed <= D) {
        double t = (D - b.Ed) / (a.Ed - b.Ed);
        double chord = t * a.I_bits + (1 - t) * b.I_bits;
        if (chord < ub) {
          ub = chord;
          // the mixed conditional meets the budget with equality, and mutual
          // information is convex in the conditional at fixed input, so its
          // rate is at most the chord value: a valid achiever for this ub
          Vec rows(a.cond.t.size());
          for (std::size_t i = 0; i < rows.size(); ++i)
            rows[i] = t * a.cond.t[i] + (1 - t) * b.cond.t[i];
          mixed_cond = Dmc(a.cond.in_size, a.cond.out_size, rows);
        }
      }
  if (!std::isfinite(ub)) throw std::runtime_error("rate_distortion: no feasible point found");
  if (mixed_cond) {
    // tighten the primal bound to the mixture's actual rate
    ub = std::min(ub, mutual_information(JointPmf::from_2d(src, *mixed_cond)));
    best_cond = nullptr;
  }
  r.lower_bound = std::min(best_dual, ub);
  r.upper_bound = ub;
  r.value = 0.5 * (r.lower_bound + r.upper_bound);
  r.iterations = total_it;
  r.converged = (r.upper_bound - r.lower_bound) <= cfg.tolerance;
  r.argument = src;
  if (mixed_cond) r.test_channel = *mixed_cond;
  else if (best_cond) r.test_channel = *best_cond;
  return r;
}

SolverResult distortion_rate(const Pmf& src, const DistortionMeasure& d, double R,
                             const SolverConfig& cfg) {
  if (R < 0) throw std::invalid_argument("distortion_rate: R must be >= 0");
  const double dmax = d.d_max(src);
  SolverResult r;
  if (R <= 0) {
    r.value = r.lower_bound = r.upper_bound = dmax;
    r.converged = true;
    r.argument = src;
    return r;
  }
  double lo = 0.0, hi = dmax;
  SolverConfig inner = cfg;
  inner.tolerance = std::max(cfg.tolerance, 1e-7);
  long total_it = 0;
  for (int k = 0; k < 50 && hi - lo > 1e-10 * std::max(1.0, dmax); ++k) {
    double mid = 0.5 * (lo + hi);
    auto rd = rate_distortion(src, d, mid, inner);
    total_it += rd.iterations;
    if (rd.value <= R) hi = mid;
    else lo = mid;
  }
  r.lower_bound = lo;
  r.upper_bound = hi;
  r.value = hi;  // D(R) = inf{D : R(D) <= R}; hi is always feasible
  r.iterations = total_it;
  r.converged = true;
  r.argument = src;
  return r;
}

// ---- additive structures ----

AdditiveStructure AdditiveStructure::from_group(const FiniteAbelianGroup& g, Vec cost) {
  if (cost.size() != g.order) throw std::invalid_argument("additive: cost size mismatch");
  AdditiveStructure s;
  s.kind = Kind::Group;
  s.group = g;
  s.q = g.order;
  s.cost = std::move(cost);
  return s;
}

AdditiveStructure AdditiveStructure::quadratic_line_grid(std::size_t q, double range) {
  AdditiveStructure s;
  s.kind = Kind::Line;
  s.q = q;
  s.cost.resize(q);
  for (std::size_t i = 0; i < q; ++i) {
    double x = -range + 2 * range * double(i) / double(q - 1);
    s.cost[i] = x * x;
  }
  return s;
}

AdditiveStructure AdditiveStructure::quadratic_cyclic_grid(std::size_t q, double range) {
  AdditiveStructure s;
  s.kind = Kind::Group;
  s.group = FiniteAbelianGroup::make_cyclic(q);
  s.q = q;
  s.cost.resize(q);
  // displacement k has signed magnitude min(k, q-k) grid steps
  const double h = 2 * range / double(q - 1);
  for (std::size_t k = 0; k < q; ++k) {
    double steps = double(std::min(k, q - k));
    s.cost[k] = (steps * h) * (steps * h);
  }
  return s;
}

Pmf AdditiveStructure::discrete_gaussian(double variance) const {
  Vec n(q);
  double Z = 0;
  for (std::size_t i = 0; i < q; ++i) {
    n[i] = std::exp(-cost[i] / (2 * variance));
    Z += n[i];
  }
  for (auto& x : n) x /= Z;
  return Pmf(std::move(n));
}

Pmf AdditiveStructure::gaussian_with_cost(double target) const {
  // bisection on the variance parameter so that E cost(N) == target
  double lo = 1e-6, hi = 1e6;
  auto ec = [&](double v) {
    auto g = discrete_gaussian(v);
    double e = 0;
    for (std::size_t i = 0; i < q; ++i) e += g[i] * cost[i];
    return e;
  };
  if (ec(hi) <= target) return discrete_gaussian(hi);
  for (int k = 0; k < 200; ++k) {
    double mid = std::sqrt(lo * hi);
    if (ec(mid) < target) lo = mid;
    else hi = mid;
  }
  return discrete_gaussian(lo);
}

namespace {

// Per-input BA exponents for the additive channel; handles Line / cyclic /
// table-group structures. Returns I(p) in nats.
struct AdditiveKernel {
  const AdditiveStructure& s;
  const Pmf& noise;
  double HN;  // noise entropy, nats
  Vec qy, lin, lq, conv;
  FixedConv conv_pN, conv_lqNr;

  AdditiveKernel(const AdditiveStructure& st, const Pmf& nz)
      : s(st), noise(nz), HN(entropy_nats(nz.p)) {
    const std::size_t q = s.q;
    if (s.kind == AdditiveStructure::Kind::Line || s.group.cyclic) {
      Vec nr(noise.p.rbegin(), noise.p.rend());
      conv_pN = FixedConv(noise.p, q);
      conv_lqNr = FixedConv(nr, 2 * q - 1);
    }
  }

  double operator()(const Vec& p, Vec& dx) {
    const std::size_t q = s.q;
    if (s.kind == AdditiveStructure::Kind::Line) {
      conv_pN.apply(p, qy);  // length 2q-1
      lq.resize(qy.size());
      for (std::size_t i = 0; i < qy.size(); ++i) lq[i] = std::log(std::max(qy[i], 1e-300));
      conv_lqNr.apply(lq, conv);  // cross[x] = sum_n N[n] lq[x+n] at offset x+q-1
      double I = 0;
      for (std::size_t x = 0; x < q; ++x) {
        dx[x] = -HN - conv[x + q - 1];
        I += p[x] * dx[x];
      }
      return I;
    }
    if (s.group.cyclic) {
      conv_pN.apply(p, lin);
      qy.assign(q, 0.0);
      for (std::size_t i = 0; i < lin.size(); ++i) qy[i % q] += lin[i];
      lq.resize(2 * q - 1);
      for (std::size_t i = 0; i < 2 * q - 1; ++i) lq[i] = std::log(std::max(qy[i % q], 1e-300));
      conv_lqNr.apply(lq, conv);
      double I = 0;
      for (std::size_t x = 0; x < q; ++x) {
        dx[x] = -HN - conv[x + q - 1];
        I += p[x] * dx[x];
      }
      return I;
    }
    // general table group
    qy.assign(q, 0.0);
    for (std::size_t x = 0; x < q; ++x)
      if (p[x] > 0)
        for (std::size_t n = 0; n < q; ++n) qy[s.group.add(x, n)] += p[x] * noise[n];
    double I = 0;
    for (std::size_t x = 0; x < q; ++x) {
      double cross = 0;
      for (std::size_t n = 0; n < q; ++n)
        if (noise[n] > 0) cross += noise[n] * std::log(std::max(qy[s.group.add(x, n)], 1e-300));
      dx[x] = -HN - cross;
      I += p[x] * dx[x];
    }
    return I;
  }

  // output law for the current p (valid after operator())
  const Vec& output() const { return qy; }
};

std::optional<std::vector<std::size_t>> symmetry_map(const AdditiveStructure& s, const Pmf& noise) {
  const std::size_t q = s.q;
  std::vector<std::size_t> map(q);
  if (s.kind == AdditiveStructure::Kind::Line) {
    for (std::size_t i = 0; i < q; ++i) map[i] = q - 1 - i;
  } else if (s.group.cyclic) {
    for (std::size_t i = 0; i < q; ++i) map[i] = (q - i) % q;
  } else {
    return std::nullopt;
  }
  for (std::size_t i = 0; i < q; ++i)
    if (std::abs(s.cost[i] - s.cost[map[i]]) > 1e-12 ||
        std::abs(noise[i] - noise[map[i]]) > 1e-12)
      return std::nullopt;
  return map;
}

}  // namespace

SolverResult constrained_additive_capacity(const Pmf& noise, const AdditiveStructure& s, double D,
                                           const SolverConfig& cfg) {
  const std::size_t q = s.q;
  if (noise.size() != q) throw std::invalid_argument("constrained_additive_capacity: noise size");
  double cmin = kInf;
  for (double c : s.cost) cmin = std::min(cmin, c);
  if (cmin > D) throw std::invalid_argument("constrained_additive_capacity: infeasible cost constraint");

  const double tol_nats = cfg.tolerance * kLog2;
  // per-multiplier cap: near the critical multiplier the alternating updates
  // stall, but the dual/time-sharing envelope across multipliers still closes
  const long per_eval = std::min<long>(cfg.max_iterations, 60000);
  auto sym = symmetry_map(s, noise);
  const std::vector<std::size_t>* symp = sym ? &*sym : nullptr;

  struct Pt { double I, c; Vec p; };       // nats
  struct Dual { double s_mult, ub; };      // nats
  std::vector<Pt> pts;
  std::vector<Dual> duals;
  long total_it = 0;
  AdditiveKernel kern(s, noise);

  auto eval = [&](double mult, long cap) {
    auto dx_of = [&](const Vec& p, Vec& dx) {
      double I = kern(p, dx);
      for (std::size_t x = 0; x < q; ++x) dx[x] -= mult * s.cost[x];
      return I;
    };
    auto out = ba_maximize(q, &s.cost, mult, tol_nats, cap, dx_of, symp, symp ? 1.9 : 1.0);
    total_it += out.iterations;
    pts.push_back({out.I, out.cost, out.p});
    duals.push_back({mult, out.best_ub});
    return out;
  };

  auto envelope = [&](double& lb, double& ub, Vec& arg) {
    ub = kInf;
    for (const auto& dl : duals) ub = std::min(ub, dl.ub + dl.s_mult * D);
    lb = 0.0;
    arg.clear();
    for (const auto& pt : pts)
      if (pt.c <= D + 1e-12 && pt.I > lb) { lb = pt.I; arg = pt.p; }
    for (const auto& a : pts)
      if (a.c > D)
        for (const auto& b : pts)
          if (b.c <= D) {
            double t = (D - b.c) / (a.c - b.c);
            double v = t * a.I + (1 - t) * b.I;
            if (v > lb) {
              lb = v;
              // time-sharing: report the mixed input law
              arg.resize(q);
              for (std::size_t x = 0; x < q; ++x) arg[x] = t * a.p[x] + (1 - t) * b.p[x];
            }
          }
  };

  if (!cfg.lagrange_grid.empty()) {
    for (double m_bits : cfg.lagrange_grid) eval(std::max(0.0, m_bits) * kLog2, per_eval);
  } else {
    auto e0 = eval(0.0, std::min<long>(per_eval, 5000));
    if (e0.cost <= D) {
      // the unconstrained optimum is feasible; polish it
      if (!e0.converged) eval(0.0, per_eval);
    } else {
      double lo = 0.0, hi = 1.0;
      auto e = eval(hi, per_eval);
      while (e.cost > D && hi < 1e9) {
        hi *= 2;
        e = eval(hi, per_eval);
      }
      for (int k = 0; k < 40; ++k) {
        double lb, ub;
        Vec arg;
        envelope(lb, ub, arg);
        // midpoint readout: a bracket of width 2*tol pins the value to +/- tol
        if (ub - lb < 2 * tol_nats) break;
        double mid = 0.5 * (lo + hi);
        auto em = eval(mid, per_eval);
        if (em.cost > D) lo = mid;
        else hi = mid;
      }
    }
  }

  double lb, ub;
  Vec arg;
  envelope(lb, ub, arg);
  SolverResult r;
  r.lower_bound = lb / kLog2;
  r.upper_bound = ub / kLog2;
  r.value = 0.5 * (r.lower_bound + r.upper_bound);
  r.iterations = total_it;
  r.converged = (r.upper_bound - r.lower_bound) <= 2 * cfg.tolerance;
  r.argument = arg.empty() ? Pmf::uniform(q) : Pmf(arg);
  return r;
}

namespace {

// gradient (nats) of N -> I(p*; X+N) at fixed maximizing input p*
Vec noise_subgradient(const AdditiveStructure& s, const Pmf& noise, const Vec& pstar) {
  const std::size_t q = s.q;
  AdditiveKernel kern(s, noise);
  Vec dx(q);
  kern(pstar, dx);
  const Vec& qy = kern.output();
  Vec g(q);
  if (s.kind == AdditiveStructure::Kind::Line) {
    for (std::size_t nu = 0; nu < q; ++nu) {
      double acc = 0;
      for (std::size_t x = 0; x < q; ++x)
        if (pstar[x] > 0) acc += pstar[x] * std::log(std::max(qy[x + nu], 1e-300));
      g[nu] = -acc + std::log(std::max(noise[nu], 1e-30));
    }
  } else {
    for (std::size_t nu = 0; nu < q; ++nu) {
      double acc = 0;
      for (std::size_t x = 0; x < q; ++x)
        if (pstar[x] > 0) acc += pstar[x] * std::log(std::max(qy[s.group.add(x, nu)], 1e-300));
      g[nu] = -acc + std::log(std::max(noise[nu], 1e-30));
    }
  }
  return g;
}

// min <g, S> over {S >= 0, sum S = 1, cost . S <= D}: an atom or a two-atom mix
Vec fw_vertex(const Vec& g, const Vec& cost, double D) {
  const std::size_t q = g.size();
  double best = kInf;
  Vec S(q, 0.0);
  std::size_t bi = q;
  for (std::size_t i = 0; i < q; ++i)
    if (cost[i] <= D && g[i] < best - 1e-15) { best = g[i]; bi = i; }
  S[bi] = 1.0;
  for (std::size_t a = 0; a < q; ++a) {
    if (cost[a] <= D) continue;
    for (std::size_t b = 0; b < q; ++b) {
      if (cost[b] > D) continue;
      double t = (D - cost[b]) / (cost[a] - cost[b]);
      double v = t * g[a] + (1 - t) * g[b];
      if (v < best - 1e-15) {
        best = v;
        std::fill(S.begin(), S.end(), 0.0);
        S[a] = t;
        S[b] = 1 - t;
      }
    }
  }
  return S;
}

}  // namespace

SolverResult worst_noise_capacity(const AdditiveStructure& s, double D, const SolverConfig& cfg) {
  const std::size_t q = s.q;
  double cmin = kInf, cuni = 0;
  for (double c : s.cost) { cmin = std::min(cmin, c); cuni += c / double(q); }
  if (cmin > D) throw std::invalid_argument("worst_noise_capacity: infeasible constraint");

  if (s.kind == AdditiveStructure::Kind::Group && cuni <= D) {
    // uniform noise is feasible and absorbing under the group operation
    SolverResult r;
    r.value = r.lower_bound = r.upper_bound = 0.0;
    r.argument = Pmf::uniform(q);
    r.converged = true;
    return r;
  }

  std::vector<Pmf> starts;
  starts.push_back(s.gaussian_with_cost(std::min(D, cuni * (1 - 1e-9))));  // max-entropy family
  if (cfg.multistart_count > 1) {
    // mostly-identity mix at the cost budget
    std::size_t id = 0;
    for (std::size_t i = 0; i < q; ++i)
      if (s.cost[i] < s.cost[id]) id = i;
    double alpha = std::min(1.0, (D - s.cost[id]) / std::max(cuni - s.cost[id], 1e-12));
    Vec v(q, alpha / double(q));
    v[id] += 1 - alpha;
    starts.push_back(Pmf(v));
  }
  SeededRng rng(0x5eedbeef, 7);  // fixed: the solver is a pure deterministic function
  for (int k = 2; k < cfg.multistart_count; ++k) {
    Vec v(q);
    double Z = 0;
    for (auto& x : v) { x = -std::log(rng.uniform() + 1e-300); Z += x; }
    for (auto& x : v) x /= Z;
    // scale toward the min-cost atom until feasible
    std::size_t id = 0;
    for (std::size_t i = 0; i < q; ++i)
      if (s.cost[i] < s.cost[id]) id = i;
    for (int t = 0; t < 60; ++t) {
      double ec = 0;
      for (std::size_t i = 0; i < q; ++i) ec += v[i] * s.cost[i];
      if (ec <= D) break;
      for (std::size_t i = 0; i < q; ++i) v[i] = 0.5 * v[i] + (i == id ? 0.5 : 0.0);
    }
    starts.push_back(Pmf(v));
  }

  SolverConfig inner = cfg;
  double best_ub = kInf, best_lb = -kInf;
  Pmf best_noise = starts[0];
  long total_it = 0;
  bool certified = false;

  // reflection map of the cost profile, when one exists: the objective and the
  // constraint are invariant under it, so descent directions may be
  // symmetrized, which keeps iterates in the fast symmetric regime
  std::vector<std::size_t> refl;
  {
    std::vector<std::size_t> map(q);
    bool ok = s.kind == AdditiveStructure::Kind::Line || s.group.cyclic;
    if (ok) {
      if (s.kind == AdditiveStructure::Kind::Line)
        for (std::size_t i = 0; i < q; ++i) map[i] = q - 1 - i;
      else
        for (std::size_t i = 0; i < q; ++i) map[i] = (q - i) % q;
      for (std::size_t i = 0; i < q && ok; ++i)
        if (std::abs(s.cost[i] - s.cost[map[i]]) > 1e-12) ok = false;
    }
    if (ok) refl = std::move(map);
  }

  for (const auto& start : starts) {
    Pmf N = start;
    int stalled = 0;  // FW steps without measurable progress on the value
    for (int t = 0; t < 30; ++t) {
      auto inner_res = constrained_additive_capacity(N, s, D, inner);
      total_it += inner_res.iterations;
      if (inner_res.upper_bound < best_ub - 0.02 * cfg.tolerance) {
        stalled = 0;
      } else if (++stalled >= 4) {
        // the certified value has plateaued well below the tolerance scale;
        // further steps only chase the (slow) linearization certificate
        break;
      }
      if (inner_res.upper_bound < best_ub) {
        best_ub = inner_res.upper_bound;
        best_noise = N;
      }
      Vec g = noise_subgradient(s, N, inner_res.argument.p);
      Vec S = fw_vertex(g, s.cost, D);
      double gap = 0;  // nats; computed at the true vertex so the bound is valid
      for (std::size_t i = 0; i < q; ++i) gap += g[i] * (N[i] - S[i]);
      // C(D,.) is convex in the noise law: value >= C(N) - gap
      best_lb = std::max(best_lb, inner_res.lower_bound - gap / kLog2);
      if (gap / kLog2 < cfg.tolerance || best_ub - best_lb <= 2 * cfg.tolerance) {
        certified = true;
        break;
      }
      if (!refl.empty()) {
        // step with the symmetrized vertex: same cost, keeps iterates symmetric
        Vec sym(q);
        for (std::size_t i = 0; i < q; ++i) sym[i] = 0.5 * (S[i] + S[refl[i]]);
        S = sym;
      }
      double eta = 2.0 / double(t + 3);  // damped: starts are near-optimal
      Vec next(q);
      for (std::size_t i = 0; i < q; ++i) next[i] = (1 - eta) * N[i] + eta * S[i];
      N = Pmf(next);
    }
    // the objective is convex in the noise law, so a linearization certificate
    // obtained at any point is global: further starts cannot beat best_lb
    if (certified) break;
  }

  SolverResult r;
  r.value = best_ub;  // reported value is the certified upper bound
  r.upper_bound = best_ub;
  r.lower_bound = std::min(best_lb, best_ub);
  r.argument = best_noise;
  r.iterations = total_it;
  r.converged = certified;
  return r;
}

}  // namespace sepnet
