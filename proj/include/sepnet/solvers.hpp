#pragma once
// Alternating-minimization solvers: channel capacity, rate-distortion R(D),
// distortion-rate D(R), cost-constrained additive-noise capacity C(D,N), and
// the minimax worst-noise capacity C_X(D). All values in bits.
#include <optional>

#include "sepnet/prob.hpp"

namespace sepnet {

struct SolverConfig {
  double tolerance = 1e-6;  // bits
  long max_iterations = 200000;
  Vec lagrange_grid;  // optional sweep for constrained problems; empty = adaptive
  int multistart_count = 4;
};

struct SolverResult {
  double value = 0, lower_bound = 0, upper_bound = 0;
  Pmf argument;  // optimizing input law (or noise law for the minimax solver)
  long iterations = 0;
  bool converged = false;
  std::optional<Dmc> test_channel;  // R(D)-achieving conditional when applicable
};

SolverResult channel_capacity(const Dmc& ch, const SolverConfig& cfg = {});

SolverResult rate_distortion(const Pmf& src, const DistortionMeasure& d, double D,
                             const SolverConfig& cfg = {});

SolverResult distortion_rate(const Pmf& src, const DistortionMeasure& d, double R,
                             const SolverConfig& cfg = {});

// Additive-noise channel structure: output = input "+" noise. The addition may
// be a finite Abelian group operation (outputs on the same alphabet) or real
// addition on a uniform grid (outputs on the 2q-1 point sum grid).
struct AdditiveStructure {
  enum class Kind { Group, Line };
  Kind kind = Kind::Group;
  FiniteAbelianGroup group;  // Kind::Group
  std::size_t q = 0;         // alphabet size of inputs and noise
  Vec cost;                  // per-letter cost d(x), indexed by displacement letter

  static AdditiveStructure from_group(const FiniteAbelianGroup& g, Vec cost);
  // Uniform grid of q points over [-range, range] with quadratic cost x^2.
  static AdditiveStructure quadratic_line_grid(std::size_t q, double range);
  // Same grid but with cyclic (mod-q) addition.
  static AdditiveStructure quadratic_cyclic_grid(std::size_t q, double range);
  std::size_t out_size() const { return kind == Kind::Line ? 2 * q - 1 : q; }
  // Discretized centered Gaussian on the displacement alphabet.
  Pmf discrete_gaussian(double variance) const;
  // Gaussian rescaled so that E cost(N) equals exactly target (when reachable).
  Pmf gaussian_with_cost(double target) const;
};

// sup over inputs with E cost(X) <= D of I(X; X+N).
SolverResult constrained_additive_capacity(const Pmf& noise, const AdditiveStructure& s, double D,
                                           const SolverConfig& cfg = {});

// inf over noise with E cost(N) <= D of constrained_additive_capacity.
// value/upper_bound: best evaluated C(D,N) (a true upper bound on C_X(D));
// argument: the certifying noise law; lower_bound: convexity certificate from
// the final linearization gap.
SolverResult worst_noise_capacity(const AdditiveStructure& s, double D,
                                  const SolverConfig& cfg = {});

}  // namespace sepnet
