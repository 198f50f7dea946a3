// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#ifndef BL_REVERSE_HPP
#define BL_REVERSE_HPP

#include <cstddef>
#include <vector>

#include "bl/finite_prob.hpp"
#include "bl/simplex_opt.hpp"

namespace bl {

/// Data of the reverse (multiple-access-channel) duality: MAC with input
/// alphabet X_1 x ... x X_m (row-major), per-input references Q_{X_j}, output
/// reference measure R_Y, and positive weights c_j.
struct ReverseProblem {
  Channel mac;
  std::vector<Dist> q_marginals;
  Measure r_y;
  std::vector<double> c;

  ReverseProblem(Channel mac_, std::vector<Dist> q_marginals_, Measure r_y_,
                 std::vector<double> c_);
  std::size_t m() const { return q_marginals.size(); }
  std::vector<std::size_t> input_sizes() const;
};

/// Joint law over the product input alphabet together with the marginals it
/// was required to match.
struct Coupling {
  Dist joint = Dist({1.0});
  std::vector<Dist> target_marginals;
};

struct CouplingResult {
  Coupling coupling;
  double value = 0.0;   // min D(P_Y || R_Y), +inf when infeasible
  double fw_gap = 0.0;  // Frank-Wolfe certificate at termination
  bool certified = false;  // exact linear oracle was available (m <= 2)
};

/// Minimizes D(P_Y||R_Y) over the transportation polytope of couplings with
/// the given marginals, by conditional gradient with an exact transportation
/// oracle for m = 2 (greedy cost-ordered filling for m > 2).
CouplingResult min_coupling_divergence(const std::vector<Dist>& marginals,
                                       const Channel& mac, const Measure& r_y,
                                       const OptimizerOptions& opts = {});

struct ReverseReport {
  double d_star = 0.0;
  std::vector<Dist> witness_marginals;
  Coupling witness_coupling;
  bool certified_by_grid = false;
};

// inf over marginal tuples of sum_j c_j D(P_j||Q_j) minus the coupled output
// divergence; deterministic grid + refinement when all marginals are binary
// and m <= 2, multi-start pattern search otherwise.
ReverseReport best_constant_reverse(const ReverseProblem& prob,
                                    const OptimizerOptions& opts = {});

struct SplitResult {
  std::vector<std::vector<double>> g;  // one potential per input alphabet
  double residual = 0.0;
  bool ambiguous = false;  // solution underdetermined beyond the usual gauge
};

/// Recovers the additive potentials g_j of the conditional relative
/// information at an optimal coupling by least squares on the coupling's
/// support, reporting the equality mismatch plus any off-support violation
/// of the one-sided inequality.
SplitResult splitting_extract(const Coupling& coupling, const Channel& mac,
                              const Measure& r_y, const std::vector<double>& c);

// F(y) = sup over the fiber phi^{-1}(y) of prod_j f_j(x_j)^{c_j}; zero on
// empty fibers. `phi` maps row-major product-input cells to output indices.
std::vector<double> sup_formula_F(const std::vector<std::vector<double>>& fs,
                                  const std::vector<std::size_t>& phi,
                                  const std::vector<double>& c,
                                  const std::vector<std::size_t>& input_sizes,
                                  std::size_t output_size);

struct ReverseVerification {
  bool admissible = false;
  double gap = 0.0;  // int F dR_Y - exp(d) prod_j (int f_j dQ_j)^{c_j}
};

ReverseVerification verify_reverse_functional(
    const ReverseProblem& prob, const std::vector<double>& big_f,
    const std::vector<std::vector<double>>& fs, double d);

// Row-major digit of index i along axis j.
std::size_t product_digit(std::size_t i, const std::vector<std::size_t>& sizes,
                          std::size_t axis);

}  // namespace bl

#endif  // BL_REVERSE_HPP
