// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#ifndef BL_SPECIAL_HPP
#define BL_SPECIAL_HPP

#include <vector>

#include "bl/finite_prob.hpp"
#include "bl/simplex_opt.hpp"

namespace bl {

/// Hypercontractivity query: joint reference on Y1 x Y2 (row-major over
/// (y1, y2)) and exponents p1, p2 >= 1 (may be +inf).
struct HCQuery {
  Dist q_joint;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double p1 = 1.0;
  double p2 = 1.0;
};

// Largest c with D(P_X||Q_X) >= c D(P_Y||Q_Y) for all P_X, i.e. the infimum
// of the divergence ratio. Grid + local refinement for |X| <= 3, multi-start
// beyond. +inf when the output divergence is identically zero.
double sdpi_constant(const Dist& qx, const Channel& w,
                     const OptimizerOptions& opts = {});

// ||f||_{1/c} w.r.t. Q_Y minus E[exp(E[log f(Y)|X])]; nonnegative for every f
// exactly when c is a valid strong data processing constant.
double sdpi_functional_gap(const Dist& qx, const Channel& w, double c,
                           const std::vector<double>& f);

// inf_P [D(P||Q) - (1/p1) D(P1||Q1) - (1/p2) D(P2||Q2)]; (p1,p2) is
// hypercontractive iff the value is >= -tolerance.
double hc_entropy_deficit(const HCQuery& q, const OptimizerOptions& opts = {});

// (alpha/(alpha-1)) log E_Q[exp((alpha-1) g)] - log E_R[exp(alpha g)],
// evaluated with log-sum-exp shifts. Always a lower bound on D_alpha(Q||R).
double renyi_variational_objective(const std::vector<double>& g, double alpha,
                                   const Dist& q, const Dist& r);

struct RenyiVarResult {
  double value = 0.0;
  std::vector<double> g_star;
};

// Ascent over g for alpha > 1; +inf when Q is not dominated by R.
RenyiVarResult renyi_variational_max(double alpha, const Dist& q, const Dist& r,
                                     const OptimizerOptions& opts = {});

// Shearer's bound minus joint entropy for a joint law on A^m; >= 0.
double shearer_gap(const Dist& p_joint, std::size_t m);

// Counting-measure Loomis-Whitney slack: prod_j ||f_j||_{m-1} minus
// sum_{x in A^m} prod_j f_j(pi_j(x)), where pi_j deletes coordinate j.
double loomis_whitney_gap(const std::vector<std::vector<double>>& fs);

// Marginal of a row-major joint over given axis sizes, keeping `axis`.
Dist marginal_of(const Dist& joint, const std::vector<std::size_t>& sizes,
                 std::size_t axis);

}  // namespace bl

#endif  // BL_SPECIAL_HPP
