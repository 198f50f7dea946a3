// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#ifndef BL_FORWARD_HPP
#define BL_FORWARD_HPP

#include <vector>

#include "bl/finite_prob.hpp"
#include "bl/simplex_opt.hpp"

namespace bl {

/// Data of the forward (broadcast-channel) duality: reference input Q_X, m
/// channels X -> Y_j, reference measures R_j on each output, and positive
/// weights c_j.
struct ForwardProblem {
  Dist qx;
  std::vector<Channel> channels;
  std::vector<Measure> refs;
  std::vector<double> c;

  ForwardProblem(Dist qx_, std::vector<Channel> channels_,
                 std::vector<Measure> refs_, std::vector<double> c_);
  std::size_t m() const { return channels.size(); }
};

/// Nonnegative test functions, one vector per output alphabet.
struct TestFunctions {
  std::vector<std::vector<double>> f;
};

struct DualityReport {
  double d_star = 0.0;
  Dist argmax_p = Dist({1.0});
  double functional_gap = 0.0;
  int n_restarts_used = 0;
  bool certified_by_grid = false;
};

// sum_j c_j D(P W_j || R_j) - D(P || Q_X). The extremal constant of the
// entropy-side inequality is the supremum of this over P.
double entropy_objective(const ForwardProblem& prob, const Dist& p);

// Supremum of entropy_objective over the input simplex. +inf (with a
// witnessing argmax) when some reachable output mass escapes a reference's
// support.
DualityReport best_constant_entropy(const ForwardProblem& prob,
                                    const OptimizerOptions& opts);

// E_{Q_X}[exp(sum_j E[log f_j(Y_j)|X] - d)], a zero factor where log 0 occurs
// with positive channel weight.
double functional_lhs(const ForwardProblem& prob, const TestFunctions& f,
                      double d);

// prod_j (sum_y R_j(y) f_j(y)^{1/c_j})^{c_j}
double functional_rhs(const ForwardProblem& prob, const TestFunctions& f);

// f_j = (dP_{Y_j}/dR_j)^{c_j}; throws on support violation.
TestFunctions tight_test_functions(const ForwardProblem& prob, const Dist& p);

/// Auxiliary tilted measures with their log-normalizers. S_X tilts Q_X by the
/// conditional relative information of the pushforwards; S_{Y_j} tilts R_j by
/// f_j^{1/c_j}.
struct ProofWitnesses {
  Dist s_x = Dist({1.0});
  std::vector<Dist> s_y;
  double d0 = 0.0;
  std::vector<double> d_j;
};

ProofWitnesses proof_witnesses(const ForwardProblem& prob, const Dist& p,
                               const TestFunctions& f);

}  // namespace bl

#endif  // BL_FORWARD_HPP
