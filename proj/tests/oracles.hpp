// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.
//
// Test-only reference oracles: brute-force enumerations and grids kept
// deliberately independent of the library's optimizer paths.

#ifndef BL_TESTS_ORACLES_HPP
#define BL_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "bl/finite_prob.hpp"
#include "bl/forward.hpp"
#include "bl/reverse.hpp"

namespace oracles {

inline constexpr double kInf = bl::kInf;

// Plain recursive simplex grid sweep (independent of bl::simplex_opt).
inline void sweep_simplex(std::size_t n, int steps,
                          const std::function<void(const std::vector<double>&)>& fn) {
  std::vector<double> p(n, 0.0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int rem) {
    if (i + 1 == n) {
      p[i] = static_cast<double>(rem) / steps;
      fn(p);
      return;
    }
    for (int k = 0; k <= rem; ++k) {
      p[i] = static_cast<double>(k) / steps;
      rec(i + 1, rem - k);
    }
  };
  rec(0, steps);
}

inline double kl_brute(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return kInf;
    d += p[i] * std::log(p[i] / q[i]);
  }
  return d;
}

// Grid supremum of the forward entropy objective, re-derived from scratch.
inline double forward_dstar_grid(const bl::ForwardProblem& prob, int steps) {
  double best = -kInf;
  sweep_simplex(prob.qx.size(), steps, [&](const std::vector<double>& p) {
    double d_pq = kl_brute(p, prob.qx.probs());
    if (d_pq == kInf) return;
    double v = -d_pq;
    for (std::size_t j = 0; j < prob.m(); ++j) {
      std::vector<double> py(prob.channels[j].output_size(), 0.0);
      for (std::size_t x = 0; x < p.size(); ++x)
        for (std::size_t y = 0; y < py.size(); ++y)
          py[y] += p[x] * prob.channels[j](y, x);
      double dj = kl_brute(py, prob.refs[j].weights());
      if (dj == kInf) {
        v = kInf;
        break;
      }
      v += prob.c[j] * dj;
    }
    best = std::max(best, v);
  });
  return best;
}

// Binary-input SDPI infimum by direct ratio scan.
inline double sdpi_binary_grid(const bl::Dist& qx, const bl::Channel& w,
                               int steps) {
  std::vector<double> qy(w.output_size(), 0.0);
  for (std::size_t x = 0; x < 2; ++x)
    for (std::size_t y = 0; y < qy.size(); ++y) qy[y] += qx[x] * w(y, x);
  double best = kInf;
  for (int k = 0; k <= steps; ++k) {
    std::vector<double> p{static_cast<double>(k) / steps,
                          1.0 - static_cast<double>(k) / steps};
    std::vector<double> py(qy.size(), 0.0);
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t y = 0; y < py.size(); ++y) py[y] += p[x] * w(y, x);
    double den = kl_brute(py, qy);
    if (den < 1e-300) continue;
    best = std::min(best, kl_brute(p, qx.probs()) / den);
  }
  return best;
}

// 2-D grid for the Gaussian Wyner program over diagonal Lambda.
inline double wyner_grid_2d(double s11, double s22, double s12, int steps) {
  double det_sigma = s11 * s22 - s12 * s12;
  double best = kInf;
  for (int i = 1; i <= steps; ++i) {
    double l1 = s11 * i / steps;
    for (int j = 1; j <= steps; ++j) {
      double l2 = s22 * j / steps;
      // Sigma - Lambda PSD for 2x2
      double a = s11 - l1, d = s22 - l2;
      if (a < 0 || d < 0 || a * d - s12 * s12 < 0) continue;
      best = std::min(best, 0.5 * std::log(det_sigma / (l1 * l2)));
    }
  }
  return best;
}

// Exhaustive reverse-constant oracle for binary m=2 problems: grid over both
// Bernoulli marginals, inner coupling segment scanned densely.
inline double reverse_dstar_grid(const bl::ReverseProblem& prob, int outer_steps,
                                 int inner_steps) {
  double best = kInf;
  for (int a = 0; a <= outer_steps; ++a) {
    double ta = static_cast<double>(a) / outer_steps;
    for (int b = 0; b <= outer_steps; ++b) {
      double tb = static_cast<double>(b) / outer_steps;
      std::vector<double> m1{1.0 - ta, ta}, m2{1.0 - tb, tb};
      double dsum = prob.c[0] * kl_brute(m1, prob.q_marginals[0].probs()) +
                    prob.c[1] * kl_brute(m2, prob.q_marginals[1].probs());
      if (dsum == kInf) continue;
      double lo = std::max(0.0, m1[0] + m2[0] - 1.0);
      double hi = std::min(m1[0], m2[0]);
      double inner_best = kInf;
      for (int k = 0; k <= inner_steps; ++k) {
        double s = lo + (hi - lo) * k / inner_steps;
        std::vector<double> joint{s, m1[0] - s, m2[0] - s,
                                  1.0 - m1[0] - m2[0] + s};
        for (double& v : joint) v = std::max(v, 0.0);
        std::vector<double> py(prob.mac.output_size(), 0.0);
        for (std::size_t i = 0; i < 4; ++i)
          for (std::size_t y = 0; y < py.size(); ++y)
            py[y] += joint[i] * prob.mac(y, i);
        double d = kl_brute(py, prob.r_y.weights());
        inner_best = std::min(inner_best, d);
      }
      if (inner_best == kInf) return -kInf;
      best = std::min(best, dsum - inner_best);
    }
  }
  return best;
}

inline bl::Dist random_dist(std::mt19937_64& rng, std::size_t n,
                            double zero_prob = 0.0) {
  std::exponential_distribution<double> exp1(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& v : p) {
    v = (zero_prob > 0.0 && unif(rng) < zero_prob) ? 0.0 : exp1(rng) + 1e-6;
    s += v;
  }
  if (s == 0.0) {
    p[0] = 1.0;
    s = 1.0;
  }
  for (double& v : p) v /= s;
  return bl::Dist(std::move(p));
}

inline bl::Channel random_channel(std::mt19937_64& rng, std::size_t in,
                                  std::size_t out) {
  std::vector<bl::Dist> rows;
  for (std::size_t i = 0; i < in; ++i) rows.push_back(random_dist(rng, out));
  return bl::Channel(std::move(rows));
}

}  // namespace oracles

#endif  // BL_TESTS_ORACLES_HPP
