// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include "bl/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bl {

namespace {

double divergence_ratio(const Dist& qx, const Channel& w, const Dist& qy,
                        const std::vector<double>& p) {
  Dist pd{std::vector<double>(p)};
  double den = kl_divergence(pushforward(pd, w), Measure(qy));
  // Below ~1e-9 both divergences are dominated by floating-point cancellation
  // (each is a quadratic-order difference of O(1) terms), so the ratio is
  // noise; the infimum near P = Q is recovered by the limit along the grid.
  if (den < 1e-9) return kInf;
  double num = std::max(kl_divergence(pd, Measure(qx)), 0.0);
  return num / den;
}

double lse(const std::vector<double>& weights, const std::vector<double>& expo) {
  double mx = -kInf;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) mx = std::max(mx, expo[i]);
  if (mx == -kInf) return -kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) s += weights[i] * std::exp(expo[i] - mx);
  return mx + std::log(s);
}

std::size_t ipow(std::size_t base, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= base;
  return r;
}

// Smallest a with a^m == n, or 0 if n is not a clean m-th power.
std::size_t mth_root(std::size_t n, std::size_t m) {
  for (std::size_t a = 1; ipow(a, m) <= n; ++a)
    if (ipow(a, m) == n) return a;
  return 0;
}

}  // namespace

double sdpi_constant(const Dist& qx, const Channel& w,
                     const OptimizerOptions& opts) {
  for (std::size_t x = 0; x < qx.size(); ++x)
    if (qx[x] == 0.0)
      throw std::invalid_argument("sdpi_constant: Q_X must have full support");
  Dist qy = pushforward(qx, w);
  for (std::size_t y = 0; y < qy.size(); ++y)
    if (qy[y] == 0.0)
      throw std::invalid_argument("sdpi_constant: Q_Y must have full support");

  // Degenerate channel: the output distribution never moves.
  double max_den = 0.0;
  for (std::size_t x = 0; x < qx.size(); ++x) {
    double den = kl_divergence(pushforward(Dist::delta(qx.size(), x), w),
                               Measure(qy));
    max_den = std::max(max_den, den);
  }
  if (max_den < 1e-12) return kInf;

  auto neg_ratio = [&](const std::vector<double>& p) {
    double r = divergence_ratio(qx, w, qy, p);
    return r == kInf ? -kInf : -r;
  };

  double best = kInf;
  std::vector<double> best_p;
  if (qx.size() <= 3) {
    double step = qx.size() == 2 ? 1e-5 : 1e-3;
    for_each_simplex_grid_point(qx.size(), step,
                                [&](const std::vector<double>& p) {
                                  double r = divergence_ratio(qx, w, qy, p);
                                  if (r < best) {
                                    best = r;
                                    best_p = p;
                                  }
                                });
    if (!best_p.empty()) {
      double refined = pattern_refine_on_simplex(neg_ratio, best_p, step);
      best = std::min(best, -refined);
    }
  } else {
    OptimizerOptions o = opts;
    o.certify = false;
    SimplexMaxResult r =
        maximize_on_simplex(neg_ratio, SimplexGrad{}, qx.size(), o);
    best = -r.value;
  }
  return best;
}

double sdpi_functional_gap(const Dist& qx, const Channel& w, double c,
                           const std::vector<double>& f) {
  if (!(c > 0.0)) throw std::invalid_argument("sdpi_functional_gap: c <= 0");
  Dist qy = pushforward(qx, w);
  double rhs_sum = 0.0;
  for (std::size_t y = 0; y < qy.size(); ++y)
    rhs_sum += qy[y] * std::pow(f[y], 1.0 / c);
  double rhs = std::pow(rhs_sum, c);
  double lhs = 0.0;
  for (std::size_t x = 0; x < qx.size(); ++x) {
    if (qx[x] == 0.0) continue;
    double expo = 0.0;
    bool zero = false;
    for (std::size_t y = 0; y < qy.size(); ++y) {
      if (w(y, x) == 0.0) continue;
      if (f[y] == 0.0) {
        zero = true;
        break;
      }
      expo += w(y, x) * std::log(f[y]);
    }
    if (!zero) lhs += qx[x] * std::exp(expo);
  }
  return rhs - lhs;
}

double hc_entropy_deficit(const HCQuery& q, const OptimizerOptions& opts) {
  if (q.n1 * q.n2 != q.q_joint.size())
    throw std::invalid_argument("hc_entropy_deficit: shape mismatch");
  for (std::size_t i = 0; i < q.q_joint.size(); ++i)
    if (q.q_joint[i] == 0.0)
      throw std::invalid_argument("hc_entropy_deficit: Q must have full support");
  if (!(q.p1 >= 1.0) || !(q.p2 >= 1.0))
    throw std::invalid_argument("hc_entropy_deficit: exponents must be >= 1");
  const double ip1 = std::isinf(q.p1) ? 0.0 : 1.0 / q.p1;
  const double ip2 = std::isinf(q.p2) ? 0.0 : 1.0 / q.p2;
  std::vector<std::size_t> sizes{q.n1, q.n2};
  Dist q1 = marginal_of(q.q_joint, sizes, 0);
  Dist q2 = marginal_of(q.q_joint, sizes, 1);

  auto deficit = [&](const Dist& p) {
    double dj = kl_divergence(p, Measure(q.q_joint));
    double d1 = kl_divergence(marginal_of(p, sizes, 0), Measure(q1));
    double d2 = kl_divergence(marginal_of(p, sizes, 1), Measure(q2));
    return dj - ip1 * d1 - ip2 * d2;
  };
  auto neg = [&](const std::vector<double>& p) {
    return -deficit(Dist{std::vector<double>(p)});
  };
  auto neg_grad = [&](const std::vector<double>& p) {
    Dist pd{std::vector<double>(p)};
    Dist p1 = marginal_of(pd, sizes, 0);
    Dist p2 = marginal_of(pd, sizes, 1);
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      std::size_t a = i / q.n2, b = i % q.n2;
      double v = 1.0 + std::log(std::max(p[i], 1e-300) / q.q_joint[i]);
      v -= ip1 * (1.0 + std::log(std::max(p1[a], 1e-300) / q1[a]));
      v -= ip2 * (1.0 + std::log(std::max(p2[b], 1e-300) / q2[b]));
      g[i] = -v;
    }
    return g;
  };

  OptimizerOptions o = opts;
  o.extra_starts.push_back(q.q_joint.probs());
  o.grid_threshold = std::max(o.grid_threshold, 4);  // certify the 2x2 case
  SimplexMaxResult r = maximize_on_simplex(neg, neg_grad, q.q_joint.size(), o);
  return -r.value;
}

double renyi_variational_objective(const std::vector<double>& g, double alpha,
                                   const Dist& q, const Dist& r) {
  if (!(alpha > 1.0))
    throw std::invalid_argument(
        "renyi_variational_objective: alpha must exceed 1");
  if (g.size() != q.size() || q.size() != r.size())
    throw std::invalid_argument("renyi_variational_objective: size mismatch");
  std::vector<double> e1(g.size()), e2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    e1[i] = (alpha - 1.0) * g[i];
    e2[i] = alpha * g[i];
  }
  return alpha / (alpha - 1.0) * lse(q.probs(), e1) - lse(r.probs(), e2);
}

RenyiVarResult renyi_variational_max(double alpha, const Dist& q, const Dist& r,
                                     const OptimizerOptions& opts) {
  if (!(alpha > 1.0))
    throw std::invalid_argument("renyi_variational_max: alpha must exceed 1");
  if (q.size() != r.size())
    throw std::invalid_argument("renyi_variational_max: size mismatch");
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i] > 0.0 && r[i] == 0.0) return {kInf, {}};

  const std::size_t n = q.size();
  auto ascend = [&](std::vector<double> g) {
    double val = renyi_variational_objective(g, alpha, q, r);
    double eta = 1.0;
    for (int it = 0; it < opts.max_iters; ++it) {
      // gradient: alpha * (tilted Q - tilted R)
      std::vector<double> tq(n, 0.0), tr(n, 0.0);
      double zq = 0.0, zr = 0.0, mx = *std::max_element(g.begin(), g.end());
      for (std::size_t i = 0; i < n; ++i) {
        tq[i] = q[i] * std::exp((alpha - 1.0) * (g[i] - mx));
        tr[i] = r[i] * std::exp(alpha * (g[i] - mx));
        zq += tq[i];
        zr += tr[i];
      }
      bool improved = false;
      eta = std::min(eta * 2.0, 1e4);
      while (eta > 1e-14) {
        std::vector<double> cand(n);
        for (std::size_t i = 0; i < n; ++i)
          cand[i] = g[i] + eta * alpha * (tq[i] / zq - tr[i] / zr);
        double cv = renyi_variational_objective(cand, alpha, q, r);
        if (cv > val) {
          improved = cv - val > opts.improvement_tol;
          g = std::move(cand);
          val = cv;
          break;
        }
        eta *= 0.5;
      }
      if (!improved) break;
    }
    return std::pair{val, std::move(g)};
  };

  // Starts: zero and the density-ratio tilt (exact stationary point when
  // supports agree).
  std::vector<std::vector<double>> starts;
  starts.emplace_back(n, 0.0);
  std::vector<double> tilt(n);
  for (std::size_t i = 0; i < n; ++i)
    tilt[i] = (q[i] > 0.0 && r[i] > 0.0) ? std::log(q[i] / r[i]) : -40.0;
  starts.push_back(std::move(tilt));

  RenyiVarResult best{-kInf, {}};
  for (auto& s : starts) {
    auto [v, g] = ascend(std::move(s));
    if (v > best.value) best = {v, std::move(g)};
  }
  // Canonical gauge: E_R[exp(g)] = 1.
  double z = lse(r.probs(), best.g_star);
  for (double& v : best.g_star) v -= z;
  return best;
}

Dist marginal_of(const Dist& joint, const std::vector<std::size_t>& sizes,
                 std::size_t axis) {
  std::size_t total = 1;
  for (std::size_t s : sizes) total *= s;
  if (total != joint.size())
    throw std::invalid_argument("marginal_of: shape mismatch");
  std::size_t stride = 1;
  for (std::size_t k = axis + 1; k < sizes.size(); ++k) stride *= sizes[k];
  std::vector<double> out(sizes[axis], 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i)
    out[(i / stride) % sizes[axis]] += joint[i];
  return Dist(std::move(out));
}

double shearer_gap(const Dist& p_joint, std::size_t m) {
  if (m < 2) throw std::invalid_argument("shearer_gap: need m >= 2");
  std::size_t a = mth_root(p_joint.size(), m);
  if (a == 0)
    throw std::invalid_argument("shearer_gap: alphabet is not an m-fold power");
  double lhs = shannon_entropy(p_joint);
  double rhs = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    // marginal over all coordinates except j
    std::vector<double> marg(ipow(a, m - 1), 0.0);
    for (std::size_t i = 0; i < p_joint.size(); ++i) {
      // digits of i in base a, most significant first
      std::size_t idx = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (k == j) continue;
        std::size_t digit = (i / ipow(a, m - 1 - k)) % a;
        idx = idx * a + digit;
      }
      marg[idx] += p_joint[i];
    }
    rhs += shannon_entropy(Dist(std::move(marg)));
  }
  return rhs / static_cast<double>(m - 1) - lhs;
}

double loomis_whitney_gap(const std::vector<std::vector<double>>& fs) {
  const std::size_t m = fs.size();
  if (m < 2) throw std::invalid_argument("loomis_whitney_gap: need m >= 2");
  std::size_t a = mth_root(fs.front().size(), m - 1);
  if (a == 0)
    throw std::invalid_argument("loomis_whitney_gap: inconsistent dimensions");
  for (const auto& f : fs) {
    if (f.size() != ipow(a, m - 1))
      throw std::invalid_argument("loomis_whitney_gap: inconsistent dimensions");
    for (double v : f)
      if (!(v >= 0.0))
        throw std::invalid_argument("loomis_whitney_gap: negative entry");
  }
  double lhs = 0.0;
  for (std::size_t i = 0; i < ipow(a, m); ++i) {
    double prod = 1.0;
    for (std::size_t j = 0; j < m && prod != 0.0; ++j) {
      std::size_t idx = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (k == j) continue;
        idx = idx * a + (i / ipow(a, m - 1 - k)) % a;
      }
      prod *= fs[j][idx];
    }
    lhs += prod;
  }
  double rhs = 1.0;
  const double pw = static_cast<double>(m - 1);
  for (const auto& f : fs) {
    double s = 0.0;
    for (double v : f) s += std::pow(v, pw);
    rhs *= std::pow(s, 1.0 / pw);
  }
  return rhs - lhs;
}

}  // namespace bl
