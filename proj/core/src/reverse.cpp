// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include "bl/reverse.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace bl {

namespace {

constexpr double kSupportTol = 1e-9;

std::size_t product_size(const std::vector<std::size_t>& sizes) {
  std::size_t n = 1;
  for (std::size_t s : sizes) n *= s;
  return n;
}

// --- exact transportation oracle (m = 2) via successive shortest paths ---
//
// Bipartite min-cost flow with continuous capacities; node layout:
// 0 = source, 1..n1 = left, n1+1..n1+n2 = right, n1+n2+1 = sink.
struct FlowArc {
  int to;
  double cap;
  double cost;
  int rev;
};

class MinCostFlow {
 public:
  explicit MinCostFlow(int n) : graph_(n) {}

  void add(int from, int to, double cap, double cost) {
    graph_[from].push_back(
        {to, cap, cost, static_cast<int>(graph_[to].size())});
    graph_[to].push_back(
        {from, 0.0, -cost, static_cast<int>(graph_[from].size()) - 1});
  }

  // Sends up to `want` units from s to t; returns the amount actually sent.
  double run(int s, int t, double want) {
    double sent = 0.0;
    while (want - sent > 1e-14) {
      // Bellman-Ford on the residual graph (costs may be negative).
      const int n = static_cast<int>(graph_.size());
      std::vector<double> dist(n, kInf);
      std::vector<int> pv(n, -1), pe(n, -1);
      dist[s] = 0.0;
      for (int round = 0; round < n; ++round) {
        bool any = false;
        for (int u = 0; u < n; ++u) {
          if (dist[u] == kInf) continue;
          for (int e = 0; e < static_cast<int>(graph_[u].size()); ++e) {
            const FlowArc& a = graph_[u][e];
            if (a.cap <= 1e-15) continue;
            if (dist[u] + a.cost < dist[a.to] - 1e-15) {
              dist[a.to] = dist[u] + a.cost;
              pv[a.to] = u;
              pe[a.to] = e;
              any = true;
            }
          }
        }
        if (!any) break;
      }
      if (dist[t] == kInf) break;
      double push = want - sent;
      for (int v = t; v != s; v = pv[v])
        push = std::min(push, graph_[pv[v]][pe[v]].cap);
      for (int v = t; v != s; v = pv[v]) {
        FlowArc& a = graph_[pv[v]][pe[v]];
        a.cap -= push;
        graph_[v][a.rev].cap += push;
      }
      sent += push;
    }
    return sent;
  }

  double flow_on(int from, int arc_index) const {
    const FlowArc& a = graph_[from][arc_index];
    return graph_[a.to][a.rev].cap;  // residual of the reverse arc
  }

 private:
  std::vector<std::vector<FlowArc>> graph_;
};

struct LmoResult {
  std::vector<double> point;
  bool feasible = false;
};

LmoResult lmo_m2(const std::vector<double>& cost,
                 const std::vector<Dist>& marginals,
                 const std::vector<char>& forbidden) {
  const std::size_t n1 = marginals[0].size(), n2 = marginals[1].size();
  MinCostFlow mcf(static_cast<int>(n1 + n2 + 2));
  const int s = 0, t = static_cast<int>(n1 + n2 + 1);
  for (std::size_t i = 0; i < n1; ++i)
    mcf.add(s, static_cast<int>(i + 1), marginals[0][i], 0.0);
  // arc bookkeeping: cell (i,j) is the j-th forward arc added from node i+1
  std::vector<std::vector<int>> arc_of(n1, std::vector<int>(n2, -1));
  for (std::size_t i = 0; i < n1; ++i) {
    int count = 0;
    for (std::size_t j = 0; j < n2; ++j) {
      std::size_t cell = i * n2 + j;
      if (forbidden[cell]) continue;
      mcf.add(static_cast<int>(i + 1), static_cast<int>(n1 + 1 + j), 2.0,
              cost[cell]);
      // forward arcs from node i+1 appear after the (possible) residual arcs;
      // track by insertion order instead of absolute index
      arc_of[i][j] = count++;
    }
  }
  for (std::size_t j = 0; j < n2; ++j)
    mcf.add(static_cast<int>(n1 + 1 + j), t, marginals[1][j], 0.0);

  double sent = mcf.run(s, t, 1.0);
  LmoResult res;
  if (sent < 1.0 - 1e-9) return res;
  res.feasible = true;
  res.point.assign(n1 * n2, 0.0);
  // Recover flows: forward arcs from left node i+1 are ordered, but the node
  // also holds the residual arc back to the source; enumerate and match.
  for (std::size_t i = 0; i < n1; ++i) {
    int seen = 0;
    for (std::size_t j = 0; j < n2; ++j) {
      if (arc_of[i][j] < 0) continue;
      // skip the residual arc to the source (index 0 in node i+1's list)
      res.point[i * n2 + j] =
          mcf.flow_on(static_cast<int>(i + 1), 1 + seen * 1);
      ++seen;
    }
  }
  return res;
}

// Greedy cost-ordered filling for m > 2; a feasible vertex-like point, not a
// certified linear minimizer.
LmoResult lmo_greedy(const std::vector<double>& cost,
                     const std::vector<Dist>& marginals,
                     const std::vector<char>& forbidden,
                     const std::vector<std::size_t>& sizes) {
  const std::size_t n = cost.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
  std::vector<std::vector<double>> rem;
  for (const Dist& mj : marginals) rem.push_back(mj.probs());
  std::vector<double> point(n, 0.0);
  double placed = 0.0;
  bool progress = true;
  while (placed < 1.0 - 1e-12 && progress) {
    progress = false;
    for (std::size_t idx : order) {
      if (forbidden[idx]) continue;
      double amt = 1.0 - placed;
      for (std::size_t j = 0; j < sizes.size(); ++j)
        amt = std::min(amt, rem[j][product_digit(idx, sizes, j)]);
      if (amt <= 1e-14) continue;
      point[idx] += amt;
      placed += amt;
      for (std::size_t j = 0; j < sizes.size(); ++j)
        rem[j][product_digit(idx, sizes, j)] -= amt;
      progress = true;
      if (placed >= 1.0 - 1e-12) break;
    }
  }
  LmoResult res;
  res.feasible = placed >= 1.0 - 1e-9;
  if (res.feasible) {
    double s = std::accumulate(point.begin(), point.end(), 0.0);
    for (double& v : point) v /= s;
    res.point = std::move(point);
  }
  return res;
}

std::vector<double> output_law(const std::vector<double>& joint,
                               const Channel& mac) {
  std::vector<double> py(mac.output_size(), 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (joint[i] == 0.0) continue;
    for (std::size_t y = 0; y < py.size(); ++y) py[y] += joint[i] * mac(y, i);
  }
  return py;
}

double output_divergence(const std::vector<double>& joint, const Channel& mac,
                         const Measure& r_y) {
  std::vector<double> py = output_law(joint, mac);
  double d = 0.0;
  for (std::size_t y = 0; y < py.size(); ++y) {
    double t = xlog_ratio(py[y], r_y[y]);
    if (t == kInf) return kInf;
    d += t;
  }
  return d;
}

}  // namespace

std::size_t product_digit(std::size_t i, const std::vector<std::size_t>& sizes,
                          std::size_t axis) {
  std::size_t stride = 1;
  for (std::size_t k = axis + 1; k < sizes.size(); ++k) stride *= sizes[k];
  return (i / stride) % sizes[axis];
}

ReverseProblem::ReverseProblem(Channel mac_, std::vector<Dist> q_marginals_,
                               Measure r_y_, std::vector<double> c_)
    : mac(std::move(mac_)),
      q_marginals(std::move(q_marginals_)),
      r_y(std::move(r_y_)),
      c(std::move(c_)) {
  if (q_marginals.empty() || q_marginals.size() != c.size())
    throw std::invalid_argument("ReverseProblem: need m >= 1 marginals and c");
  for (double cj : c)
    if (!(cj > 0.0)) throw std::invalid_argument("ReverseProblem: c_j must be > 0");
  if (mac.input_size() != product_size(input_sizes()))
    throw std::invalid_argument("ReverseProblem: MAC input size mismatch");
  if (mac.output_size() != r_y.size())
    throw std::invalid_argument("ReverseProblem: R_Y size mismatch");
}

std::vector<std::size_t> ReverseProblem::input_sizes() const {
  std::vector<std::size_t> s;
  for (const Dist& d : q_marginals) s.push_back(d.size());
  return s;
}

CouplingResult min_coupling_divergence(const std::vector<Dist>& marginals,
                                       const Channel& mac, const Measure& r_y,
                                       const OptimizerOptions& opts) {
  std::vector<std::size_t> sizes;
  for (const Dist& d : marginals) sizes.push_back(d.size());
  const std::size_t n = product_size(sizes);
  if (mac.input_size() != n || mac.output_size() != r_y.size())
    throw std::invalid_argument("min_coupling_divergence: dimension mismatch");
  const bool exact_lmo = marginals.size() <= 2;

  // Cells whose output mass would escape supp(R_Y) must stay empty.
  std::vector<char> forbidden(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t y = 0; y < r_y.size(); ++y)
      if (mac(y, i) > 0.0 && r_y[y] == 0.0) forbidden[i] = 1;

  auto lmo = [&](const std::vector<double>& cost) {
    if (marginals.size() == 1) {
      LmoResult r;
      for (std::size_t i = 0; i < n; ++i)
        if (forbidden[i] && marginals[0][i] > 0.0) return r;
      r.feasible = true;
      r.point = marginals[0].probs();
      return r;
    }
    return exact_lmo ? lmo_m2(cost, marginals, forbidden)
                     : lmo_greedy(cost, marginals, forbidden, sizes);
  };

  CouplingResult out;
  out.certified = exact_lmo;
  out.coupling.target_marginals = marginals;

  // Two binary marginals: the polytope is a segment, solved directly by
  // bisection on the directional derivative.
  if (marginals.size() == 2 && sizes[0] == 2 && sizes[1] == 2) {
    const double ma = marginals[0][0], mb = marginals[1][0];
    double lo = std::max(0.0, ma + mb - 1.0), hi = std::min(ma, mb);
    // joint(s) = (s, ma - s, mb - s, 1 - ma - mb + s)
    bool infeasible = false;
    auto pin = [&](double s_req) {
      if (s_req < lo - 1e-12 || s_req > hi + 1e-12) infeasible = true;
      lo = hi = std::clamp(s_req, lo, hi);
    };
    if (forbidden[0]) pin(0.0);
    if (forbidden[1]) pin(ma);
    if (forbidden[2]) pin(mb);
    if (forbidden[3]) pin(ma + mb - 1.0);
    auto joint_at = [&](double s) {
      return std::vector<double>{s, std::max(0.0, ma - s),
                                 std::max(0.0, mb - s),
                                 std::max(0.0, 1.0 - ma - mb + s)};
    };
    if (infeasible) {
      out.value = kInf;
      out.coupling.joint = Dist::uniform(n);
      return out;
    }
    auto dval = [&](double s) {
      std::vector<double> py = output_law(joint_at(s), mac);
      double d = 0.0;
      for (std::size_t y = 0; y < py.size(); ++y) {
        double slope = mac(y, 0) - mac(y, 1) - mac(y, 2) + mac(y, 3);
        if (slope == 0.0) continue;
        d += slope * (1.0 + std::log(std::max(py[y], 1e-300) /
                                     std::max(r_y[y], 1e-300)));
      }
      return d;
    };
    double s_star;
    if (hi - lo < 1e-15) {
      s_star = lo;
    } else if (dval(lo) >= 0.0) {
      s_star = lo;
    } else if (dval(hi) <= 0.0) {
      s_star = hi;
    } else {
      double a = lo, b = hi;
      for (int k = 0; k < 100; ++k) {
        double mid = 0.5 * (a + b);
        (dval(mid) <= 0.0 ? a : b) = mid;
      }
      s_star = 0.5 * (a + b);
    }
    std::vector<double> joint = joint_at(s_star);
    double ssum = std::accumulate(joint.begin(), joint.end(), 0.0);
    for (double& v : joint) v /= ssum;
    out.value = output_divergence(joint, mac, r_y);
    out.fw_gap = 0.0;
    out.coupling.joint = Dist(std::move(joint));
    return out;
  }

  // Feasible start; with m = 1 the polytope is a single point.
  LmoResult start = lmo(std::vector<double>(n, 0.0));
  if (!start.feasible) {
    out.value = kInf;
    out.coupling.joint = Dist::uniform(n);
    return out;
  }
  std::vector<double> joint = std::move(start.point);
  if (marginals.size() >= 2) {
    // Blend toward the independence coupling where allowed, to start in the
    // relative interior of the feasible face.
    std::vector<double> indep(n, 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (forbidden[i]) continue;
      double v = 1.0;
      for (std::size_t j = 0; j < sizes.size(); ++j)
        v *= marginals[j][product_digit(i, sizes, j)];
      indep[i] = v;
      mass += v;
    }
    if (mass > 1.0 - 1e-12) {
      for (std::size_t i = 0; i < n; ++i)
        joint[i] = 0.5 * joint[i] + 0.5 * indep[i] / mass;
    }
  }

  double value = output_divergence(joint, mac, r_y);
  double gap = kInf;
  const int max_iters = std::max(opts.max_iters, 50000);
  for (int it = 0; it < max_iters; ++it) {
    std::vector<double> py = output_law(joint, mac);
    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (forbidden[i]) {
        grad[i] = 1e18;
        continue;
      }
      double g = 0.0;
      for (std::size_t y = 0; y < py.size(); ++y) {
        if (mac(y, i) == 0.0) continue;
        g += mac(y, i) *
             (1.0 + std::log(std::max(py[y], 1e-300) / r_y[y]));
      }
      grad[i] = g;
    }
    LmoResult v = lmo(grad);
    if (!v.feasible) break;
    gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap += (joint[i] - v.point[i]) * grad[i];
    if (gap <= 1e-8) break;
    // Exact line search along the segment (the objective is convex).
    std::vector<double> dir(n);
    for (std::size_t i = 0; i < n; ++i) dir[i] = v.point[i] - joint[i];
    std::vector<double> dy(py.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (dir[i] == 0.0) continue;
      for (std::size_t y = 0; y < dy.size(); ++y) dy[y] += dir[i] * mac(y, i);
    }
    auto dphi = [&](double t) {
      double s = 0.0;
      for (std::size_t y = 0; y < py.size(); ++y) {
        if (dy[y] == 0.0) continue;
        double m = py[y] + t * dy[y];
        s += dy[y] * (1.0 + std::log(std::max(m, 1e-300) / r_y[y]));
      }
      return s;
    };
    double t = 1.0;
    if (dphi(1.0) > 0.0) {
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 80; ++k) {
        double mid = 0.5 * (lo + hi);
        (dphi(mid) <= 0.0 ? lo : hi) = mid;
      }
      t = 0.5 * (lo + hi);
    }
    if (t <= 0.0) break;
    for (std::size_t i = 0; i < n; ++i)
      joint[i] = std::max(0.0, joint[i] + t * dir[i]);
    double s = std::accumulate(joint.begin(), joint.end(), 0.0);
    for (double& v2 : joint) v2 /= s;
    double nv = output_divergence(joint, mac, r_y);
    if (value - nv < 1e-15 && gap < 1e-6) {
      value = std::min(value, nv);
      break;
    }
    value = nv;
  }
  out.value = value;
  out.fw_gap = gap == kInf ? 0.0 : gap;
  out.coupling.joint = Dist(joint);
  return out;
}

namespace {

double reverse_objective(const ReverseProblem& prob,
                         const std::vector<Dist>& marginals,
                         const OptimizerOptions& opts, CouplingResult* cr) {
  double s = 0.0;
  for (std::size_t j = 0; j < prob.m(); ++j) {
    double d = kl_divergence(marginals[j], Measure(prob.q_marginals[j]));
    if (d == kInf) return kInf;
    s += prob.c[j] * d;
  }
  CouplingResult r =
      min_coupling_divergence(marginals, prob.mac, prob.r_y, opts);
  if (cr) *cr = r;
  if (r.value == kInf) return -kInf;
  return s - r.value;
}

}  // namespace

ReverseReport best_constant_reverse(const ReverseProblem& prob,
                                    const OptimizerOptions& opts) {
  OptimizerOptions inner = opts;
  inner.max_iters = 50000;
  auto eval = [&](const std::vector<Dist>& marginals) {
    return reverse_objective(prob, marginals, inner, nullptr);
  };

  const std::vector<std::size_t> sizes = prob.input_sizes();
  bool all_binary = std::all_of(sizes.begin(), sizes.end(),
                                [](std::size_t s) { return s == 2; });

  double best = kInf;
  std::vector<Dist> best_marg = prob.q_marginals;
  auto consider = [&](const std::vector<Dist>& marg) {
    double v = eval(marg);
    if (v < best) {
      best = v;
      best_marg = marg;
    }
  };

  bool certified = false;
  if (all_binary && prob.m() <= 2) {
    const double step = 1e-2;
    const int kGrid = static_cast<int>(std::lround(1.0 / step));
    if (prob.m() == 1) {
      for (int a = 0; a <= kGrid; ++a)
        consider({Dist::bernoulli(static_cast<double>(a) / kGrid)});
    } else {
      for (int a = 0; a <= kGrid; ++a)
        for (int b = 0; b <= kGrid; ++b)
          consider({Dist::bernoulli(static_cast<double>(a) / kGrid),
                    Dist::bernoulli(static_cast<double>(b) / kGrid)});
    }
    // Local refinement on the Bernoulli parameters.
    for (double s = step; s >= 1e-6; s *= 0.5) {
      bool moved = true;
      while (moved) {
        moved = false;
        for (std::size_t j = 0; j < prob.m(); ++j) {
          for (double dir : {+1.0, -1.0}) {
            std::vector<Dist> cand = best_marg;
            double t = std::clamp(cand[j][1] + dir * s, 0.0, 1.0);
            cand[j] = Dist::bernoulli(t);
            double v = eval(cand);
            if (v < best - 1e-14) {
              best = v;
              best_marg = std::move(cand);
              moved = true;
            }
          }
        }
      }
    }
    certified = true;
  } else {
    // Multi-start pattern search: mass moves within each marginal simplex.
    std::vector<std::vector<Dist>> starts;
    starts.push_back(prob.q_marginals);
    std::vector<Dist> unif;
    for (std::size_t sz : sizes) unif.push_back(Dist::uniform(sz));
    starts.push_back(std::move(unif));
    std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + 17);
    std::exponential_distribution<double> exp1(1.0);
    for (int r = 0; r < std::max(2, opts.restarts / 4); ++r) {
      std::vector<Dist> marg;
      for (std::size_t sz : sizes) {
        std::vector<double> p(sz);
        double s = 0.0;
        for (double& v : p) s += (v = exp1(rng) + 1e-9);
        for (double& v : p) v /= s;
        marg.push_back(Dist(std::move(p)));
      }
      starts.push_back(std::move(marg));
    }
    for (auto& st : starts) {
      std::vector<Dist> cur = st;
      double curv = eval(cur);
      for (double s = 0.25; s >= 1e-5; s *= 0.5) {
        bool moved = true;
        while (moved) {
          moved = false;
          for (std::size_t j = 0; j < prob.m(); ++j) {
            for (std::size_t a = 0; a < sizes[j]; ++a) {
              for (std::size_t b = 0; b < sizes[j]; ++b) {
                if (a == b) continue;
                double delta = std::min(s, cur[j][b]);
                if (delta <= 0.0) continue;
                std::vector<double> p = cur[j].probs();
                p[a] += delta;
                p[b] -= delta;
                if (p[b] < 1e-15) p[b] = 0.0;
                std::vector<Dist> cand = cur;
                cand[j] = Dist(std::move(p));
                double v = eval(cand);
                if (v < curv - 1e-14) {
                  curv = v;
                  cur = std::move(cand);
                  moved = true;
                }
              }
            }
          }
        }
      }
      if (curv < best) {
        best = curv;
        best_marg = cur;
      }
    }
  }

  ReverseReport rep;
  rep.d_star = best;
  rep.witness_marginals = best_marg;
  if (std::isfinite(best)) {
    CouplingResult cr;
    reverse_objective(prob, best_marg, inner, &cr);
    rep.witness_coupling = cr.coupling;
  }
  rep.certified_by_grid = certified;
  return rep;
}

SplitResult splitting_extract(const Coupling& coupling, const Channel& mac,
                              const Measure& r_y,
                              const std::vector<double>& c) {
  const std::vector<Dist>& marg = coupling.target_marginals;
  if (marg.size() != c.size())
    throw std::invalid_argument("splitting_extract: c size mismatch");
  std::vector<std::size_t> sizes;
  for (const Dist& d : marg) sizes.push_back(d.size());
  const std::size_t n = coupling.joint.size();
  if (n != product_size(sizes) || mac.input_size() != n)
    throw std::invalid_argument("splitting_extract: dimension mismatch");

  std::vector<double> py = output_law(coupling.joint.probs(), mac);
  std::vector<double> cond(n, 0.0);  // E[i_{P_Y||R_Y}(Y) | X^m = x^m]
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    for (std::size_t y = 0; y < py.size(); ++y) {
      if (mac(y, i) == 0.0) continue;
      e += mac(y, i) *
           std::log(std::max(py[y], 1e-300) / std::max(r_y[y], 1e-300));
    }
    cond[i] = e;
  }

  std::vector<std::size_t> offsets(sizes.size(), 0);
  std::size_t cols = 0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    offsets[j] = cols;
    cols += sizes[j];
  }
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i)
    if (coupling.joint[i] > kSupportTol) support.push_back(i);

  Eigen::MatrixXd a(static_cast<Eigen::Index>(support.size()),
                    static_cast<Eigen::Index>(cols));
  a.setZero();
  Eigen::VectorXd b(static_cast<Eigen::Index>(support.size()));
  for (std::size_t r = 0; r < support.size(); ++r) {
    for (std::size_t j = 0; j < sizes.size(); ++j)
      a(static_cast<Eigen::Index>(r),
        static_cast<Eigen::Index>(offsets[j] +
                                  product_digit(support[r], sizes, j))) = c[j];
    b(static_cast<Eigen::Index>(r)) = cond[support[r]];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  Eigen::VectorXd g = svd.solve(b);

  SplitResult out;
  // The additive gauge (shifting the g_j by constants with zero weighted sum)
  // always leaves m-1 null directions; anything beyond that is genuine
  // rank deficiency of the support system.
  Eigen::Index expected_rank =
      std::min<Eigen::Index>(static_cast<Eigen::Index>(support.size()),
                             static_cast<Eigen::Index>(cols - (sizes.size() - 1)));
  out.ambiguous = svd.rank() < expected_rank;

  out.g.resize(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    out.g[j].resize(sizes[j]);
    for (std::size_t x = 0; x < sizes[j]; ++x)
      out.g[j][x] = g(static_cast<Eigen::Index>(offsets[j] + x));
  }

  double eq_res = 0.0;
  Eigen::VectorXd fit = a * g;
  for (std::size_t r = 0; r < support.size(); ++r)
    eq_res = std::max(eq_res,
                      std::fabs(fit(static_cast<Eigen::Index>(r)) -
                                b(static_cast<Eigen::Index>(r))));
  double ineq_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (coupling.joint[i] > kSupportTol) continue;
    double rhs = 0.0;
    for (std::size_t j = 0; j < sizes.size(); ++j)
      rhs += c[j] * out.g[j][product_digit(i, sizes, j)];
    ineq_res = std::max(ineq_res, rhs - cond[i]);
  }
  out.residual = eq_res + ineq_res;
  return out;
}

std::vector<double> sup_formula_F(const std::vector<std::vector<double>>& fs,
                                  const std::vector<std::size_t>& phi,
                                  const std::vector<double>& c,
                                  const std::vector<std::size_t>& input_sizes,
                                  std::size_t output_size) {
  const std::size_t n = product_size(input_sizes);
  if (phi.size() != n || fs.size() != input_sizes.size() ||
      fs.size() != c.size())
    throw std::invalid_argument("sup_formula_F: dimension mismatch");
  std::vector<double> big_f(output_size, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (phi[i] >= output_size)
      throw std::invalid_argument("sup_formula_F: phi out of range");
    double prod = 1.0;
    for (std::size_t j = 0; j < fs.size(); ++j)
      prod *= std::pow(fs[j][product_digit(i, input_sizes, j)], c[j]);
    big_f[phi[i]] = std::max(big_f[phi[i]], prod);
  }
  return big_f;
}

ReverseVerification verify_reverse_functional(
    const ReverseProblem& prob, const std::vector<double>& big_f,
    const std::vector<std::vector<double>>& fs, double d) {
  const std::vector<std::size_t> sizes = prob.input_sizes();
  const std::size_t n = prob.mac.input_size();
  ReverseVerification out;
  for (std::size_t i = 0; i < n; ++i) {
    double qmass = 1.0;
    for (std::size_t j = 0; j < sizes.size(); ++j)
      qmass *= prob.q_marginals[j][product_digit(i, sizes, j)];
    if (qmass == 0.0) continue;  // constraint is Q-almost-sure
    double rhs = 0.0;
    bool rhs_ninf = false;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      double fx = fs[j][product_digit(i, sizes, j)];
      if (fx == 0.0) {
        rhs_ninf = true;
        break;
      }
      rhs += prob.c[j] * std::log(fx);
    }
    if (rhs_ninf) continue;
    double lhs = 0.0;
    bool lhs_ninf = false;
    for (std::size_t y = 0; y < prob.mac.output_size(); ++y) {
      if (prob.mac(y, i) == 0.0) continue;
      if (big_f[y] == 0.0) {
        lhs_ninf = true;
        break;
      }
      lhs += prob.mac(y, i) * std::log(big_f[y]);
    }
    if (lhs_ninf || lhs < rhs - 1e-9) return out;  // rejected
  }
  out.admissible = true;
  double lhs_int = 0.0;
  for (std::size_t y = 0; y < prob.r_y.size(); ++y)
    lhs_int += prob.r_y[y] * big_f[y];
  double rhs_prod = std::exp(d);
  for (std::size_t j = 0; j < prob.m(); ++j) {
    double s = 0.0;
    for (std::size_t x = 0; x < sizes[j]; ++x)
      s += prob.q_marginals[j][x] * fs[j][x];
    rhs_prod *= std::pow(s, prob.c[j]);
  }
  out.gap = lhs_int - rhs_prod;
  return out;
}

}  // namespace bl
