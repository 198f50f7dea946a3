// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include "bl/simplex_opt.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <thread>

namespace bl {

namespace {

constexpr double kGradClamp = 1e6;

std::vector<double> finite_diff_grad(const SimplexFn& f,
                                     const std::vector<double>& p) {
  const double h = 1e-7;
  std::vector<double> g(p.size(), 0.0);
  std::vector<double> q = p;
  for (std::size_t i = 0; i < p.size(); ++i) {
    q[i] = p[i] + h;
    double fp = f(q);
    q[i] = std::max(0.0, p[i] - h);
    double fm = f(q);
    q[i] = p[i];
    if (std::isfinite(fp) && std::isfinite(fm)) g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

void normalize(std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s += v;
  for (double& v : p) v /= s;
}

// One mirror-ascent run from a strictly positive start.
std::pair<double, std::vector<double>> ascend(const SimplexFn& f,
                                              const SimplexGrad& grad,
                                              std::vector<double> p,
                                              const OptimizerOptions& opts) {
  double fp = f(p);
  if (!std::isfinite(fp)) return {fp, std::move(p)};
  double eta = 1.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    std::vector<double> g = grad ? grad(p) : finite_diff_grad(f, p);
    double gmax = -kInf;
    for (double& v : g) {
      v = std::clamp(v, -kGradClamp, kGradClamp);
      gmax = std::max(gmax, v);
    }
    bool improved = false;
    eta = std::min(eta * 2.0, 1e6);
    while (eta > 1e-14) {
      std::vector<double> cand(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        cand[i] = p[i] * std::exp(eta * (g[i] - gmax));
      normalize(cand);
      double fc = f(cand);
      if (fc == kInf) return {kInf, std::move(cand)};
      if (fc > fp) {
        improved = fc - fp > opts.improvement_tol;
        p = std::move(cand);
        fp = fc;
        break;
      }
      eta *= 0.5;
    }
    if (!improved) break;
  }
  return {fp, std::move(p)};
}

void grid_rec(std::size_t coord, int remaining, int total,
              std::vector<double>& p,
              const std::function<void(const std::vector<double>&)>& visit) {
  if (coord + 1 == p.size()) {
    p[coord] = static_cast<double>(remaining) / total;
    visit(p);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    p[coord] = static_cast<double>(k) / total;
    grid_rec(coord + 1, remaining - k, total, p, visit);
  }
}

}  // namespace

void for_each_simplex_grid_point(
    std::size_t n, double step,
    const std::function<void(const std::vector<double>&)>& visit) {
  int total = static_cast<int>(std::lround(1.0 / step));
  std::vector<double> p(n, 0.0);
  grid_rec(0, total, total, p, visit);
}

double pattern_refine_on_simplex(const SimplexFn& f, std::vector<double>& point,
                                 double initial_step, double final_step) {
  double best = f(point);
  for (double s = initial_step; s >= final_step; s *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (std::size_t i = 0; i < point.size(); ++i) {
        for (std::size_t j = 0; j < point.size(); ++j) {
          if (i == j) continue;
          double delta = std::min(s, point[j]);
          if (delta <= 0.0) continue;
          std::vector<double> cand = point;
          cand[i] += delta;
          cand[j] -= delta;
          if (cand[j] < 1e-15) cand[j] = 0.0;
          double fc = f(cand);
          if (fc > best + 1e-15) {
            best = fc;
            point = std::move(cand);
            moved = true;
          }
        }
      }
    }
  }
  return best;
}

SimplexMaxResult maximize_on_simplex(const SimplexFn& f, const SimplexGrad& grad,
                                     std::size_t n,
                                     const OptimizerOptions& opts) {
  SimplexMaxResult res;
  res.argmax.assign(n, 1.0 / static_cast<double>(n));

  // Deterministic starts: uniform + caller-provided, then seeded Dirichlet(1).
  std::vector<std::vector<double>> starts;
  starts.push_back(res.argmax);
  for (const auto& s : opts.extra_starts)
    if (s.size() == n) starts.push_back(s);
  int total = std::max<int>(opts.restarts, static_cast<int>(starts.size()));
  for (int r = static_cast<int>(starts.size()); r < total; ++r) {
    std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + r);
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> p(n);
    for (double& v : p) v = exp1(rng) + 1e-12;
    normalize(p);
    starts.push_back(std::move(p));
  }

  // Interior floor so mirror updates stay strictly positive.
  for (auto& s : starts) {
    for (double& v : s) v = std::max(v, 1e-12);
    normalize(s);
  }

  int workers = opts.workers > 0
                    ? opts.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(starts.size())));

  std::vector<std::pair<double, std::vector<double>>> outcomes(starts.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= starts.size()) break;
      outcomes[i] = ascend(f, grad, starts[i], opts);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Ordered reduction: strict improvement only, so the result does not
  // depend on thread scheduling.
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].first > res.value) {
      res.value = outcomes[i].first;
      res.argmax = outcomes[i].second;
    }
  }
  res.restarts_used = static_cast<int>(starts.size());

  if (opts.certify && n <= static_cast<std::size_t>(opts.grid_threshold) &&
      res.value < kInf) {
    double step = n <= 2 ? opts.grid_step_dim2 : opts.grid_step_dim3;
    double best_grid = -kInf;
    std::vector<double> best_point;
    for_each_simplex_grid_point(n, step, [&](const std::vector<double>& p) {
      double v = f(p);
      if (v > best_grid) {
        best_grid = v;
        best_point = p;
      }
    });
    if (best_grid == kInf) {
      res.value = kInf;
      res.argmax = best_point;
    } else if (!best_point.empty()) {
      double refined = pattern_refine_on_simplex(f, best_point, step);
      if (refined > res.value) {
        res.value = refined;
        res.argmax = best_point;
      }
    }
    res.certified_by_grid = true;
  }
  return res;
}

}  // namespace bl
