// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#ifndef BL_SIMPLEX_OPT_HPP
#define BL_SIMPLEX_OPT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bl/finite_prob.hpp"

namespace bl {

// Objective over the probability simplex; may return +/-inf.
using SimplexFn = std::function<double(const std::vector<double>&)>;
// Euclidean gradient of the objective at an interior point.
using SimplexGrad = std::function<std::vector<double>(const std::vector<double>&)>;

struct OptimizerOptions {
  int restarts = 32;
  std::uint64_t seed = 0;
  int max_iters = 10000;
  double improvement_tol = 1e-10;
  int workers = 0;  // 0 = hardware concurrency
  // Deterministic certification grid is run when the simplex dimension is
  // at most grid_threshold; step depends on the dimension.
  int grid_threshold = 3;
  double grid_step_dim2 = 1e-3;
  double grid_step_dim3 = 1e-2;
  bool certify = true;
  // Extra deterministic starting points (e.g. the reference measure).
  std::vector<std::vector<double>> extra_starts;
};

struct SimplexMaxResult {
  double value = -kInf;
  std::vector<double> argmax;
  int restarts_used = 0;
  bool certified_by_grid = false;
};

/// Multi-start mirror ascent (multiplicative updates with backtracking line
/// search) for a possibly nonconcave objective on the n-simplex. When
/// n <= grid_threshold a deterministic grid sweep with local pattern-search
/// refinement is folded in as a certification oracle. If `grad` is empty a
/// central-difference gradient is used.
SimplexMaxResult maximize_on_simplex(const SimplexFn& f, const SimplexGrad& grad,
                                     std::size_t n, const OptimizerOptions& opts);

/// Enumerates all grid points p with entries k_i * step (sum k_i = 1/step),
/// invoking visit(p). Deterministic lexicographic order.
void for_each_simplex_grid_point(
    std::size_t n, double step,
    const std::function<void(const std::vector<double>&)>& visit);

/// Deterministic local refinement of `start` by coordinate-pair moves with a
/// shrinking step, clipped to the simplex. Returns the improved point value.
double pattern_refine_on_simplex(const SimplexFn& f, std::vector<double>& point,
                                 double initial_step, double final_step = 1e-9);

}  // namespace bl

#endif  // BL_SIMPLEX_OPT_HPP
