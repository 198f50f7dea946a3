// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include <benchmark/benchmark.h>

#include <random>

#include <Eigen/Dense>

#include "bl/finite_prob.hpp"
#include "bl/forward.hpp"
#include "bl/gaussian.hpp"
#include "bl/reverse.hpp"
#include "bl/special.hpp"

namespace {

bl::Dist rand_dist(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> p(n);
  double s = 0.0;
  for (double& v : p) s += v = exp1(rng) + 1e-6;
  for (double& v : p) v /= s;
  return bl::Dist(std::move(p));
}

void BM_KLDivergence(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::size_t n = static_cast<std::size_t>(state.range(0));
  bl::Dist p = rand_dist(rng, n), q = rand_dist(rng, n);
  bl::Measure qm(q);
  for (auto _ : state) benchmark::DoNotOptimize(bl::kl_divergence(p, qm));
}
BENCHMARK(BM_KLDivergence)->Arg(4)->Arg(64)->Arg(1024);

void BM_ForwardConstantBinary(benchmark::State& state) {
  std::mt19937_64 rng(2);
  bl::ForwardProblem prob(rand_dist(rng, 2),
                          {bl::Channel({rand_dist(rng, 3), rand_dist(rng, 3)})},
                          {bl::Measure(rand_dist(rng, 3))}, {1.3});
  bl::OptimizerOptions opts;
  opts.restarts = static_cast<int>(state.range(0));
  opts.workers = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(bl::best_constant_entropy(prob, opts).d_star);
}
BENCHMARK(BM_ForwardConstantBinary)->Arg(4)->Arg(32);

void BM_SdpiBsc(benchmark::State& state) {
  bl::Dist qx = bl::Dist::uniform(2);
  bl::Channel w = bl::Channel::bsc(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(bl::sdpi_constant(qx, w));
}
BENCHMARK(BM_SdpiBsc);

void BM_CouplingMin(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::vector<bl::Dist> qs{rand_dist(rng, 2), rand_dist(rng, 2)};
  std::vector<bl::Dist> rows;
  for (int i = 0; i < 4; ++i) rows.push_back(rand_dist(rng, 3));
  bl::Channel mac(rows);
  bl::Measure r(rand_dist(rng, 3));
  for (auto _ : state)
    benchmark::DoNotOptimize(bl::min_coupling_divergence(qs, mac, r).value);
}
BENCHMARK(BM_CouplingMin);

void BM_WynerCI(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = gauss(rng);
  Eigen::MatrixXd sigma =
      b * b.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(bl::wyner_ci(sigma).value);
}
BENCHMARK(BM_WynerCI)->Arg(2)->Arg(4)->Arg(8);

void BM_MinimizeF0(benchmark::State& state) {
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  bl::GaussianProblem p;
  bl::GaussianChannel ch;
  Eigen::MatrixXd a(n, n), s(n, n), mm(n, n);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = gauss(rng);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = gauss(rng);
  for (Eigen::Index i = 0; i < mm.size(); ++i) mm(i) = gauss(rng);
  ch.A = a;
  ch.b = Eigen::VectorXd::Zero(n);
  ch.sigma_noise = s * s.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
  p.channels.push_back(std::move(ch));
  p.c = {0.8};
  p.c0 = 0.6;
  p.M = mm * mm.transpose() / static_cast<double>(n);
  for (auto _ : state) benchmark::DoNotOptimize(bl::minimize_f0(p).value);
}
BENCHMARK(BM_MinimizeF0)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
