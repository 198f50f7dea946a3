// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bl/forward.hpp"
#include "bl/special.hpp"
#include "oracles.hpp"

using namespace bl;

namespace {

// Doubly symmetric binary joint with correlation rho on {0,1}^2.
Dist dsbs(double rho) {
  double q = (1.0 + rho) / 4.0, r = (1.0 - rho) / 4.0;
  return Dist({q, r, r, q});
}

}  // namespace

TEST_CASE("sdpi_constant point values") {
  CHECK(sdpi_constant(Dist::bernoulli(0.3), Channel::identity(2)) ==
        doctest::Approx(1.0));
  double c = sdpi_constant(Dist::uniform(2), Channel::bsc(0.1));
  CHECK(c == doctest::Approx(1.5625).epsilon(1e-3));
  CHECK(c == doctest::Approx(oracles::sdpi_binary_grid(
                 Dist::uniform(2), Channel::bsc(0.1), 100000))
                 .epsilon(1e-3));
  CHECK(sdpi_constant(Dist::uniform(2),
                      Channel::constant(2, Dist::bernoulli(0.4))) == kInf);
  CHECK_THROWS_AS(sdpi_constant(Dist::delta(2, 0), Channel::bsc(0.1)),
                  std::invalid_argument);
}

TEST_CASE("sdpi constant is at least 1") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 6; ++t) {
    Dist qx = oracles::random_dist(rng, 2);
    Channel w = oracles::random_channel(rng, 2, 3);
    CHECK(sdpi_constant(qx, w) >= 1.0 - 1e-6);
  }
}

TEST_CASE("sdpi_functional_gap point values and equivalence") {
  Dist qx = Dist::uniform(2);
  Channel w = Channel::bsc(0.1);
  CHECK(sdpi_functional_gap(qx, w, 1.5625, {1.0, 1.0}) == doctest::Approx(0.0));

  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> unif(1e-3, 3.0);
  double worst = kInf;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> f{unif(rng), unif(rng)};
    worst = std::min(worst, sdpi_functional_gap(qx, w, 1.5625, f));
  }
  CHECK(worst >= -1e-6);

  // above the true constant an adversarial f (tight functions at the SDPI
  // optimizer, raised to the c-th power) breaks the inequality
  OptimizerOptions o;
  o.restarts = 8;
  double cstar = sdpi_constant(qx, w, o);
  // scan P for the largest violation at c = 1.6 > cstar
  double min_gap = kInf;
  for (int k = 1; k < 500; ++k) {
    Dist px = Dist::bernoulli(0.5 + 0.4 * k / 500.0);
    ForwardProblem fp(qx, {w}, {Measure(pushforward(qx, w))}, {1.6});
    TestFunctions tf = tight_test_functions(fp, px);
    min_gap = std::min(min_gap, sdpi_functional_gap(qx, w, 1.6, tf.f[0]));
  }
  CHECK(cstar < 1.6);
  CHECK(min_gap < 0.0);
}

TEST_CASE("hc_entropy_deficit point values") {
  // 1/p = 0 on both coordinates reduces to plain nonnegativity of D
  HCQuery inf_case{dsbs(0.5), 2, 2, kInf, kInf};
  CHECK(hc_entropy_deficit(inf_case) == doctest::Approx(0.0).epsilon(1e-8));

  // independent reference: superadditivity gives deficit 0 for any exponents
  std::vector<Dist> prod{Dist::bernoulli(0.3), Dist::bernoulli(0.6)};
  HCQuery indep{product_dist(prod), 2, 2, 1.1, 1.3};
  CHECK(hc_entropy_deficit(indep) == doctest::Approx(0.0).epsilon(1e-6));

  // DSBS rho=0.5: (p-1)^2 vs rho^2 boundary at p = 1.5
  HCQuery below{dsbs(0.5), 2, 2, 1.2, 1.2};
  CHECK(hc_entropy_deficit(below) < -1e-4);
  HCQuery above{dsbs(0.5), 2, 2, 2.0, 2.0};
  CHECK(hc_entropy_deficit(above) >= -1e-8);
}

TEST_CASE("hc_entropy_deficit monotone in the exponents") {
  HCQuery q{dsbs(0.4), 2, 2, 1.1, 1.1};
  double prev = hc_entropy_deficit(q);
  for (double p : {1.3, 1.6, 2.0, 3.0}) {
    q.p1 = q.p2 = p;
    double v = hc_entropy_deficit(q);
    CHECK(v >= prev - 1e-8);
    prev = v;
  }
}

TEST_CASE("renyi_variational_objective point values") {
  Dist q = Dist::bernoulli(0.5), r = Dist::bernoulli(0.25);
  CHECK(renyi_variational_objective({0.7, 0.7}, 2.0, q, r) ==
        doctest::Approx(0.0));
  CHECK(renyi_variational_objective({-3.0, -3.0}, 2.0, q, r) ==
        doctest::Approx(0.0));
  // the exact maximizer g = ln(dQ/dR) + const hits D_alpha
  std::vector<double> g{std::log(q[0] / r[0]), std::log(q[1] / r[1])};
  double target = renyi_divergence(2.0, q, r);
  CHECK(renyi_variational_objective(g, 2.0, q, r) ==
        doctest::Approx(target).epsilon(1e-9));
  // indicator ladders stay below D_alpha
  for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    std::vector<double> ind{0.0, beta};
    CHECK(renyi_variational_objective(ind, 2.0, q, r) <= target + 1e-12);
  }
}

TEST_CASE("renyi_variational_max point values") {
  OptimizerOptions o;
  o.restarts = 4;
  Dist u = Dist::bernoulli(0.35);
  RenyiVarResult same = renyi_variational_max(2.0, u, u, o);
  CHECK(same.value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(same.g_star[0] - same.g_star[1]) < 1e-4);

  Dist q = Dist::bernoulli(0.5), r = Dist::bernoulli(0.25);
  RenyiVarResult res = renyi_variational_max(2.0, q, r, o);
  CHECK(res.value == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-6));

  // Q not dominated by R: supremum is infinite
  RenyiVarResult esc = renyi_variational_max(2.0, Dist::bernoulli(0.5),
                                             Dist::bernoulli(1.0), o);
  CHECK(esc.value == kInf);
}

TEST_CASE("renyi_variational_max matches the closed form on random pairs") {
  std::mt19937_64 rng(61);
  OptimizerOptions o;
  o.restarts = 4;
  for (double alpha : {1.5, 2.0, 3.0}) {
    for (int t = 0; t < 6; ++t) {
      Dist q = oracles::random_dist(rng, 4);
      Dist r = oracles::random_dist(rng, 4);
      double target = renyi_divergence(alpha, q, r);
      RenyiVarResult res = renyi_variational_max(alpha, q, r, o);
      CHECK(res.value == doctest::Approx(target).epsilon(1e-6));
      // the induced density exp(g)/E_R[exp(g)] matches dQ/dR at the optimum
      double norm = 0.0;
      std::vector<double> dens(4);
      for (std::size_t i = 0; i < 4; ++i) {
        dens[i] = std::exp(res.g_star[i]);
        norm += r[i] * dens[i];
      }
      for (std::size_t i = 0; i < 4; ++i)
        CHECK(std::abs(dens[i] / norm - q[i] / r[i]) < 1e-4);
    }
  }
}

TEST_CASE("variational objective never exceeds the divergence") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  Dist q = oracles::random_dist(rng, 3);
  Dist r = oracles::random_dist(rng, 3);
  for (double alpha : {1.5, 2.0, 4.0}) {
    double target = renyi_divergence(alpha, q, r);
    for (int k = 0; k < 500; ++k) {
      std::vector<double> g{unif(rng), unif(rng), unif(rng)};
      CHECK(renyi_variational_objective(g, alpha, q, r) <= target + 1e-10);
    }
  }
}

TEST_CASE("shearer_gap point values") {
  // iid uniform bits, m=3: equality
  CHECK(shearer_gap(Dist::uniform(8), 3) == doctest::Approx(0.0));
  // fully correlated bits: (3/2) ln 2 - ln 2 = 0.5 ln 2
  Dist corr({0.5, 0, 0, 0, 0, 0, 0, 0.5});
  CHECK(shearer_gap(corr, 3) == doctest::Approx(0.5 * std::log(2.0)));
  CHECK_THROWS_AS(shearer_gap(Dist::uniform(6), 3), std::invalid_argument);
}

TEST_CASE("shearer_gap nonnegative, zero on products") {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 1000; ++t) {
    Dist p = oracles::random_dist(rng, 8, 0.2);
    CHECK(shearer_gap(p, 3) >= -1e-12);
  }
  for (int t = 0; t < 100; ++t) {
    std::vector<Dist> fs{oracles::random_dist(rng, 2),
                         oracles::random_dist(rng, 2),
                         oracles::random_dist(rng, 2)};
    CHECK(shearer_gap(product_dist(fs), 3) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("loomis_whitney_gap point values") {
  // constants: equality for the full cube
  std::vector<std::vector<double>> ones(3, std::vector<double>(4, 1.0));
  CHECK(loomis_whitney_gap(ones) == doctest::Approx(0.0));
  // consistent single-point indicators
  std::vector<std::vector<double>> pts(3, std::vector<double>(4, 0.0));
  pts[0][0] = pts[1][0] = pts[2][0] = 1.0;  // all point at (0,0)
  CHECK(loomis_whitney_gap(pts) >= -1e-12);
  CHECK_THROWS_AS(
      loomis_whitney_gap({{1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0}}),
      std::invalid_argument);
}

TEST_CASE("loomis_whitney_gap nonnegative on random triples") {
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int t = 0; t < 1000; ++t) {
    std::vector<std::vector<double>> fs(3, std::vector<double>(4));
    for (auto& f : fs)
      for (double& v : f) v = unif(rng);
    CHECK(loomis_whitney_gap(fs) >= -1e-12);
  }
}

TEST_CASE("marginal_of point values") {
  std::vector<Dist> fs{Dist::bernoulli(0.2), Dist::bernoulli(0.7)};
  Dist joint = product_dist(fs);
  Dist m0 = marginal_of(joint, {2, 2}, 0);
  Dist m1 = marginal_of(joint, {2, 2}, 1);
  CHECK(m0[1] == doctest::Approx(0.2));
  CHECK(m1[1] == doctest::Approx(0.7));
}
