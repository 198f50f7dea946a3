// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bl/reverse.hpp"
#include "oracles.hpp"

using namespace bl;

namespace {

Channel xor_mac() {
  // inputs (x1,x2) row-major over bits, output x1 ^ x2
  std::vector<Dist> rows{Dist::delta(2, 0), Dist::delta(2, 1),
                         Dist::delta(2, 1), Dist::delta(2, 0)};
  return Channel(rows);
}

ReverseProblem random_binary_reverse(std::mt19937_64& rng) {
  Channel mac = oracles::random_channel(rng, 4, 2);
  std::vector<Dist> qs{oracles::random_dist(rng, 2),
                       oracles::random_dist(rng, 2)};
  Measure r(oracles::random_dist(rng, 2));
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  return ReverseProblem(mac, qs, r, {unif(rng), unif(rng)});
}

double coupling_objective(const std::vector<double>& joint, const Channel& mac,
                          const Measure& r_y) {
  std::vector<double> py(mac.output_size(), 0.0);
  for (std::size_t i = 0; i < joint.size(); ++i)
    for (std::size_t y = 0; y < py.size(); ++y)
      py[y] += joint[i] * mac(y, i);
  return oracles::kl_brute(py, r_y.weights());
}

}  // namespace

TEST_CASE("min_coupling_divergence point values") {
  // identity MAC, product reference: independent coupling reaches zero
  std::vector<Dist> qs{Dist::bernoulli(0.3), Dist::bernoulli(0.6)};
  Measure prod_ref(product_dist(std::vector<Dist>{qs[0], qs[1]}));
  CouplingResult res =
      min_coupling_divergence(qs, Channel::identity(4), prod_ref);
  CHECK(res.value == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(res.certified);

  // XOR of fair bits against the fair reference: zero as well
  std::vector<Dist> fair{Dist::bernoulli(0.5), Dist::bernoulli(0.5)};
  CouplingResult res2 =
      min_coupling_divergence(fair, xor_mac(), Measure(Dist::bernoulli(0.5)));
  CHECK(res2.value == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("min_coupling_divergence matches segment scan on random problems") {
  std::mt19937_64 rng(81);
  for (int t = 0; t < 20; ++t) {
    Channel mac = oracles::random_channel(rng, 4, 2);
    std::vector<Dist> qs{oracles::random_dist(rng, 2),
                         oracles::random_dist(rng, 2)};
    Measure r(oracles::random_dist(rng, 2));
    CouplingResult res = min_coupling_divergence(qs, mac, r);
    // the binary transportation polytope is a segment; scan it densely
    double a0 = qs[0][0], b0 = qs[1][0];
    double lo = std::max(0.0, a0 + b0 - 1.0), hi = std::min(a0, b0);
    double oracle = kInf;
    for (int k = 0; k <= 20000; ++k) {
      double s = lo + (hi - lo) * k / 20000.0;
      std::vector<double> joint{s, a0 - s, b0 - s, 1.0 - a0 - b0 + s};
      for (double& v : joint) v = std::max(v, 0.0);
      oracle = std::min(oracle, coupling_objective(joint, mac, r));
    }
    CHECK(res.value == doctest::Approx(oracle).epsilon(1e-4));
    CHECK(res.value <= oracle + 1e-8);
    // marginal feasibility of the returned coupling
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t v = 0; v < 2; ++v) {
        double mass = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
          if (product_digit(i, {2, 2}, j) == v) mass += res.coupling.joint[i];
        CHECK(mass == doctest::Approx(qs[j][v]).epsilon(1e-9));
      }
  }
}

TEST_CASE("coupling value below random feasible couplings") {
  std::mt19937_64 rng(83);
  for (int t = 0; t < 5; ++t) {
    Channel mac = oracles::random_channel(rng, 4, 3);
    std::vector<Dist> qs{oracles::random_dist(rng, 2),
                         oracles::random_dist(rng, 2)};
    Measure r(oracles::random_dist(rng, 3));
    CouplingResult res = min_coupling_divergence(qs, mac, r);
    double a0 = qs[0][0], b0 = qs[1][0];
    double lo = std::max(0.0, a0 + b0 - 1.0), hi = std::min(a0, b0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
      double s = lo + (hi - lo) * unif(rng);
      std::vector<double> joint{s, a0 - s, b0 - s, 1.0 - a0 - b0 + s};
      for (double& v : joint) v = std::max(v, 0.0);
      CHECK(res.value <= coupling_objective(joint, mac, r) + 1e-9);
    }
  }
}

TEST_CASE("best_constant_reverse point values") {
  // m=1 point-to-point, c=1, R_Y = Q_Y: zero at P_X = Q_X
  Dist qx = Dist::bernoulli(0.3);
  Channel w = Channel::bsc(0.15);
  ReverseProblem p2p(w, {qx}, Measure(pushforward(qx, w)), {1.0});
  ReverseReport rep = best_constant_reverse(p2p);
  CHECK(rep.d_star == doctest::Approx(0.0).epsilon(1e-6));

  // m=1 identity channel, c=1, R_Y = Q_X
  ReverseProblem ident(Channel::identity(2), {qx}, Measure(qx), {1.0});
  CHECK(best_constant_reverse(ident).d_star ==
        doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("best_constant_reverse matches exhaustive grid") {
  std::mt19937_64 rng(89);
  for (int t = 0; t < 8; ++t) {
    ReverseProblem prob = random_binary_reverse(rng);
    ReverseReport rep = best_constant_reverse(prob);
    double oracle = oracles::reverse_dstar_grid(prob, 100, 400);
    CHECK(rep.d_star == doctest::Approx(oracle).epsilon(5e-3));
  }
}

TEST_CASE("splitting_extract point values") {
  // m=1: g1 = E[i|x] exactly, residual 0
  Dist qx = Dist::bernoulli(0.4);
  Channel w = Channel::bsc(0.2);
  Measure r(pushforward(qx, w));
  CouplingResult cr = min_coupling_divergence({qx}, w, r);
  SplitResult sp = splitting_extract(cr.coupling, w, r, {1.0});
  CHECK(sp.residual <= 1e-9);

  // independent optimal coupling with product-form relative information
  std::vector<Dist> qs{Dist::bernoulli(0.3), Dist::bernoulli(0.6)};
  Measure prod_ref(product_dist(std::vector<Dist>{qs[0], qs[1]}));
  CouplingResult ind =
      min_coupling_divergence(qs, Channel::identity(4), prod_ref);
  SplitResult sp2 = splitting_extract(ind.coupling, Channel::identity(4),
                                      prod_ref, {1.0, 1.0});
  CHECK(sp2.residual <= 1e-6);
}

TEST_CASE("splitting residual small at certified optima") {
  std::mt19937_64 rng(97);
  for (int t = 0; t < 10; ++t) {
    ReverseProblem prob = random_binary_reverse(rng);
    CouplingResult cr = min_coupling_divergence(prob.q_marginals, prob.mac,
                                                prob.r_y);
    if (cr.value == kInf) continue;
    SplitResult sp =
        splitting_extract(cr.coupling, prob.mac, prob.r_y, prob.c);
    CHECK(sp.residual <= 1e-4);
  }
}

TEST_CASE("sup_formula_F point values") {
  std::vector<std::vector<double>> fs{{0.5, 2.0}, {1.5, 0.25}};
  std::vector<double> c{1.0, 1.0};
  // bijective map on 2x2 -> 4 outputs: F(phi(x)) = product, no sup
  std::vector<std::size_t> bij{2, 0, 3, 1};
  std::vector<double> big = sup_formula_F(fs, bij, c, {2, 2}, 4);
  CHECK(big[2] == doctest::Approx(0.5 * 1.5));
  CHECK(big[0] == doctest::Approx(0.5 * 0.25));
  CHECK(big[3] == doctest::Approx(2.0 * 1.5));
  CHECK(big[1] == doctest::Approx(2.0 * 0.25));

  // constant map: single fiber, F = max product
  std::vector<std::size_t> cst{0, 0, 0, 0};
  std::vector<double> bigc = sup_formula_F(fs, cst, c, {2, 2}, 2);
  CHECK(bigc[0] == doctest::Approx(2.0 * 1.5));
  CHECK(bigc[1] == doctest::Approx(0.0));  // empty fiber

  // XOR map against brute-force fiber enumeration
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::vector<double>> rf{{unif(rng), unif(rng)},
                                        {unif(rng), unif(rng)}};
    std::vector<double> rc{0.7, 1.2};
    std::vector<std::size_t> xorm{0, 1, 1, 0};
    std::vector<double> got = sup_formula_F(rf, xorm, rc, {2, 2}, 2);
    std::vector<double> want(2, 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
      double prod = std::pow(rf[0][i / 2], rc[0]) * std::pow(rf[1][i % 2], rc[1]);
      want[xorm[i]] = std::max(want[xorm[i]], prod);
    }
    CHECK(got[0] == doctest::Approx(want[0]));
    CHECK(got[1] == doctest::Approx(want[1]));
  }
}

TEST_CASE("verify_reverse_functional point values") {
  Dist qx = Dist::bernoulli(0.3);
  Channel w = Channel::bsc(0.15);
  ReverseProblem p2p(w, {qx}, Measure(pushforward(qx, w)), {1.0});
  ReverseVerification v = verify_reverse_functional(
      p2p, std::vector<double>{1.0, 1.0}, {{1.0, 1.0}}, 0.0);
  CHECK(v.admissible);
  CHECK(v.gap == doctest::Approx(0.0));

  // constraint violation rejected, not scored
  ReverseVerification bad = verify_reverse_functional(
      p2p, std::vector<double>{0.1, 0.1}, {{1.0, 1.0}}, 0.0);
  CHECK(!bad.admissible);
}

TEST_CASE("reverse duality soundness and tightness") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  for (int t = 0; t < 5; ++t) {
    ReverseProblem prob = random_binary_reverse(rng);
    ReverseReport rep = best_constant_reverse(prob);

    // soundness: no admissible sampled (F, fs) violates the inequality at
    // d_star - 1e-6
    int admissible_seen = 0;
    for (int k = 0; k < 1000 || admissible_seen < 50; ++k) {
      if (k > 20000) break;
      std::vector<std::vector<double>> fs{{unif(rng), unif(rng)},
                                          {unif(rng), unif(rng)}};
      // build an F that satisfies the constraint by construction, then jitter
      std::vector<double> big(2, 0.0);
      for (std::size_t i = 0; i < 4; ++i) {
        double logprod = prob.c[0] * std::log(fs[0][i / 2]) +
                         prob.c[1] * std::log(fs[1][i % 2]);
        for (std::size_t y = 0; y < 2; ++y)
          if (prob.mac(y, i) > 0)
            big[y] = std::max(big[y], std::exp(logprod));
      }
      for (double& v : big) v *= 1.0 + unif(rng) * 0.05;
      ReverseVerification v =
          verify_reverse_functional(prob, big, fs, rep.d_star - 1e-6);
      if (!v.admissible) continue;
      ++admissible_seen;
      CHECK(v.gap >= -1e-6);
    }
    CHECK(admissible_seen > 0);

    // tightness: the proof's constructed pair closes the gap
    CouplingResult cr = min_coupling_divergence(rep.witness_marginals,
                                                prob.mac, prob.r_y);
    SplitResult sp = splitting_extract(cr.coupling, prob.mac, prob.r_y, prob.c);
    std::vector<std::vector<double>> fs;
    for (const auto& g : sp.g) {
      std::vector<double> f;
      for (double gi : g) f.push_back(std::exp(gi));
      fs.push_back(std::move(f));
    }
    // F = dP_Y/dR_Y at the optimal coupling
    std::vector<double> py(2, 0.0);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t y = 0; y < 2; ++y)
        py[y] += cr.coupling.joint[i] * prob.mac(y, i);
    std::vector<double> big(2, 0.0);
    for (std::size_t y = 0; y < 2; ++y)
      big[y] = prob.r_y[y] > 0 ? py[y] / prob.r_y[y] : 0.0;
    ReverseVerification v =
        verify_reverse_functional(prob, big, fs, rep.d_star);
    if (v.admissible) {
      double lhs = 0.0;
      for (std::size_t y = 0; y < 2; ++y) lhs += prob.r_y[y] * big[y];
      if (lhs > 1e-8) CHECK(v.gap >= -1e-3 * lhs);
    }
  }
}

TEST_CASE("reverse problem validation") {
  CHECK_THROWS_AS(
      ReverseProblem(Channel::identity(3),
                     {Dist::bernoulli(0.5), Dist::bernoulli(0.5)},
                     Measure(Dist::uniform(3)), {1.0, 1.0}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      ReverseProblem(Channel::identity(2), {Dist::bernoulli(0.5)},
                     Measure(Dist::uniform(2)), {0.0}),
      std::invalid_argument);
}
