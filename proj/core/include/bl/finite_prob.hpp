// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#ifndef BL_FINITE_PROB_HPP
#define BL_FINITE_PROB_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace bl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Probability mass function on a finite alphabet. Entries are validated on
/// construction (nonnegative, sum within 1e-12 of 1) and then renormalized
/// exactly so downstream optimizer loops cannot accumulate drift.
class Dist {
 public:
  explicit Dist(std::vector<double> probs);

  static Dist uniform(std::size_t n);
  static Dist delta(std::size_t n, std::size_t atom);
  // Bern(q): mass q on symbol 1, (1-q) on symbol 0.
  static Dist bernoulli(double q);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& probs() const { return p_; }

  bool operator==(const Dist&) const = default;

 private:
  std::vector<double> p_;
};

/// Nonnegative measure on a finite alphabet; need not be normalized (reference
/// measures and the counting measure are first-class).
class Measure {
 public:
  explicit Measure(std::vector<double> weights, bool normalized = false);
  Measure(const Dist& d);  // NOLINT: a Dist is a normalized Measure

  static Measure counting(std::size_t n);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const { return w_; }
  bool normalized() const { return normalized_; }
  double total() const;

 private:
  std::vector<double> w_;
  bool normalized_;
};

/// Row-stochastic conditional distribution between finite alphabets.
class Channel {
 public:
  explicit Channel(std::vector<Dist> rows);

  static Channel identity(std::size_t n);
  static Channel bsc(double crossover);
  // All rows equal to `out` (the output ignores the input).
  static Channel constant(std::size_t input_size, const Dist& out);

  std::size_t input_size() const { return rows_.size(); }
  std::size_t output_size() const { return rows_.front().size(); }
  const Dist& row(std::size_t x) const { return rows_[x]; }
  // W(y|x)
  double operator()(std::size_t y, std::size_t x) const { return rows_[x][y]; }

 private:
  std::vector<Dist> rows_;
};

// log dP/dQ at a point; 0 when P(x)=Q(x)=0, +inf when Q(x)=0<P(x).
double relative_information(const Dist& p, const Dist& q, std::size_t x);

// D(P||Q) in nats, +inf when P is not absolutely continuous w.r.t. Q.
// Against an unnormalized reference the value may be negative.
double kl_divergence(const Dist& p, const Measure& q);

// Renyi divergence of order alpha != 1 between probability measures.
double renyi_divergence(double alpha, const Dist& q, const Dist& r);

Dist pushforward(const Dist& p, const Channel& w);
Measure pushforward(const Measure& p, const Channel& w);

// Product measure on the product alphabet, row-major index order
// (the last factor varies fastest).
Dist product_dist(std::span<const Dist> factors);

double shannon_entropy(const Dist& p);

// x * ln(x/y) with the 0 ln 0 and 0 ln(0/0) conventions.
double xlog_ratio(double x, double y);

}  // namespace bl

#endif  // BL_FINITE_PROB_HPP
