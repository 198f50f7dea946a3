// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include "bl/finite_prob.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bl {

namespace {
constexpr double kSumTol = 1e-12;
}

Dist::Dist(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw std::invalid_argument("Dist: empty alphabet");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw std::invalid_argument("Dist: negative entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kSumTol)
    throw std::invalid_argument("Dist: entries do not sum to 1");
  for (double& v : p_) v /= sum;
}

Dist Dist::uniform(std::size_t n) {
  return Dist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Dist Dist::delta(std::size_t n, std::size_t atom) {
  if (atom >= n) throw std::invalid_argument("Dist::delta: atom out of range");
  std::vector<double> p(n, 0.0);
  p[atom] = 1.0;
  return Dist(std::move(p));
}

Dist Dist::bernoulli(double q) { return Dist({1.0 - q, q}); }

Measure::Measure(std::vector<double> weights, bool normalized)
    : w_(std::move(weights)), normalized_(normalized) {
  if (w_.empty()) throw std::invalid_argument("Measure: empty alphabet");
  for (double v : w_)
    if (!(v >= 0.0)) throw std::invalid_argument("Measure: negative entry");
  if (normalized_) {
    double sum = std::accumulate(w_.begin(), w_.end(), 0.0);
    if (std::fabs(sum - 1.0) > kSumTol)
      throw std::invalid_argument("Measure: marked normalized but sum != 1");
    for (double& v : w_) v /= sum;
  }
}

Measure::Measure(const Dist& d) : w_(d.probs()), normalized_(true) {}

Measure Measure::counting(std::size_t n) {
  return Measure(std::vector<double>(n, 1.0), false);
}

double Measure::total() const {
  return std::accumulate(w_.begin(), w_.end(), 0.0);
}

Channel::Channel(std::vector<Dist> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::invalid_argument("Channel: no rows");
  for (const Dist& r : rows_)
    if (r.size() != rows_.front().size())
      throw std::invalid_argument("Channel: ragged rows");
}

Channel Channel::identity(std::size_t n) {
  std::vector<Dist> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) rows.push_back(Dist::delta(n, i));
  return Channel(std::move(rows));
}

Channel Channel::bsc(double crossover) {
  return Channel({Dist({1.0 - crossover, crossover}),
                  Dist({crossover, 1.0 - crossover})});
}

Channel Channel::constant(std::size_t input_size, const Dist& out) {
  return Channel(std::vector<Dist>(input_size, out));
}

double xlog_ratio(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return kInf;
  return x * std::log(x / y);
}

double relative_information(const Dist& p, const Dist& q, std::size_t x) {
  if (x >= p.size() || x >= q.size())
    throw std::out_of_range("relative_information: index out of range");
  if (p[x] == 0.0 && q[x] == 0.0) return 0.0;
  if (q[x] == 0.0) return kInf;
  if (p[x] == 0.0) return -kInf;
  return std::log(p[x] / q[x]);
}

double kl_divergence(const Dist& p, const Measure& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double t = xlog_ratio(p[i], q[i]);
    if (t == kInf) return kInf;
    d += t;
  }
  return d;
}

double renyi_divergence(double alpha, const Dist& q, const Dist& r) {
  if (alpha == 1.0 || alpha <= 0.0)
    throw std::invalid_argument("renyi_divergence: alpha must be in (0,1) or (1,inf)");
  if (q.size() != r.size())
    throw std::invalid_argument("renyi_divergence: dimension mismatch");
  double s = 0.0;
  bool support_violation = false;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0.0) continue;
    if (r[i] == 0.0) {
      support_violation = true;
      continue;
    }
    s += std::pow(q[i], alpha) * std::pow(r[i], 1.0 - alpha);
  }
  if (alpha > 1.0) {
    if (support_violation) return kInf;
    return std::log(s) / (alpha - 1.0);
  }
  // alpha in (0,1): terms on Q\R vanish anyway; s=0 means disjoint supports.
  if (s == 0.0) return kInf;
  return std::log(s) / (alpha - 1.0);
}

Dist pushforward(const Dist& p, const Channel& w) {
  if (p.size() != w.input_size())
    throw std::invalid_argument("pushforward: dimension mismatch");
  std::vector<double> out(w.output_size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    for (std::size_t y = 0; y < out.size(); ++y) out[y] += p[x] * w(y, x);
  }
  double sum = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= sum;
  return Dist(std::move(out));
}

Measure pushforward(const Measure& p, const Channel& w) {
  if (p.size() != w.input_size())
    throw std::invalid_argument("pushforward: dimension mismatch");
  std::vector<double> out(w.output_size(), 0.0);
  for (std::size_t x = 0; x < p.size(); ++x)
    for (std::size_t y = 0; y < out.size(); ++y) out[y] += p[x] * w(y, x);
  return Measure(std::move(out), false);
}

Dist product_dist(std::span<const Dist> factors) {
  if (factors.empty()) throw std::invalid_argument("product_dist: empty list");
  std::vector<double> p{1.0};
  for (const Dist& f : factors) {
    std::vector<double> next;
    next.reserve(p.size() * f.size());
    for (double a : p)
      for (std::size_t j = 0; j < f.size(); ++j) next.push_back(a * f[j]);
    p = std::move(next);
  }
  return Dist(std::move(p));
}

double shannon_entropy(const Dist& p) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  return h;
}

}  // namespace bl
