// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include "bl/forward.hpp"

#include <cmath>
#include <stdexcept>

namespace bl {

ForwardProblem::ForwardProblem(Dist qx_, std::vector<Channel> channels_,
                               std::vector<Measure> refs_,
                               std::vector<double> c_)
    : qx(std::move(qx_)),
      channels(std::move(channels_)),
      refs(std::move(refs_)),
      c(std::move(c_)) {
  if (channels.empty() || channels.size() != refs.size() ||
      channels.size() != c.size())
    throw std::invalid_argument("ForwardProblem: need m >= 1 channels, refs, c");
  for (double cj : c)
    if (!(cj > 0.0)) throw std::invalid_argument("ForwardProblem: c_j must be > 0");
  for (std::size_t j = 0; j < channels.size(); ++j) {
    if (channels[j].input_size() != qx.size())
      throw std::invalid_argument("ForwardProblem: channel input size mismatch");
    if (channels[j].output_size() != refs[j].size())
      throw std::invalid_argument("ForwardProblem: reference size mismatch");
  }
}

double entropy_objective(const ForwardProblem& prob, const Dist& p) {
  if (p.size() != prob.qx.size())
    throw std::invalid_argument("entropy_objective: dimension mismatch");
  double d_pq = kl_divergence(p, Measure(prob.qx));
  if (d_pq == kInf) return -kInf;
  double s = 0.0;
  for (std::size_t j = 0; j < prob.m(); ++j) {
    double dj = kl_divergence(pushforward(p, prob.channels[j]), prob.refs[j]);
    if (dj == kInf) return kInf;
    s += prob.c[j] * dj;
  }
  return s - d_pq;
}

namespace {

// Euclidean gradient of the entropy objective at an interior point.
std::vector<double> entropy_objective_grad(const ForwardProblem& prob,
                                           const std::vector<double>& p) {
  std::size_t n = p.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double q = prob.qx[i];
    g[i] = q > 0.0 ? -(1.0 + std::log(std::max(p[i], 1e-300) / q)) : -1e9;
  }
  for (std::size_t j = 0; j < prob.m(); ++j) {
    const Channel& w = prob.channels[j];
    std::vector<double> py(w.output_size(), 0.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < py.size(); ++y) py[y] += p[x] * w(y, x);
    for (std::size_t x = 0; x < n; ++x) {
      double acc = 0.0;
      for (std::size_t y = 0; y < py.size(); ++y) {
        if (w(y, x) == 0.0) continue;
        double r = prob.refs[j][y];
        acc += w(y, x) *
               (1.0 + std::log(std::max(py[y], 1e-300) / std::max(r, 1e-300)));
      }
      g[x] += prob.c[j] * acc;
    }
  }
  return g;
}

}  // namespace

DualityReport best_constant_entropy(const ForwardProblem& prob,
                                    const OptimizerOptions& opts) {
  // The supremum is +inf exactly when some input letter with Q_X-mass can
  // push output mass outside a reference's support.
  for (std::size_t x = 0; x < prob.qx.size(); ++x) {
    if (prob.qx[x] == 0.0) continue;
    for (std::size_t j = 0; j < prob.m(); ++j)
      for (std::size_t y = 0; y < prob.refs[j].size(); ++y)
        if (prob.channels[j](y, x) > 0.0 && prob.refs[j][y] == 0.0) {
          DualityReport rep{kInf, Dist::delta(prob.qx.size(), x), 0.0, 0, true};
          return rep;
        }
  }

  OptimizerOptions o = opts;
  o.extra_starts.push_back(prob.qx.probs());
  auto obj = [&](const std::vector<double>& p) {
    return entropy_objective(prob, Dist(p));
  };
  auto grad = [&](const std::vector<double>& p) {
    return entropy_objective_grad(prob, p);
  };
  SimplexMaxResult r = maximize_on_simplex(obj, grad, prob.qx.size(), o);
  if (!std::isfinite(r.value))
    throw std::runtime_error("best_constant_entropy: no finite value found");
  DualityReport rep;
  rep.d_star = r.value;
  rep.argmax_p = Dist(r.argmax);
  rep.n_restarts_used = r.restarts_used;
  rep.certified_by_grid = r.certified_by_grid;
  rep.functional_gap = 0.0;
  return rep;
}

double functional_lhs(const ForwardProblem& prob, const TestFunctions& f,
                      double d) {
  if (!std::isfinite(d))
    throw std::invalid_argument("functional_lhs: d must be finite");
  if (f.f.size() != prob.m())
    throw std::invalid_argument("functional_lhs: wrong number of functions");
  double total = 0.0;
  for (std::size_t x = 0; x < prob.qx.size(); ++x) {
    if (prob.qx[x] == 0.0) continue;
    double expo = -d;
    bool zero_factor = false;
    for (std::size_t j = 0; j < prob.m() && !zero_factor; ++j) {
      const Channel& w = prob.channels[j];
      for (std::size_t y = 0; y < w.output_size(); ++y) {
        double wy = w(y, x);
        if (wy == 0.0) continue;
        double fy = f.f[j][y];
        if (fy == 0.0) {
          zero_factor = true;
          break;
        }
        expo += wy * std::log(fy);
      }
    }
    if (!zero_factor) total += prob.qx[x] * std::exp(expo);
  }
  return total;
}

double functional_rhs(const ForwardProblem& prob, const TestFunctions& f) {
  if (f.f.size() != prob.m())
    throw std::invalid_argument("functional_rhs: wrong number of functions");
  double prod = 1.0;
  for (std::size_t j = 0; j < prob.m(); ++j) {
    double s = 0.0;
    for (std::size_t y = 0; y < prob.refs[j].size(); ++y)
      s += prob.refs[j][y] * std::pow(f.f[j][y], 1.0 / prob.c[j]);
    prod *= std::pow(s, prob.c[j]);
  }
  return prod;
}

TestFunctions tight_test_functions(const ForwardProblem& prob, const Dist& p) {
  TestFunctions tf;
  for (std::size_t j = 0; j < prob.m(); ++j) {
    Dist py = pushforward(p, prob.channels[j]);
    std::vector<double> fj(py.size());
    for (std::size_t y = 0; y < py.size(); ++y) {
      if (py[y] == 0.0) {
        fj[y] = 0.0;
        continue;
      }
      if (prob.refs[j][y] == 0.0)
        throw std::domain_error("tight_test_functions: support violation");
      fj[y] = std::pow(py[y] / prob.refs[j][y], prob.c[j]);
    }
    tf.f.push_back(std::move(fj));
  }
  return tf;
}

ProofWitnesses proof_witnesses(const ForwardProblem& prob, const Dist& p,
                               const TestFunctions& f) {
  ProofWitnesses w;
  // S_X(x) proportional to Q_X(x) exp(sum_j c_j E[i_{P_Yj||R_j}(Y_j)|X=x]).
  std::vector<double> sx(prob.qx.size(), 0.0);
  std::vector<Dist> pys;
  for (std::size_t j = 0; j < prob.m(); ++j)
    pys.push_back(pushforward(p, prob.channels[j]));
  double z = 0.0;
  for (std::size_t x = 0; x < sx.size(); ++x) {
    if (prob.qx[x] == 0.0) continue;
    double expo = 0.0;
    bool zero = false;
    for (std::size_t j = 0; j < prob.m() && !zero; ++j) {
      const Channel& ch = prob.channels[j];
      for (std::size_t y = 0; y < ch.output_size(); ++y) {
        double wy = ch(y, x);
        if (wy == 0.0) continue;
        double num = pys[j][y], den = prob.refs[j][y];
        if (num == 0.0) {
          zero = true;  // relative information -inf kills the tilt
          break;
        }
        if (den == 0.0)
          throw std::domain_error("proof_witnesses: infinite normalizer");
        expo += prob.c[j] * wy * std::log(num / den);
      }
    }
    if (!zero) sx[x] = prob.qx[x] * std::exp(expo);
    z += sx[x];
  }
  if (!(z > 0.0) || !std::isfinite(z))
    throw std::domain_error("proof_witnesses: unnormalizable S_X");
  w.d0 = std::log(z);
  for (double& v : sx) v /= z;
  w.s_x = Dist(std::move(sx));

  for (std::size_t j = 0; j < prob.m(); ++j) {
    std::vector<double> sy(prob.refs[j].size(), 0.0);
    double zj = 0.0;
    for (std::size_t y = 0; y < sy.size(); ++y) {
      sy[y] = prob.refs[j][y] * std::pow(f.f[j][y], 1.0 / prob.c[j]);
      zj += sy[y];
    }
    if (!(zj > 0.0) || !std::isfinite(zj))
      throw std::domain_error("proof_witnesses: unnormalizable S_Y");
    w.d_j.push_back(std::log(zj));
    for (double& v : sy) v /= zj;
    w.s_y.emplace_back(std::move(sy));
  }
  return w;
}

}  // namespace bl
