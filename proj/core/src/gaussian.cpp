// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#include "bl/gaussian.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "bl/finite_prob.hpp"  // kInf

namespace bl {

namespace {

constexpr double kTwoPiE = 2.0 * M_PI * M_E;

double logdet_or(const Eigen::MatrixXd& m, double singular_value) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  double ld = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double ev = es.eigenvalues()(i);
    if (ev <= 1e-14) return singular_value;
    ld += std::log(ev);
  }
  return ld;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Projection onto {eps I <= K} or, with a cap S, onto the whitened box
// {eps <= eig(S^{-1/2} K S^{-1/2}) <= 1} mapped back.
class SpdProjector {
 public:
  SpdProjector(std::size_t n, double eps,
               const std::optional<Eigen::MatrixXd>& cap)
      : eps_(eps) {
    if (cap) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*cap);
      if (es.eigenvalues().minCoeff() < eps)
        throw std::invalid_argument("sigma_cap must dominate the eps floor");
      Eigen::VectorXd sq = es.eigenvalues().cwiseSqrt();
      root_ = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().transpose();
      inv_root_ = es.eigenvectors() * sq.cwiseInverse().asDiagonal() *
                  es.eigenvectors().transpose();
      capped_ = true;
    }
    (void)n;
  }

  Eigen::MatrixXd operator()(const Eigen::MatrixXd& k) const {
    Eigen::MatrixXd w = capped_ ? symmetrize(inv_root_ * k * inv_root_)
                                : symmetrize(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      ev(i) = std::max(ev(i), eps_);
      if (capped_) ev(i) = std::min(ev(i), 1.0);
    }
    Eigen::MatrixXd proj =
        es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    return capped_ ? symmetrize(root_ * proj * root_) : proj;
  }

 private:
  double eps_;
  bool capped_ = false;
  Eigen::MatrixXd root_, inv_root_;
};

struct SpdObjective {
  std::function<double(const Eigen::MatrixXd&)> value;
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> grad;
};

GaussianMinResult minimize_over_spd(const SpdObjective& obj, std::size_t n,
                                    const std::optional<Eigen::MatrixXd>& cap,
                                    const GaussianMinOptions& opts) {
  SpdProjector project(n, opts.eps_floor, cap);
  const Eigen::Index ni = static_cast<Eigen::Index>(n);

  std::vector<Eigen::MatrixXd> starts;
  starts.push_back(project(Eigen::MatrixXd::Identity(ni, ni)));
  if (cap) starts.push_back(project(0.5 * *cap));
  std::mt19937_64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (static_cast<int>(starts.size()) < opts.restarts) {
    Eigen::MatrixXd g(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i)
      for (Eigen::Index j = 0; j < ni; ++j) g(i, j) = gauss(rng);
    starts.push_back(project(symmetrize(g * g.transpose() / double(n))));
  }

  GaussianMinResult best;
  best.value = kInf;
  for (const Eigen::MatrixXd& start : starts) {
    Eigen::MatrixXd k = start;
    double fk = obj.value(k);
    Eigen::MatrixXd g = obj.grad(k);
    Eigen::MatrixXd prev_k, prev_g;
    double step = 1e-2;
    double res = kInf;
    bool unbounded = false;
    for (int it = 0; it < opts.max_iters; ++it) {
      if (fk < opts.unbounded_floor) {
        unbounded = true;
        break;
      }
      // Barzilai-Borwein step with monotone backtracking fallback.
      if (it > 0) {
        Eigen::MatrixXd sk = k - prev_k, yk = g - prev_g;
        double denom = (sk.array() * yk.array()).sum();
        double numer = (sk.array() * sk.array()).sum();
        step = (denom > 1e-18 && numer > 0.0) ? numer / denom : 1e-2;
        step = std::clamp(step, 1e-8, 1e4);
      }
      Eigen::MatrixXd cand;
      double fc = kInf;
      double t = step;
      for (int ls = 0; ls < 60; ++ls) {
        cand = project(k - t * g);
        fc = obj.value(cand);
        if (fc <= fk + 1e-14) break;
        t *= 0.5;
      }
      res = (k - project(k - g)).norm();
      if (fc > fk - 1e-15 && res <= opts.stat_tol) {
        break;
      }
      prev_k = k;
      prev_g = g;
      if (fc <= fk) {
        k = cand;
        fk = fc;
        g = obj.grad(k);
      } else {
        break;  // no descent direction left
      }
      if (res <= opts.stat_tol && it > 2) break;
    }
    if (unbounded) {
      best.unbounded = true;
      best.k_star = k;
      best.value = -kInf;
      return best;
    }
    if (fk < best.value) {
      best.value = fk;
      best.k_star = k;
      best.proj_grad_norm = res;
    }
  }
  return best;
}

}  // namespace

void GaussianProblem::validate() const {
  if (channels.size() != c.size())
    throw std::invalid_argument("GaussianProblem: channels/c size mismatch");
  for (double cj : c)
    if (!(cj >= 0.0))
      throw std::invalid_argument("GaussianProblem: c_j must be >= 0");
  if (M.rows() != M.cols())
    throw std::invalid_argument("GaussianProblem: M must be square");
  for (const GaussianChannel& ch : channels) {
    if (ch.n_in() != dim())
      throw std::invalid_argument("GaussianProblem: channel dims mismatch");
    if (ch.sigma_noise.rows() != ch.A.rows())
      throw std::invalid_argument("GaussianProblem: noise dims mismatch");
  }
  if (sigma_cap && (sigma_cap->rows() != M.rows()))
    throw std::invalid_argument("GaussianProblem: cap dims mismatch");
}

CovMatrix::CovMatrix(Eigen::MatrixXd k) : K(std::move(k)) {
  if (K.rows() != K.cols() || (K - K.transpose()).norm() > 1e-12 * (1.0 + K.norm()))
    throw std::invalid_argument("CovMatrix: not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
  if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + K.norm()))
    throw std::invalid_argument("CovMatrix: not PSD");
}

double f0_eval(const GaussianProblem& prob, const CovMatrix& k) {
  prob.validate();
  if (k.K.rows() != static_cast<Eigen::Index>(prob.dim()))
    throw std::invalid_argument("f0_eval: dimension mismatch");
  double ld = logdet_or(k.K, -kInf);
  if (ld == -kInf) return kInf;  // -h(X) blows up for singular input
  const double n = static_cast<double>(prob.dim());
  double v = -0.5 * (n * std::log(kTwoPiE) + ld);
  for (std::size_t j = 0; j < prob.channels.size(); ++j) {
    if (prob.c[j] == 0.0) continue;
    const GaussianChannel& ch = prob.channels[j];
    Eigen::MatrixXd cov =
        symmetrize(ch.A * k.K * ch.A.transpose() + ch.sigma_noise);
    double ldj = logdet_or(cov, -kInf);
    if (ldj == -kInf) return -kInf;  // degenerate output entropy
    v += prob.c[j] * 0.5 *
         (static_cast<double>(ch.n_out()) * std::log(kTwoPiE) + ldj);
  }
  v += prob.c0 * (prob.M * k.K).trace();
  return v;
}

Eigen::MatrixXd f0_grad(const GaussianProblem& prob, const CovMatrix& k) {
  prob.validate();
  Eigen::MatrixXd g = -0.5 * k.K.inverse();
  for (std::size_t j = 0; j < prob.channels.size(); ++j) {
    if (prob.c[j] == 0.0) continue;
    const GaussianChannel& ch = prob.channels[j];
    Eigen::MatrixXd cov =
        symmetrize(ch.A * k.K * ch.A.transpose() + ch.sigma_noise);
    g += 0.5 * prob.c[j] * ch.A.transpose() * cov.inverse() * ch.A;
  }
  g += prob.c0 * prob.M;
  return symmetrize(g);
}

GaussianMinResult minimize_f0(const GaussianProblem& prob,
                              const GaussianMinOptions& opts) {
  prob.validate();
  const Eigen::Index n = static_cast<Eigen::Index>(prob.dim());
  if (!prob.sigma_cap) {
    // Without a cap the objective can drift to -inf along directions where
    // the trace term vanishes and the input log-det outgrows the channel
    // log-dets; the decay is logarithmic, so probe rays directly instead of
    // waiting for a value floor.
    std::vector<Eigen::MatrixXd> rays;
    rays.push_back(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd z = prob.c0 * prob.M;
    for (std::size_t j = 0; j < prob.channels.size(); ++j)
      z += prob.c[j] * prob.channels[j].A.transpose() * prob.channels[j].A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(z));
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd v = es.eigenvectors().col(i);
      rays.push_back(v * v.transpose());
    }
    Eigen::MatrixXd base = Eigen::MatrixXd::Identity(n, n);
    for (const Eigen::MatrixXd& d : rays) {
      double f1 = f0_eval(prob, CovMatrix(symmetrize(base + 1e8 * d)));
      double f2 = f0_eval(prob, CovMatrix(symmetrize(base + 1e16 * d)));
      if (f2 < f1 - 1e-6) {
        GaussianMinResult out;
        out.unbounded = true;
        out.value = -kInf;
        out.k_star = base + 1e16 * d;
        return out;
      }
    }
  }
  SpdObjective obj{
      [&](const Eigen::MatrixXd& k) { return f0_eval(prob, CovMatrix(k)); },
      [&](const Eigen::MatrixXd& k) { return f0_grad(prob, CovMatrix(k)); }};
  return minimize_over_spd(obj, prob.dim(), prob.sigma_cap, opts);
}

double nelson_margin(const Eigen::MatrixXd& sigma,
                     const std::vector<double>& p) {
  if (sigma.rows() != sigma.cols() ||
      sigma.rows() != static_cast<Eigen::Index>(p.size()))
    throw std::invalid_argument("nelson: dimension mismatch");
  for (Eigen::Index i = 0; i < sigma.rows(); ++i)
    if (std::fabs(sigma(i, i) - 1.0) > 1e-12)
      throw std::invalid_argument("nelson: Sigma must have unit diagonal");
  Eigen::MatrixXd d = -sigma;
  for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, i) += p[static_cast<std::size_t>(i)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  return es.eigenvalues().minCoeff();
}

bool nelson_check(const Eigen::MatrixXd& sigma, const std::vector<double>& p) {
  return nelson_margin(sigma, p) >= -1e-10;
}

WynerResult wyner_ci(const Eigen::MatrixXd& sigma) {
  const Eigen::Index n = sigma.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es0(sigma);
  double mineig = es0.eigenvalues().minCoeff();
  if (mineig <= 1e-12)
    throw std::invalid_argument("wyner_ci: Sigma must be positive definite");
  double logdet_sigma = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    logdet_sigma += std::log(es0.eigenvalues()(i));

  // Maximize the concave sum of log(lambda_i) over the convex feasible set
  // {0 < Lambda, Sigma - Lambda >= 0} by a log-barrier interior path:
  // phi_mu = sum log(lambda_i) + mu log det(Sigma - Lambda), mu -> 0.
  auto slack = [&](const Eigen::VectorXd& l) {
    Eigen::MatrixXd d = sigma;
    for (Eigen::Index i = 0; i < n; ++i) d(i, i) -= l(i);
    return d;
  };
  auto barrier_val = [&](const Eigen::VectorXd& l, double mu) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (l(i) <= 0.0) return -kInf;
      s += std::log(l(i));
    }
    double ld = logdet_or(slack(l), -kInf);
    if (ld == -kInf) return -kInf;
    return s + mu * ld;
  };

  Eigen::VectorXd lam = Eigen::VectorXd::Constant(n, 0.5 * mineig);
  for (double mu = 1.0; mu > 1e-9; mu *= 0.3) {
    for (int it = 0; it < 2000; ++it) {
      Eigen::MatrixXd inv = slack(lam).inverse();
      Eigen::VectorXd g(n);
      for (Eigen::Index i = 0; i < n; ++i)
        g(i) = 1.0 / lam(i) - mu * inv(i, i);
      if (g.norm() < 1e-10 * (1.0 + 1.0 / mu)) break;
      double val = barrier_val(lam, mu);
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls) {
        Eigen::VectorXd cand = lam + step * g;
        double cv = barrier_val(cand, mu);
        if (cv > val + 1e-15) {
          lam = cand;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
  }
  // Final polish: push each coordinate to its feasibility boundary (a
  // monotone improvement that removes the barrier's interior offset).
  auto feasible = [&](const Eigen::VectorXd& l) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(slack(l));
    return es.eigenvalues().minCoeff() >= -1e-14;
  };
  for (int pass = 0; pass < 4; ++pass) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double lo = lam(i), hi = sigma(i, i);
      Eigen::VectorXd probe = lam;
      probe(i) = hi;
      if (feasible(probe)) {
        lo = hi;
      } else {
        for (int k = 0; k < 60; ++k) {
          double mid = 0.5 * (lo + hi);
          probe(i) = mid;
          (feasible(probe) ? lo : hi) = mid;
        }
      }
      lam(i) = lo;
    }
  }
  double cur = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) cur += std::log(lam(i));

  WynerResult out;
  out.lambda_star = lam;
  out.value = 0.5 * (logdet_sigma - cur);
  if (out.value < 0.0 && out.value > -1e-12) out.value = 0.0;
  return out;
}

GaussianBLResult gaussian_gbll_constant(const GaussianProblem& prob,
                                        const GaussianRef& qx_ref,
                                        const std::vector<GaussianRef>& refs,
                                        const GaussianMinOptions& opts) {
  prob.validate();
  if (refs.size() != prob.channels.size())
    throw std::invalid_argument("gaussian_gbll_constant: refs size mismatch");
  const Eigen::Index n = qx_ref.cov.rows();
  Eigen::MatrixXd s0_inv = qx_ref.cov.inverse();
  std::vector<Eigen::MatrixXd> sj_inv;
  for (const GaussianRef& r : refs) sj_inv.push_back(r.cov.inverse());

  GaussianBLResult out;

  // Mean part: a quadratic form, maximized exactly. Unbounded above unless
  // the Hessian is negative semidefinite with a consistent stationary point.
  Eigen::MatrixXd h = -s0_inv;
  Eigen::VectorXd lin = s0_inv * qx_ref.mean;
  for (std::size_t j = 0; j < prob.channels.size(); ++j) {
    const GaussianChannel& ch = prob.channels[j];
    h += prob.c[j] * ch.A.transpose() * sj_inv[j] * ch.A;
    lin += prob.c[j] * ch.A.transpose() * sj_inv[j] * (ch.b - refs[j].mean);
  }
  h = symmetrize(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esh(h);
  if (esh.eigenvalues().maxCoeff() > 1e-10) {
    out.finite = false;
    out.d = kInf;
    return out;
  }
  // Stationary point of mu -> mu' h mu / 2 + lin' mu (pseudo-inverse solve).
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
  {
    Eigen::VectorXd coef = esh.eigenvectors().transpose() * lin;
    Eigen::VectorXd sol = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double ev = esh.eigenvalues()(i);
      if (std::fabs(ev) > 1e-10) {
        sol(i) = -coef(i) / ev;
      } else if (std::fabs(coef(i)) > 1e-8) {
        out.finite = false;  // flat direction with nonzero slope
        out.d = kInf;
        return out;
      }
    }
    mu = esh.eigenvectors() * sol;
  }
  auto mean_value = [&](const Eigen::VectorXd& m) {
    double v = -0.5 * (m - qx_ref.mean).dot(s0_inv * (m - qx_ref.mean));
    for (std::size_t j = 0; j < prob.channels.size(); ++j) {
      const GaussianChannel& ch = prob.channels[j];
      Eigen::VectorXd d = ch.A * m + ch.b - refs[j].mean;
      v += 0.5 * prob.c[j] * d.dot(sj_inv[j] * d);
    }
    return v;
  };
  double mean_part = mean_value(mu);
  out.mean_star = mu;

  // Covariance part: maximize the relative-entropy combination over K > 0.
  auto g_value = [&](const Eigen::MatrixXd& k) {
    double ldk = logdet_or(k, -kInf);
    if (ldk == -kInf) return -kInf;
    double v = -0.5 * ((s0_inv * k).trace() - static_cast<double>(n) - ldk +
                       logdet_or(qx_ref.cov, -kInf));
    for (std::size_t j = 0; j < prob.channels.size(); ++j) {
      const GaussianChannel& ch = prob.channels[j];
      Eigen::MatrixXd cov =
          symmetrize(ch.A * k * ch.A.transpose() + ch.sigma_noise);
      double ldj = logdet_or(cov, -kInf);
      if (ldj == -kInf) return kInf;
      v += 0.5 * prob.c[j] *
           ((sj_inv[j] * cov).trace() - static_cast<double>(ch.n_out()) - ldj +
            logdet_or(refs[j].cov, -kInf));
    }
    return v;
  };
  auto g_grad = [&](const Eigen::MatrixXd& k) {
    Eigen::MatrixXd g = -0.5 * (s0_inv - k.inverse());
    for (std::size_t j = 0; j < prob.channels.size(); ++j) {
      const GaussianChannel& ch = prob.channels[j];
      Eigen::MatrixXd cov =
          symmetrize(ch.A * k * ch.A.transpose() + ch.sigma_noise);
      g += 0.5 * prob.c[j] * ch.A.transpose() *
           (sj_inv[j] - cov.inverse()) * ch.A;
    }
    return symmetrize(g);
  };
  SpdObjective neg{
      [&](const Eigen::MatrixXd& k) { return -g_value(k); },
      [&](const Eigen::MatrixXd& k) -> Eigen::MatrixXd { return -g_grad(k); }};
  GaussianMinResult r =
      minimize_over_spd(neg, static_cast<std::size_t>(n), prob.sigma_cap, opts);
  if (r.unbounded) {
    out.finite = false;
    out.d = kInf;
    return out;
  }
  out.k_star = r.k_star;
  out.d = mean_part - r.value;
  return out;
}

}  // namespace bl
