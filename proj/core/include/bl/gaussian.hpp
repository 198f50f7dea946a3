// Copyright 2026 the blduality authors.
// Released under the Apache License, Version 2.0.

#ifndef BL_GAUSSIAN_HPP
#define BL_GAUSSIAN_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace bl {

/// Affine-Gaussian channel Y = A X + b + Z with Z ~ N(0, sigma_noise).
struct GaussianChannel {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd sigma_noise;

  std::size_t n_in() const { return static_cast<std::size_t>(A.cols()); }
  std::size_t n_out() const { return static_cast<std::size_t>(A.rows()); }
};

/// Data of the finite-dimensional entropy functional: channels, weights c_j,
/// trace weight c0 with matrix M, and an optional covariance cap.
struct GaussianProblem {
  std::vector<GaussianChannel> channels;
  std::vector<double> c;
  double c0 = 0.0;
  Eigen::MatrixXd M;
  std::optional<Eigen::MatrixXd> sigma_cap;

  std::size_t dim() const { return static_cast<std::size_t>(M.rows()); }
  void validate() const;
};

/// Covariance of a candidate Gaussian input law.
struct CovMatrix {
  Eigen::MatrixXd K;
  explicit CovMatrix(Eigen::MatrixXd k);
};

// -h(X) + sum_j c_j h(Y_j) + c0 tr(M K); +inf for singular K.
double f0_eval(const GaussianProblem& prob, const CovMatrix& k);

// -K^{-1}/2 + sum_j (c_j/2) A_j^T (A_j K A_j^T + S_j)^{-1} A_j + c0 M.
Eigen::MatrixXd f0_grad(const GaussianProblem& prob, const CovMatrix& k);

struct GaussianMinOptions {
  double eps_floor = 1e-9;
  double stat_tol = 1e-6;
  int max_iters = 100000;
  double unbounded_floor = -1e8;
  int restarts = 4;
  std::uint64_t seed = 0;
};

struct GaussianMinResult {
  Eigen::MatrixXd k_star;
  double value = 0.0;
  bool unbounded = false;
  double proj_grad_norm = 0.0;
};

// Projected gradient descent (Barzilai-Borwein steps, eigenvalue-clipping
// projection onto {eps I <= K <= sigma_cap}).
GaussianMinResult minimize_f0(const GaussianProblem& prob,
                              const GaussianMinOptions& opts = {});

// diag(p) - Sigma PSD test, 1e-10 eigenvalue slack; Sigma must be a
// correlation matrix (unit diagonal).
bool nelson_check(const Eigen::MatrixXd& sigma, const std::vector<double>& p);
// min eigenvalue of diag(p) - Sigma, the certificate behind nelson_check.
double nelson_margin(const Eigen::MatrixXd& sigma, const std::vector<double>& p);

struct WynerResult {
  double value = 0.0;             // nats
  Eigen::VectorXd lambda_star;    // optimal diagonal
};

// (1/2) inf log(|Sigma|/|Lambda|) over diagonal 0 < Lambda <= Sigma, by
// coordinate ascent on log|Lambda| with min-eigenvalue feasibility searches
// plus pairwise exchange refinement.
WynerResult wyner_ci(const Eigen::MatrixXd& sigma);

/// Gaussian reference measure (mean, positive definite covariance).
struct GaussianRef {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

struct GaussianBLResult {
  double d = 0.0;
  bool finite = true;
  Eigen::VectorXd mean_star;
  Eigen::MatrixXd k_star;
};

// Extremal d of the Gaussian-restricted entropy inequality: exact quadratic
// maximization over the mean, covariance part via the same projected-gradient
// machinery with flipped sign.
GaussianBLResult gaussian_gbll_constant(const GaussianProblem& prob,
                                        const GaussianRef& qx_ref,
                                        const std::vector<GaussianRef>& refs,
                                        const GaussianMinOptions& opts = {});

}  // namespace bl

#endif  // BL_GAUSSIAN_HPP
