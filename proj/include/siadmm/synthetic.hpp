#pragma once

#include <cstdint>
#include <utility>

#include "json.hpp"
#include "siadmm/problem.hpp"

namespace siadmm {

// Draws (l, s) with l = (L z; 1 if intercept), z ~ N(0, I), s = l'beta + N(0, noise_sd^2).
struct GaussianRegressionSampler {
  Mat chol;  // lower-triangular factor of the covariance of the Gaussian part
  Vec beta;
  double noise_sd = 0.0;
  bool intercept = false;

  Eigen::Index dim() const { return chol.rows() + (intercept ? 1 : 0); }
  // Writes l into `l` (pre-sized to dim()) and returns s. Counts one sample.
  double draw(Stream& stream, Vec& l) const;
};

// Sampled gradient 2 (l'x - s) l of E[(l'x - s)^2], written into `out`.
GradientOracle least_squares_oracle(GaussianRegressionSampler sampler);

// (sigma2 * 0.5^|i-j|)_{ij}
Mat kms_covariance(Eigen::Index n, double sigma2);

// E[(ll' - Sigma)^2] for l = (l_bar; 1), l_bar ~ N(0, Sigma_l).
Mat isserlis_V_affine(const Mat& Sigma_l);
// E[(ll' - Sigma)^2] for l ~ N(0, Sigma).
Mat isserlis_V_centered(const Mat& Sigma);

Mat cholesky_lower(const Mat& S);

struct LassoParams {
  long n = 10;
  double sigma_l2 = 5.0;
  double sigma_s2 = 5.0;
  double gamma_bar = 0.1;
  double bernoulli_p = 0.5;
};

struct LassoInstance {
  LassoParams params;
  Mat Sigma_l;
  Mat Sigma;
  Mat chol_l;
  Vec x_true;
  Mat V;
  double v1_x = 0.0;
  double v2_x = 0.0;
  Vec x_star;
  Vec lambda_star;
  double F_star = 0.0;

  GaussianRegressionSampler sampler() const;
  double objective(const Vec& x) const;
};

// x_true by the truncation rule on U[-50, 50] plus a Bernoulli(p) last coordinate.
Vec draw_lasso_truth(long n, double bernoulli_p, Stream& stream);

LassoInstance gen_lasso(const LassoParams& params, Stream& stream);

std::pair<double, double> variance_constants_lasso(const LassoInstance& inst);

// Infinity-norm distance of 0 from 2 Sigma (x - x_true) + gamma_bar d|x|_1.
double lasso_optimality_residual(const Mat& Sigma, const Vec& x_true, double gamma_bar,
                                 const Vec& x);

// y-update for B = -I, Q = qI and g = gamma_bar |.|_1:
// y = S_{gamma_bar/(rho+q)}((rho (Ax - b) + q y_k - lambda)/(rho + q)).
ProxOracle l1_prox_oracle(double gamma_bar);

// SOpt form x - y = 0 with exact l1 y-update; known_kkt = (x*, x*, 2 Sigma (x* - x_true)).
StochasticProblem lasso_problem(const LassoInstance& inst);

struct DistRegParams {
  long n = 50;
  double sigma_l2 = 5.0;
  double sigma_s2 = 5.0;
  double offdiag_var = 0.01;
  int max_retries = 10;
};

struct DistRegInstance {
  DistRegParams params;
  Mat Sigma;
  Mat chol;
  Mat A;
  Vec beta1;
  Vec beta2;
  Mat V;
  double v1 = 0.0;
  double v2_x = 0.0;
  double v2_y = 0.0;
  Vec lambda_star;
  double F_star = 0.0;

  GaussianRegressionSampler sampler_x() const;
  GaussianRegressionSampler sampler_y() const;
  Vec z_star() const;
};

DistRegInstance gen_distreg(const DistRegParams& params, Stream& stream);

// f and g both sampled least squares, constraint Ax - y = 0.
StochasticProblem distreg_problem(const DistRegInstance& inst);

nlohmann::json to_json(const LassoParams& p);
nlohmann::json to_json(const DistRegParams& p);

}  // namespace siadmm
