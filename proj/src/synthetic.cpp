#include "siadmm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "siadmm/baselines.hpp"
#include "siadmm/error.hpp"

namespace siadmm {

double GaussianRegressionSampler::draw(Stream& stream, Vec& l) const {
  const Eigen::Index d = chol.rows();
  for (Eigen::Index i = 0; i < d; ++i) l(i) = stream.normal();
  // l <- chol * z in place, bottom-up so z_0..z_i are still intact at row i
  for (Eigen::Index i = d - 1; i >= 0; --i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j <= i; ++j) acc += chol(i, j) * l(j);
    l(i) = acc;
  }
  if (intercept) l(d) = 1.0;
  double s = l.dot(beta);
  if (noise_sd > 0.0) s += noise_sd * stream.normal();
  stream.count_sample();
  return s;
}

GradientOracle least_squares_oracle(GaussianRegressionSampler sampler) {
  return [sm = std::move(sampler)](const Vec& x, Stream& stream, Vec& out) {
    const double s = sm.draw(stream, out);
    out *= 2.0 * (out.dot(x) - s);
  };
}

Mat kms_covariance(Eigen::Index n, double sigma2) {
  require(n >= 0 && sigma2 >= 0.0, "kms_covariance needs n >= 0 and sigma2 >= 0");
  Mat S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      S(i, j) = sigma2 * std::pow(0.5, static_cast<double>(std::abs(i - j)));
  return S;
}

Mat isserlis_V_centered(const Mat& Sigma) {
  require(Sigma.rows() == Sigma.cols(), "Sigma must be square");
  require(linalg::is_symmetric(Sigma), "Sigma must be symmetric");
  return Sigma * Sigma.trace() + Sigma * Sigma;
}

Mat isserlis_V_affine(const Mat& Sigma_l) {
  require(Sigma_l.rows() == Sigma_l.cols(), "Sigma_l must be square");
  require(linalg::is_symmetric(Sigma_l), "Sigma_l must be symmetric");
  const Eigen::Index d = Sigma_l.rows();
  Mat V = Mat::Zero(d + 1, d + 1);
  V.topLeftCorner(d, d) = isserlis_V_centered(Sigma_l) + Sigma_l;
  V(d, d) = Sigma_l.trace();
  return V;
}

Mat cholesky_lower(const Mat& S) {
  if (S.size() == 0) return S;
  Eigen::LLT<Mat> llt(S);
  if (llt.info() != Eigen::Success) throw ConfigError("covariance is not positive definite");
  return llt.matrixL();
}

GaussianRegressionSampler LassoInstance::sampler() const {
  return {chol_l, x_true, std::sqrt(params.sigma_s2), true};
}

double LassoInstance::objective(const Vec& x) const {
  const Vec d = x - x_true;
  return d.dot(Sigma * d) + params.sigma_s2 + params.gamma_bar * x.lpNorm<1>();
}

namespace {
// Truncation rule: keep a U[-50, 50] draw only when |r| <= 5.
double truncated_uniform(Stream& s) {
  const double r = s.uniform(-50.0, 50.0);
  return std::abs(r) <= 5.0 ? r : 0.0;
}
}  // namespace

Vec draw_lasso_truth(long n, double bernoulli_p, Stream& stream) {
  require(n >= 2, "LASSO dimension must be at least 2");
  require(bernoulli_p >= 0.0 && bernoulli_p <= 1.0, "bernoulli_p must lie in [0, 1]");
  Vec x(n);
  for (long i = 0; i + 1 < n; ++i) x(i) = truncated_uniform(stream);
  x(n - 1) = stream.bernoulli(bernoulli_p) ? 1.0 : 0.0;
  return x;
}

LassoInstance gen_lasso(const LassoParams& p, Stream& stream) {
  require(p.n >= 2, "LASSO dimension must be at least 2");
  require(p.sigma_l2 > 0.0 && p.sigma_s2 >= 0.0, "need sigma_l2 > 0 and sigma_s2 >= 0");
  require(p.gamma_bar >= 0.0, "gamma_bar must be nonnegative");
  LassoInstance inst;
  inst.params = p;
  const Eigen::Index d = p.n - 1;
  inst.Sigma_l = kms_covariance(d, p.sigma_l2);
  inst.Sigma = Mat::Zero(p.n, p.n);
  inst.Sigma.topLeftCorner(d, d) = inst.Sigma_l;
  inst.Sigma(d, d) = 1.0;
  inst.chol_l = cholesky_lower(inst.Sigma_l);
  inst.x_true = draw_lasso_truth(p.n, p.bernoulli_p, stream);
  inst.V = isserlis_V_affine(inst.Sigma_l);
  std::tie(inst.v1_x, inst.v2_x) = variance_constants_lasso(inst);
  inst.x_star = prox_grad_reference(inst.Sigma, inst.x_true, p.gamma_bar);
  inst.lambda_star = 2.0 * inst.Sigma * (inst.x_star - inst.x_true);
  inst.F_star = inst.objective(inst.x_star);
  return inst;
}

std::pair<double, double> variance_constants_lasso(const LassoInstance& inst) {
  const double v1 = 8.0 * linalg::lambda_max(inst.V);
  const double v2 = 8.0 * inst.x_true.dot(inst.V * inst.x_true) +
                    4.0 * inst.params.sigma_s2 * (inst.Sigma_l.trace() + 1.0);
  return {v1, v2};
}

double lasso_optimality_residual(const Mat& Sigma, const Vec& x_true, double gamma_bar,
                                 const Vec& x) {
  const Vec g = 2.0 * Sigma * (x - x_true);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r;
    if (x(i) > 0.0)
      r = std::abs(g(i) + gamma_bar);
    else if (x(i) < 0.0)
      r = std::abs(g(i) - gamma_bar);
    else
      r = std::max(0.0, std::abs(g(i)) - gamma_bar);
    worst = std::max(worst, r);
  }
  return worst;
}

ProxOracle l1_prox_oracle(double gamma_bar) {
  require(gamma_bar >= 0.0, "gamma_bar must be nonnegative");
  return {[gamma_bar](const StochasticProblem& prob, const AugmentedLagrangianParams& params,
                      const Vec& x, const Vec& y_anchor, const Vec& lambda) -> Vec {
    const auto m = prob.dim_y();
    if (!prob.B().isApprox(-Mat::Identity(prob.dim_c(), m)))
      throw ConfigError("l1 prox y-update needs B = -I");
    double q = 0.0;
    if (params.Q.size() != 0) {
      q = params.Q(0, 0);
      if (!params.Q.isApprox(q * Mat::Identity(m, m)) && !linalg::is_zero(params.Q))
        throw ConfigError("l1 prox y-update needs Q = qI");
    }
    const double w = params.rho + q;
    const Vec v = (params.rho * (prob.A() * x - prob.b()) + q * y_anchor - lambda) / w;
    return soft_threshold(v, gamma_bar / w);
  }};
}

StochasticProblem lasso_problem(const LassoInstance& inst) {
  const long n = inst.params.n;
  ProblemParts parts;
  parts.A = Mat::Identity(n, n);
  parts.B = -Mat::Identity(n, n);
  parts.b = Vec::Zero(n);
  parts.oracle_f = least_squares_oracle(inst.sampler());
  parts.oracle_g = l1_prox_oracle(inst.params.gamma_bar);
  const Mat S = inst.Sigma;
  const Vec xt = inst.x_true;
  parts.exact_grad_f = ExactGradient([S, xt](const Vec& x) -> Vec { return 2.0 * S * (x - xt); });
  const auto ex = linalg::sym_eig_extremes(inst.Sigma);
  parts.constants.mu_f = 2.0 * ex.min;
  parts.constants.L_f = 2.0 * ex.max;
  parts.constants.v1_x = inst.v1_x;
  parts.constants.v2_x = inst.v2_x;
  parts.known_kkt = KKTPoint{inst.x_star, inst.x_star, inst.lambda_star};
  return StochasticProblem(std::move(parts));
}

GaussianRegressionSampler DistRegInstance::sampler_x() const {
  return {chol, beta1, std::sqrt(params.sigma_s2), false};
}
GaussianRegressionSampler DistRegInstance::sampler_y() const {
  return {chol, beta2, std::sqrt(params.sigma_s2), false};
}
Vec DistRegInstance::z_star() const {
  Vec z(beta1.size() + beta2.size());
  z << beta1, beta2;
  return z;
}

DistRegInstance gen_distreg(const DistRegParams& p, Stream& stream) {
  require(p.n >= 1, "distributed regression needs n >= 1");
  require(p.sigma_l2 > 0.0 && p.sigma_s2 >= 0.0, "need sigma_l2 > 0 and sigma_s2 >= 0");
  require(p.offdiag_var >= 0.0 && p.max_retries >= 1, "need offdiag_var >= 0, max_retries >= 1");
  const long n = p.n;
  DistRegInstance inst;
  inst.params = p;
  inst.Sigma = kms_covariance(n, p.sigma_l2);
  inst.chol = cholesky_lower(inst.Sigma);
  const double sd = std::sqrt(p.offdiag_var);
  bool ok = false;
  for (int attempt = 0; attempt < p.max_retries && !ok; ++attempt) {
    inst.A = Mat::Zero(n, n);
    for (long i = 0; i < n; ++i) {
      inst.A(i, i) = 3.0;
      for (long j = i + 1; j < n; ++j) inst.A(i, j) = sd * stream.normal();
    }
    inst.beta2.resize(n);
    for (long i = 0; i < n; ++i) inst.beta2(i) = truncated_uniform(stream);
    if (linalg::numerical_rank(inst.A) < n) continue;
    inst.beta1 = inst.A.triangularView<Eigen::Upper>().solve(inst.beta2);
    const double res = (inst.A * inst.beta1 - inst.beta2).lpNorm<Eigen::Infinity>();
    ok = std::isfinite(res) && res <= 1e-10 * std::max(1.0, inst.beta2.lpNorm<Eigen::Infinity>());
  }
  if (!ok) throw NumericalError("could not generate a nonsingular A");

  inst.V = isserlis_V_centered(inst.Sigma);
  inst.v1 = 8.0 * linalg::lambda_max(inst.V);
  const double noise = 4.0 * p.sigma_s2 * inst.Sigma.trace();
  inst.v2_x = 8.0 * inst.beta1.dot(inst.V * inst.beta1) + noise;
  inst.v2_y = 8.0 * inst.beta2.dot(inst.V * inst.beta2) + noise;
  // grad f(beta1) = 0 and A'lambda = grad f(x*) with A nonsingular
  inst.lambda_star = Vec::Zero(n);
  inst.F_star = 2.0 * p.sigma_s2;
  return inst;
}

StochasticProblem distreg_problem(const DistRegInstance& inst) {
  const long n = inst.params.n;
  ProblemParts parts;
  parts.A = inst.A;
  parts.B = -Mat::Identity(n, n);
  parts.b = Vec::Zero(n);
  parts.oracle_f = least_squares_oracle(inst.sampler_x());
  parts.oracle_g = least_squares_oracle(inst.sampler_y());
  const Mat S = inst.Sigma;
  const Vec b1 = inst.beta1, b2 = inst.beta2;
  parts.exact_grad_f = ExactGradient([S, b1](const Vec& x) -> Vec { return 2.0 * S * (x - b1); });
  parts.exact_grad_g = ExactGradient([S, b2](const Vec& y) -> Vec { return 2.0 * S * (y - b2); });
  const auto ex = linalg::sym_eig_extremes(inst.Sigma);
  parts.constants.mu_f = 2.0 * ex.min;
  parts.constants.L_f = 2.0 * ex.max;
  parts.constants.sigma_g = 2.0 * ex.min;
  parts.constants.L_g = 2.0 * ex.max;
  parts.constants.v1_x = inst.v1;
  parts.constants.v1_y = inst.v1;
  parts.constants.v2_x = inst.v2_x;
  parts.constants.v2_y = inst.v2_y;
  parts.known_kkt = KKTPoint{inst.beta1, inst.beta2, inst.lambda_star};
  return StochasticProblem(std::move(parts));
}

nlohmann::json to_json(const LassoParams& p) {
  return {{"problem", "lasso"},         {"n", p.n},
          {"sigma_l2", p.sigma_l2},     {"sigma_s2", p.sigma_s2},
          {"gamma_bar", p.gamma_bar},   {"bernoulli_p", p.bernoulli_p}};
}

nlohmann::json to_json(const DistRegParams& p) {
  return {{"problem", "distreg"},     {"n", p.n},
          {"sigma_l2", p.sigma_l2},   {"sigma_s2", p.sigma_s2},
          {"offdiag_var", p.offdiag_var}, {"max_retries", p.max_retries}};
}

}  // namespace siadmm
