#include "siadmm/problem.hpp"

#include <algorithm>
#include <cmath>

#include "siadmm/error.hpp"

namespace siadmm {

void ProblemConstants::validate(bool stochastic_g) const {
  require(mu_f > 0.0, "mu_f must be positive");
  require(L_f >= mu_f, "L_f must be at least mu_f");
  require(sigma_g >= 0.0, "sigma_g must be nonnegative");
  require(v1_x >= 0.0 && v2_x >= 0.0 && v1_y >= 0.0 && v2_y >= 0.0,
          "variance coefficients must be nonnegative");
  if (stochastic_g) {
    require(sigma_g > 0.0, "sigma_g = 0 is only allowed with an exact prox for g");
    require(L_g >= sigma_g, "L_g must be at least sigma_g");
  }
}

Iterate Iterate::zeros(Eigen::Index n, Eigen::Index m, Eigen::Index p) {
  return {Vec::Zero(n), Vec::Zero(m), Vec::Zero(p)};
}

Iterate Iterate::operator-(const Iterate& o) const { return {x - o.x, y - o.y, lambda - o.lambda}; }
Iterate Iterate::operator+(const Iterate& o) const { return {x + o.x, y + o.y, lambda + o.lambda}; }
Iterate Iterate::operator*(double c) const { return {c * x, c * y, c * lambda}; }

Iterate as_iterate(const KKTPoint& kkt) { return {kkt.x_star, kkt.y_star, kkt.lambda_star}; }

StochasticProblem::StochasticProblem(ProblemParts parts) : p_(std::move(parts)) {
  const auto p = p_.A.rows();
  require(p > 0 && p_.A.cols() > 0 && p_.B.cols() > 0, "problem dimensions must be positive");
  require(p_.B.rows() == p, "B must have as many rows as A");
  require(p_.b.size() == p, "b must have length equal to the rows of A");
  require(static_cast<bool>(p_.oracle_f), "oracle_f is required");
  if (g_is_stochastic())
    require(static_cast<bool>(std::get<GradientOracle>(p_.oracle_g)), "oracle_g is empty");
  else
    require(static_cast<bool>(std::get<ProxOracle>(p_.oracle_g).update), "prox update is empty");

  Mat AB(p, p_.A.cols() + p_.B.cols());
  AB << p_.A, p_.B;
  require(linalg::numerical_rank(AB, 1e-10) == p, "[A B] must have full row rank");
  p_.constants.validate(g_is_stochastic());

  if (p_.known_kkt) {
    const auto& k = *p_.known_kkt;
    require(k.x_star.size() == dim_x() && k.y_star.size() == dim_y() && k.lambda_star.size() == p,
            "known KKT point has wrong dimensions");
  }
}

const GradientOracle& StochasticProblem::oracle_g_grad() const {
  if (!g_is_stochastic()) throw ConfigError("g is given by an exact prox, not a gradient oracle");
  return std::get<GradientOracle>(p_.oracle_g);
}

const ProxOracle& StochasticProblem::oracle_g_prox() const {
  if (g_is_stochastic()) throw ConfigError("g has no exact prox variant");
  return std::get<ProxOracle>(p_.oracle_g);
}

void StochasticProblem::check_iterate(const Iterate& u) const {
  if (u.x.size() != dim_x() || u.y.size() != dim_y() || u.lambda.size() != dim_c())
    throw ConfigError("iterate dimensions do not match the problem");
}

GMetric::GMetric(Mat P_hat, Mat Q, double rho_gamma)
    : P_hat_(std::move(P_hat)), Q_(std::move(Q)), rho_gamma_(rho_gamma) {
  require(rho_gamma_ > 0.0, "rho*gamma must be positive");
  require(linalg::is_psd(P_hat_), "P_hat must be symmetric positive semidefinite");
  require(linalg::is_psd(Q_), "Q must be symmetric positive semidefinite");
}

void validate_params(const StochasticProblem& prob, const AugmentedLagrangianParams& params) {
  require(params.rho > 0.0, "rho must be positive");
  require(params.P.rows() == prob.dim_x() && params.P.cols() == prob.dim_x(), "P must be n x n");
  require(params.Q.rows() == prob.dim_y() && params.Q.cols() == prob.dim_y(), "Q must be m x m");
  require(linalg::is_psd(params.P), "P must be symmetric positive semidefinite");
  require(linalg::is_psd(params.Q), "Q must be symmetric positive semidefinite");
}

GMetric GMetric::for_problem(const StochasticProblem& prob, const AugmentedLagrangianParams& params,
                             double gamma) {
  validate_params(prob, params);
  require(gamma > 0.0, "gamma must be positive");
  Mat P_hat = params.P + params.rho * prob.A().transpose() * prob.A();
  return GMetric(std::move(P_hat), params.Q, params.rho * gamma);
}

double g_norm_sq(const GMetric& metric, const Iterate& u) {
  if (u.x.size() != metric.P_hat().rows() || u.y.size() != metric.Q().rows())
    throw ConfigError("iterate dimensions do not match the metric");
  return u.x.dot(metric.P_hat() * u.x) + u.y.dot(metric.Q() * u.y) +
         u.lambda.squaredNorm() / metric.rho_gamma();
}

double g_dist_sq(const GMetric& metric, const Iterate& u, const Iterate& v) {
  return g_norm_sq(metric, u - v);
}

Vec grad_L1_tilde(const StochasticProblem& prob, const AugmentedLagrangianParams& params,
                  const Vec& x, const Vec& y, const Vec& lambda, const Vec& x_anchor,
                  Stream& sample) {
  prob.check_iterate({x, y, lambda});
  require(x_anchor.size() == x.size(), "x_anchor has wrong dimension");
  Vec g(x.size());
  prob.oracle_f()(x, sample, g);
  const Vec r = prob.A() * x + prob.B() * y - prob.b();
  g += -prob.A().transpose() * lambda + params.rho * prob.A().transpose() * r +
       params.P * (x - x_anchor);
  return g;
}

Vec grad_L2_tilde(const StochasticProblem& prob, const AugmentedLagrangianParams& params,
                  const Vec& x, const Vec& y, const Vec& lambda, const Vec& y_anchor,
                  Stream& sample) {
  prob.check_iterate({x, y, lambda});
  require(y_anchor.size() == y.size(), "y_anchor has wrong dimension");
  Vec g(y.size());
  prob.oracle_g_grad()(y, sample, g);
  const Vec r = prob.A() * x + prob.B() * y - prob.b();
  g += -prob.B().transpose() * lambda + params.rho * prob.B().transpose() * r +
       params.Q * (y - y_anchor);
  return g;
}

double kkt_residual(const StochasticProblem& prob, const Iterate& u) {
  prob.check_iterate(u);
  if (!prob.exact_grad_f() || !prob.exact_grad_g())
    throw ConfigError("kkt_residual needs exact gradients of f and g");
  const double rf =
      (prob.A().transpose() * u.lambda - (*prob.exact_grad_f())(u.x)).lpNorm<Eigen::Infinity>();
  const double rg =
      (prob.B().transpose() * u.lambda - (*prob.exact_grad_g())(u.y)).lpNorm<Eigen::Infinity>();
  const double rc = (prob.A() * u.x + prob.B() * u.y - prob.b()).lpNorm<Eigen::Infinity>();
  return std::max({rf, rg, rc});
}

}  // namespace siadmm
