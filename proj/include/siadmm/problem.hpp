#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "siadmm/linalg.hpp"
#include "siadmm/rng.hpp"

namespace siadmm {

// Writes a sampled gradient at `point` into `out` (pre-sized by the caller).
using GradientOracle = std::function<void(const Vec& point, Stream& stream, Vec& out)>;
using ExactGradient = std::function<Vec(const Vec& point)>;

class StochasticProblem;

struct AugmentedLagrangianParams {
  double rho = 1.0;
  Mat P;  // n x n proximal weight for the x-subproblem
  Mat Q;  // m x m proximal weight for the y-subproblem
};

// Exact minimizer over y of g(y) - lambda'(Ax + By - b) + rho/2 |Ax + By - b|^2
// + 1/2 |y - y_anchor|_Q^2.
using ExactYUpdate = std::function<Vec(const StochasticProblem& prob,
                                       const AugmentedLagrangianParams& params, const Vec& x,
                                       const Vec& y_anchor, const Vec& lambda)>;

struct ProxOracle {
  ExactYUpdate update;
};

using GOracle = std::variant<GradientOracle, ProxOracle>;

struct ProblemConstants {
  double mu_f = 0.0;
  double L_f = 0.0;
  double sigma_g = 0.0;
  double L_g = 0.0;
  double v1_x = 0.0;
  double v2_x = 0.0;
  double v1_y = 0.0;
  double v2_y = 0.0;

  void validate(bool stochastic_g) const;
};

struct KKTPoint {
  Vec x_star;
  Vec y_star;
  Vec lambda_star;
};

struct Iterate {
  Vec x;
  Vec y;
  Vec lambda;

  static Iterate zeros(Eigen::Index n, Eigen::Index m, Eigen::Index p);
  Iterate operator-(const Iterate& o) const;
  Iterate operator+(const Iterate& o) const;
  Iterate operator*(double c) const;
};

Iterate as_iterate(const KKTPoint& kkt);

struct ProblemParts {
  Mat A;
  Mat B;
  Vec b;
  GradientOracle oracle_f;
  GOracle oracle_g;
  std::optional<ExactGradient> exact_grad_f;
  std::optional<ExactGradient> exact_grad_g;
  ProblemConstants constants;
  std::optional<KKTPoint> known_kkt;
};

class StochasticProblem {
 public:
  explicit StochasticProblem(ProblemParts parts);

  Eigen::Index dim_x() const { return p_.A.cols(); }
  Eigen::Index dim_y() const { return p_.B.cols(); }
  Eigen::Index dim_c() const { return p_.A.rows(); }

  const Mat& A() const { return p_.A; }
  const Mat& B() const { return p_.B; }
  const Vec& b() const { return p_.b; }
  const GradientOracle& oracle_f() const { return p_.oracle_f; }
  const GOracle& oracle_g() const { return p_.oracle_g; }
  bool g_is_stochastic() const { return std::holds_alternative<GradientOracle>(p_.oracle_g); }
  const GradientOracle& oracle_g_grad() const;
  const ProxOracle& oracle_g_prox() const;
  const std::optional<ExactGradient>& exact_grad_f() const { return p_.exact_grad_f; }
  const std::optional<ExactGradient>& exact_grad_g() const { return p_.exact_grad_g; }
  const ProblemConstants& constants() const { return p_.constants; }
  const std::optional<KKTPoint>& known_kkt() const { return p_.known_kkt; }

  void check_iterate(const Iterate& u) const;

 private:
  ProblemParts p_;
};

class GMetric {
 public:
  GMetric(Mat P_hat, Mat Q, double rho_gamma);
  static GMetric for_problem(const StochasticProblem& prob, const AugmentedLagrangianParams& params,
                             double gamma);

  const Mat& P_hat() const { return P_hat_; }
  const Mat& Q() const { return Q_; }
  double rho_gamma() const { return rho_gamma_; }

 private:
  Mat P_hat_;
  Mat Q_;
  double rho_gamma_;
};

double g_norm_sq(const GMetric& metric, const Iterate& u);
double g_dist_sq(const GMetric& metric, const Iterate& u, const Iterate& v);

void validate_params(const StochasticProblem& prob, const AugmentedLagrangianParams& params);

Vec grad_L1_tilde(const StochasticProblem& prob, const AugmentedLagrangianParams& params,
                  const Vec& x, const Vec& y, const Vec& lambda, const Vec& x_anchor,
                  Stream& sample);
Vec grad_L2_tilde(const StochasticProblem& prob, const AugmentedLagrangianParams& params,
                  const Vec& x, const Vec& y, const Vec& lambda, const Vec& y_anchor,
                  Stream& sample);

double kkt_residual(const StochasticProblem& prob, const Iterate& u);

}  // namespace siadmm
