#pragma once

#include <optional>
#include <vector>

#include "json.hpp"
#include "siadmm/problem.hpp"
#include "siadmm/sa.hpp"
#include "siadmm/si_admm.hpp"

namespace siadmm {

double delta_simple(double mu_f, double L_f, double rho, const Mat& A);
double delta_strongly_convex_g(double mu_f, double L_f, double sigma_g, double rho, const Mat& A,
                               const Mat& Q);
// Picks the constructive gap matching (P, gamma, Q); errors when none applies.
double delta_for(const StochasticProblem& prob, const AlgorithmConfig& cfg);

// Shared factor gamma^2 / (2 c gamma - 1 - gamma^2 M / K) + K b_hat of one subproblem.
double sa_factor(const SARateConstants& sa, const char* name);

struct SimpleZeta {
  double scale = 0.0;  // lambda_max(P_hat) + rho gamma |A|^2
  double D_x = 0.0;
  double C12x = 0.0;
  double C11x = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
};

SimpleZeta zeta_simple(const DerivedConstants& consts, const StochasticProblem& prob,
                       const AlgorithmConfig& cfg, const SARateConstants& sa_x, double delta,
                       double x_star_norm_sq);

struct FullZeta {
  double D_x = 0.0;
  double D_y = 0.0;
  double coupling = 0.0;  // (rho |A'B| / c_x)^2
  double C1x = 0.0;       // = C2x
  double C2x = 0.0;
  double Cbar12x = 0.0;
  double Chat12x = 0.0;  // = Chat11x
  double Chat11x = 0.0;
  double C12y = 0.0;
  double C1y = 0.0;  // = C2y
  double C2y = 0.0;
  double Cbar11x = 0.0;
  double C11y = 0.0;
  double zeta1x = 0.0;
  double zeta1y = 0.0;
  double zeta1xy = 0.0;
  double zeta2x = 0.0;
  double zeta2y = 0.0;
  double zeta2xy = 0.0;
};

FullZeta zeta_full(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                   const DerivedConstants& consts, const SARateConstants& sa_x,
                   const SARateConstants& sa_y, double delta, const Vec& x_star,
                   const Vec& y_star);

enum class BoundKind { simple, full };

struct BoundCertificate {
  BoundKind kind = BoundKind::simple;
  double delta = 0.0;
  double T = 0.0;
  double eta = 0.0;
  double R = 1.0;
  long K_x = 0;
  long K_y = 0;
  double a_x = 0.0;
  double b_x = 0.0;
  double a_y = 0.0;
  double b_y = 0.0;
  double lambda_min_P_hat = 0.0;
  double lambda_min_Q = 0.0;
  double error_divisor = 1.0;  // G-error / divisor bounds the iterate error
  std::optional<SimpleZeta> simple;
  std::optional<FullZeta> full;

  // Recursion coefficients: with s = eta^k / T,
  // D = (z2_lin + z2_quad s) s E + (z1_lin + z1_quad s) s.
  double z2_lin = 0.0;
  double z2_quad = 0.0;
  double z1_lin = 0.0;
  double z1_quad = 0.0;

  int sampled_blocks() const { return kind == BoundKind::full ? 2 : 1; }
  long K_sum() const { return kind == BoundKind::full ? K_x + K_y : K_x; }
  void validate() const;
};

BoundCertificate make_certificate(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                                  const DerivedConstants& consts);

nlohmann::json to_json(const BoundCertificate& cert);

struct BoundPoint {
  long k = 0;
  double g_bound = 0.0;
  double iterate_bound = 0.0;
  double R0 = 0.0;  // R_{0,k-1} used to reach this point; +inf in the noiseless limit
};

// One application of the recursion at outer index k with optimal R_{0,k}.
double bound_step(const BoundCertificate& cert, double E, long k, double* R0_out = nullptr);

// Certified mode: propagates the bound itself, points k = 0..num_outer.
std::vector<BoundPoint> bound_curve(const BoundCertificate& cert, double r0, long num_outer);

// Empirical mode: measured[k] is the mean G-error at outer index k; returns
// one-step bounds for k = 1..measured.size().
std::vector<BoundPoint> bound_curve_empirical(const BoundCertificate& cert,
                                              const std::vector<double>& measured);

struct ComplexityBound {
  double L_ratio = 0.0;
  double R0 = 0.0;
  double a = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double log_S = 0.0;  // log(e^alpha r0 / L + C34 e^beta / (eta (1 - 1/L)))
  double K_bar = 0.0;  // may exceed the range of long
  double leading_coeff = 0.0;  // blocks T S / (1 - eta), +inf on overflow
  double log_coeff = 0.0;
  double N_bound = 0.0;
  double log_N_bound = 0.0;
};

// Default L: 2 when feasible, otherwise the geometric midpoint of (1, eta (1 + delta)).
double default_L_ratio(const BoundCertificate& cert);

ComplexityBound complexity_bound(const BoundCertificate& cert, double r0,
                                 std::optional<double> L_ratio, double eps);

}  // namespace siadmm
