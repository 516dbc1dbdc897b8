#pragma once

#include <vector>

#include "siadmm/problem.hpp"

namespace siadmm {

// f(x) = 1/2 x'H_f x + c_f'x, g(y) = 1/2 y'H_g y + c_g'y, subject to Ax + By = b.
struct QuadraticInstance {
  Mat H_f;
  Vec c_f;
  Mat H_g;
  Vec c_g;
  Mat A;
  Mat B;
  Vec b;

  void validate() const;
};

struct ExactAdmmConfig {
  double rho = 1.0;
  double gamma = 1.0;
  Mat P;  // empty means zero
  Mat Q;  // empty means zero
};

class ExactAdmm {
 public:
  ExactAdmm(const QuadraticInstance& inst, const ExactAdmmConfig& cfg);
  Iterate step(const Iterate& u) const;
  GMetric metric() const;
  const Mat& P() const { return P_; }
  const Mat& Q() const { return Q_; }

 private:
  const QuadraticInstance& inst_;
  double rho_;
  double gamma_;
  Mat P_;
  Mat Q_;
  Eigen::LLT<Mat> y_solver_;
  Eigen::LLT<Mat> x_solver_;
};

Iterate exact_admm_step(const QuadraticInstance& inst, const ExactAdmmConfig& cfg,
                        const Iterate& u_k);

KKTPoint solve_kkt(const QuadraticInstance& inst);

// Checks one of the step conditions: (P != 0 and (2-gamma)P > (gamma-1) rho A'A)
// or (P = 0 and gamma = 1).
void validate_step_condition(const QuadraticInstance& inst, const ExactAdmmConfig& cfg);

struct ContractionReport {
  double bound = 0.0;  // 1/(1+delta)
  std::vector<double> errors;  // |u_k - u*|_G^2, k = 0..num_iters
  std::vector<double> ratios;  // NaN where the start error is below the resolution floor
  bool passed = true;
  bool vacuous = false;
};

// Ratios whose starting error is below `floor` are treated as vacuous (0/0).
ContractionReport contraction_check(const QuadraticInstance& inst, const ExactAdmmConfig& cfg,
                                    double delta, const Iterate& u0, long num_iters,
                                    double floor = 1e-24);

struct RandomQuadraticOptions {
  Eigen::Index n = 5;
  Eigen::Index m = 5;
  Eigen::Index p = 5;
  double eig_lo = 1.0;
  double eig_hi = 100.0;
  bool identity_A = false;
  bool g_strongly_convex = true;  // H_g > 0, otherwise H_g = 0
  double sv_lo = 1.0;             // singular values of random A, B
  double sv_hi = 10.0;
};

QuadraticInstance random_quadratic_instance(const RandomQuadraticOptions& opts, Stream& stream);

// Moduli of f and g for a quadratic instance.
struct QuadraticModuli {
  double mu_f, L_f, sigma_g, L_g;
};
QuadraticModuli quadratic_moduli(const QuadraticInstance& inst);

// Wraps a quadratic instance as a stochastic problem with additive N(0, noise_sd^2 I)
// gradient noise; variance constants v1 = 0, v2 = noise_sd^2 * dim.
StochasticProblem quadratic_as_problem(const QuadraticInstance& inst, double noise_sd);

}  // namespace siadmm
