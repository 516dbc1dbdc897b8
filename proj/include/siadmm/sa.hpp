#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "siadmm/error.hpp"
#include "siadmm/problem.hpp"

namespace siadmm {

struct SAProblem {
  GradientOracle grad_oracle;
  double c = 0.0;
  double L = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double R = 1.0;

  void validate() const;
};

struct SARateConstants {
  double c = 0.0;
  double L = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  double R = 1.0;
  double gamma0 = 0.0;
  double M = 0.0;
  long K = 0;
  double a_hat = 0.0;
  double b_hat = 0.0;

  double C_of(double x_star_norm_sq) const { return v1 * (1.0 + R) * x_star_norm_sq + v2; }
  // 2 c gamma0 - gamma0^2 M / K - 1, positive by the choice of K.
  double q_denominator() const;
  // a_i = 1 - 2 c gamma_i + gamma_i^2 M with gamma_i = gamma0 / i.
  double a(long i) const;
};

SARateConstants compute_rate_constants(double c, double L, double v1, double v2, double R,
                                       double gamma0);

class QBound {
 public:
  QBound(long K, double Q) : K_(K), Q_(Q) {}
  double operator()(long k) const;
  long K() const { return K_; }
  double Q() const { return Q_; }

 private:
  long K_;
  double Q_;
};

QBound q_bound(const SARateConstants& consts, double e1, double x_star_norm_sq);

// In-place SA loop: x <- x - (gamma0/j) grad(x) for j = 1..num_steps-1.
// `grad(x, out)` writes the sampled gradient into `out`; `observe(k, x)` sees x_k
// for k = 1..num_steps.
template <class GradFn, class Observer>
void sa_iterate_observed(GradFn&& grad, Vec& x, Vec& scratch, double gamma0, long num_steps,
                         Observer&& observe) {
  scratch.resize(x.size());
  observe(1L, static_cast<const Vec&>(x));
  for (long j = 1; j < num_steps; ++j) {
    grad(x, scratch);
    if (!std::isfinite(scratch.sum()))
      throw NumericalError("non-finite gradient at SA step " + std::to_string(j));
    x.noalias() -= (gamma0 / static_cast<double>(j)) * scratch;
    observe(j + 1, static_cast<const Vec&>(x));
  }
}

template <class GradFn>
void sa_iterate(GradFn&& grad, Vec& x, Vec& scratch, double gamma0, long num_steps) {
  sa_iterate_observed(std::forward<GradFn>(grad), x, scratch, gamma0, num_steps,
                      [](long, const Vec&) {});
}

Vec sa_run(const SAProblem& problem, const Vec& x_init, double gamma0, long num_steps,
           Stream& stream);

}  // namespace siadmm
