#include "siadmm/sa.hpp"

#include <algorithm>
#include <limits>

namespace siadmm {

namespace {
constexpr long kMaxBurnIn = 1'000'000'000L;
}

void SAProblem::validate() const {
  require(static_cast<bool>(grad_oracle), "SA problem needs a gradient oracle");
  require(c > 0.0 && c <= L, "SA problem needs 0 < c <= L");
  require(v1 >= 0.0 && v2 >= 0.0, "variance coefficients must be nonnegative");
  require(R > 0.0, "R must be positive");
}

double SARateConstants::q_denominator() const {
  return 2.0 * c * gamma0 - gamma0 * gamma0 * M / static_cast<double>(K) - 1.0;
}

double SARateConstants::a(long i) const {
  const double g = gamma0 / static_cast<double>(i);
  return 1.0 - 2.0 * c * g + g * g * M;
}

SARateConstants compute_rate_constants(double c, double L, double v1, double v2, double R,
                                       double gamma0) {
  require(c > 0.0 && c <= L, "rate constants need 0 < c <= L");
  require(v1 >= 0.0 && v2 >= 0.0 && R > 0.0, "rate constants need v1, v2 >= 0 and R > 0");
  require(gamma0 > 0.0, "gamma0 must be positive");
  if (2.0 * c * gamma0 <= 1.0) throw ConfigError("rate regime violated: gamma0 <= 1/(2c)");

  SARateConstants r;
  r.c = c;
  r.L = L;
  r.v1 = v1;
  r.v2 = v2;
  r.R = R;
  r.gamma0 = gamma0;
  r.M = L * L + v1 * (1.0 + 1.0 / R);
  const double kr = std::ceil(gamma0 * gamma0 * r.M / (2.0 * c * gamma0 - 1.0));
  if (!(kr + 1.0 <= static_cast<double>(kMaxBurnIn)))
    throw NumericalError("burn-in index K exceeds " + std::to_string(kMaxBurnIn));
  r.K = static_cast<long>(kr) + 1;

  r.a_hat = 1.0;
  for (long i = 1; i < r.K; ++i) {
    const double ai = r.a(i);
    if (!(ai > 0.0))
      throw ConfigError("contraction factor a_" + std::to_string(i) + " is not positive");
    r.a_hat *= ai;
  }
  // b_hat = sum_{i=1}^{K-2} gamma_i^2 a_{i+1}...a_{K-1} + gamma_{K-1}^2
  double suffix = 1.0;
  r.b_hat = 0.0;
  for (long i = r.K - 1; i >= 1; --i) {
    const double gi = gamma0 / static_cast<double>(i);
    r.b_hat += gi * gi * suffix;
    suffix *= r.a(i);
  }
  if (!std::isfinite(r.a_hat) || !std::isfinite(r.b_hat))
    throw NumericalError("rate constants overflowed");
  return r;
}

double QBound::operator()(long k) const {
  if (k < K_)
    throw ConfigError("q_bound evaluated at k = " + std::to_string(k) + " < K = " +
                      std::to_string(K_));
  return Q_ / static_cast<double>(k);
}

QBound q_bound(const SARateConstants& consts, double e1, double x_star_norm_sq) {
  require(e1 >= 0.0 && x_star_norm_sq >= 0.0, "q_bound needs nonnegative e1 and |x*|^2");
  const double C = consts.C_of(x_star_norm_sq);
  const double e_K = consts.a_hat * e1 + consts.b_hat * C;
  const double den = consts.q_denominator();
  if (!(den > 0.0)) throw NumericalError("q_bound denominator is not positive");
  const double Q = std::max(consts.gamma0 * consts.gamma0 * C / den,
                            static_cast<double>(consts.K) * e_K);
  return QBound(consts.K, Q);
}

Vec sa_run(const SAProblem& problem, const Vec& x_init, double gamma0, long num_steps,
           Stream& stream) {
  problem.validate();
  require(gamma0 > 0.0, "gamma0 must be positive");
  require(num_steps >= 1, "num_steps must be at least 1");
  Vec x = x_init;
  Vec scratch(x.size());
  const auto& oracle = problem.grad_oracle;
  sa_iterate([&](const Vec& p, Vec& out) { oracle(p, stream, out); }, x, scratch, gamma0,
             num_steps);
  return x;
}

}  // namespace siadmm
