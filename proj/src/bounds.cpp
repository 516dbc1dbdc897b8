#include "siadmm/bounds.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "siadmm/error.hpp"

namespace siadmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add(double la, double lb) {
  if (la == -kInf) return lb;
  if (lb == -kInf) return la;
  const double m = std::max(la, lb);
  return m + std::log(std::exp(la - m) + std::exp(lb - m));
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -kInf; }

}  // namespace

double delta_simple(double mu_f, double L_f, double rho, const Mat& A) {
  require(mu_f > 0.0 && L_f >= mu_f && rho > 0.0, "delta_simple needs mu_f > 0, L_f >= mu_f, rho > 0");
  const Mat AAt = A * A.transpose();
  const auto e = linalg::sym_eig_extremes(AAt);
  if (!(e.min > 1e-10 * std::max(1.0, e.max)))
    throw ConfigError("delta_simple: A is rank deficient (lambda_min(AA') ~ 0)");
  const double normA2 = e.max;  // |A|^2 = lambda_max(AA')
  return 2.0 / (rho * normA2 / mu_f + L_f / (rho * e.min));
}

double delta_strongly_convex_g(double mu_f, double L_f, double sigma_g, double rho, const Mat& A,
                               const Mat& Q) {
  if (!linalg::is_pd(Q)) throw ConfigError("delta_strongly_convex_g: Q must be positive definite");
  require(sigma_g >= 0.0, "sigma_g must be nonnegative");
  const double d0 = delta_simple(mu_f, L_f, rho, A);
  const double normQ = linalg::lambda_max(Q);
  return std::min(d0, 2.0 * sigma_g / normQ);
}

double delta_for(const StochasticProblem& prob, const AlgorithmConfig& cfg) {
  const auto params = cfg.al_params(prob);
  const auto& pc = prob.constants();
  if (!linalg::is_zero(params.P) || cfg.gamma != 1.0)
    throw ConfigError("no closed-form delta for P != 0 or gamma != 1; supply delta explicitly");
  if (linalg::is_zero(params.Q)) return delta_simple(pc.mu_f, pc.L_f, params.rho, prob.A());
  if (linalg::is_pd(params.Q) && pc.sigma_g > 0.0)
    return delta_strongly_convex_g(pc.mu_f, pc.L_f, pc.sigma_g, params.rho, prob.A(), params.Q);
  throw ConfigError("no closed-form delta for a semidefinite Q; supply delta explicitly");
}

double sa_factor(const SARateConstants& sa, const char* name) {
  const double den = sa.q_denominator();
  if (!(den > 0.0))
    throw NumericalError(std::string("denominator 2c gamma - 1 - gamma^2 M/K of the ") + name +
                         "-subproblem is not positive");
  return sa.gamma0 * sa.gamma0 / den + static_cast<double>(sa.K) * sa.b_hat;
}

SimpleZeta zeta_simple(const DerivedConstants& consts, const StochasticProblem& prob,
                       const AlgorithmConfig& cfg, const SARateConstants& sa_x, double delta,
                       double x_star_norm_sq) {
  (void)consts;
  require(delta > 0.0, "delta must be positive");
  require(x_star_norm_sq >= 0.0, "|x*|^2 must be nonnegative");
  const auto params = cfg.al_params(prob);
  const Mat P_hat = params.P + params.rho * prob.A().transpose() * prob.A();
  const auto eP = linalg::sym_eig_extremes(P_hat);
  require(eP.min > 0.0, "P_hat must be positive definite");
  const double normA = linalg::spectral_norm(prob.A());

  SimpleZeta z;
  z.scale = eP.max + params.rho * cfg.gamma * normA * normA;
  z.D_x = sa_factor(sa_x, "x");
  const double Kx = static_cast<double>(sa_x.K);
  z.C12x = z.D_x * sa_x.v1 * (1.0 + sa_x.R) * 2.0 / (eP.min * (1.0 + delta)) +
           Kx * sa_x.a_hat * (2.0 / eP.min) * (1.0 + 1.0 / (1.0 + delta));
  z.C11x = z.D_x * (sa_x.v1 * (1.0 + sa_x.R) * 2.0 * x_star_norm_sq + sa_x.v2);
  z.zeta2 = z.scale * z.C12x;
  z.zeta1 = z.scale * z.C11x;
  return z;
}

FullZeta zeta_full(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                   const DerivedConstants& consts, const SARateConstants& sa_x,
                   const SARateConstants& sa_y, double delta, const Vec& x_star,
                   const Vec& y_star) {
  require(delta > 0.0, "delta must be positive");
  require(prob.g_is_stochastic(), "zeta_full needs a stochastic g-oracle");
  const auto params = cfg.al_params(prob);
  const Mat& A = prob.A();
  const Mat& B = prob.B();
  const double rho = params.rho;
  const double gam = cfg.gamma;
  const double R = sa_x.R;
  const Mat P_hat = params.P + rho * A.transpose() * A;
  const auto eP = linalg::sym_eig_extremes(P_hat);
  const auto eQ = linalg::sym_eig_extremes(params.Q);
  if (!(eQ.min > 0.0)) throw ConfigError("zeta_full needs Q positive definite");
  require(eP.min > 0.0, "P_hat must be positive definite");
  const double lmaxAtA = linalg::lambda_max(A.transpose() * A);
  const double lmaxBtB = linalg::lambda_max(B.transpose() * B);
  const double normAtB = linalg::spectral_norm(A.transpose() * B);
  const double cx = consts.x.c;
  const double d1 = 1.0 + delta;

  FullZeta z;
  z.D_x = sa_factor(sa_x, "x");
  z.D_y = sa_factor(sa_y, "y");
  const double Kx = static_cast<double>(sa_x.K);
  const double Ky = static_cast<double>(sa_y.K);
  z.coupling = std::pow(rho * normAtB / cx, 2);

  z.C1x = 2.0 * eP.max + 4.0 * rho * gam * lmaxAtA;
  z.C2x = z.C1x;
  z.Cbar12x = z.D_x * sa_x.v1 * (1.0 + R) * 3.0 / (eP.min * d1) +
              Kx * sa_x.a_hat * (3.0 / eP.min) * (1.0 + 1.0 / d1);
  z.Chat12x = z.D_x * sa_x.v1 * 3.0 * (1.0 + R) * z.coupling + 3.0 * Kx * sa_x.a_hat * z.coupling;
  z.Chat11x = z.Chat12x;
  z.C12y = z.D_y * sa_y.v1 * (1.0 + R) * 2.0 / (eQ.min * d1) +
           Ky * sa_y.a_hat * (2.0 / eQ.min) * (1.0 + 1.0 / d1);
  z.C1y = 2.0 * eP.max * z.coupling + eQ.max + 4.0 * z.coupling * rho * gam * lmaxAtA +
          2.0 * rho * gam * lmaxBtB;
  z.C2y = z.C1y;
  z.Cbar11x = z.D_x * (sa_x.v1 * (1.0 + R) * 3.0 * x_star.squaredNorm() + sa_x.v2);
  z.C11y = z.D_y * (sa_y.v1 * (1.0 + R) * 2.0 * y_star.squaredNorm() + sa_y.v2);

  z.zeta2x = z.C2x * z.Cbar12x;
  z.zeta2y = z.C2y * z.C12y;
  z.zeta2xy = z.C2x * z.Chat12x * z.C12y;
  z.zeta1x = z.C1x * z.Cbar11x;
  z.zeta1y = z.C1y * z.C11y;
  z.zeta1xy = z.C1x * z.Chat11x * z.C11y;
  return z;
}

void BoundCertificate::validate() const {
  require(delta > 0.0, "certificate needs delta > 0");
  require(T > 0.0 && eta > 0.0 && eta < 1.0, "certificate needs T > 0 and eta in (0,1)");
  require(error_divisor > 0.0, "certificate needs a positive error divisor");
  for (double v : {z2_lin, z2_quad, z1_lin, z1_quad})
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericalError("certificate constant is invalid");
}

BoundCertificate make_certificate(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                                  const DerivedConstants& consts) {
  require(prob.known_kkt().has_value(), "certificate needs the KKT point");
  const auto& kkt = *prob.known_kkt();
  const auto params = cfg.al_params(prob);
  const Mat P_hat = params.P + params.rho * prob.A().transpose() * prob.A();

  BoundCertificate c;
  c.delta = consts.delta;
  c.T = cfg.T;
  c.eta = consts.eta;
  c.R = cfg.R;
  c.K_x = consts.x.K();
  c.a_x = consts.x.rate.a_hat;
  c.b_x = consts.x.rate.b_hat;
  c.lambda_min_P_hat = linalg::lambda_min(P_hat);
  if (prob.g_is_stochastic()) {
    c.kind = BoundKind::full;
    c.K_y = consts.y->K();
    c.a_y = consts.y->rate.a_hat;
    c.b_y = consts.y->rate.b_hat;
    c.lambda_min_Q = linalg::lambda_min(params.Q);
    c.full = zeta_full(prob, cfg, consts, consts.x.rate, consts.y->rate, consts.delta,
                       kkt.x_star, kkt.y_star);
    c.z2_lin = c.full->zeta2x + c.full->zeta2y;
    c.z2_quad = c.full->zeta2xy;
    c.z1_lin = c.full->zeta1x + c.full->zeta1y;
    c.z1_quad = c.full->zeta1xy;
    c.error_divisor = std::min(c.lambda_min_Q, c.lambda_min_P_hat);
  } else {
    c.kind = BoundKind::simple;
    c.simple = zeta_simple(consts, prob, cfg, consts.x.rate, consts.delta,
                           kkt.x_star.squaredNorm());
    c.z2_lin = c.simple->zeta2;
    c.z1_lin = c.simple->zeta1;
    c.error_divisor = c.lambda_min_P_hat;
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const BoundCertificate& c) {
  nlohmann::json j;
  j["kind"] = c.kind == BoundKind::simple ? "simple" : "full";
  j["delta"] = c.delta;
  j["T"] = c.T;
  j["eta"] = c.eta;
  j["R"] = c.R;
  j["K_x"] = c.K_x;
  j["a_x"] = c.a_x;
  j["b_x"] = c.b_x;
  j["lambda_min_P_hat"] = c.lambda_min_P_hat;
  j["error_divisor"] = c.error_divisor;
  if (c.simple) {
    const auto& s = *c.simple;
    j["simple"] = {{"scale", s.scale}, {"D_x", s.D_x}, {"C12x", s.C12x},
                   {"C11x", s.C11x},   {"zeta1", s.zeta1}, {"zeta2", s.zeta2}};
  }
  if (c.full) {
    const auto& f = *c.full;
    j["K_y"] = c.K_y;
    j["a_y"] = c.a_y;
    j["b_y"] = c.b_y;
    j["lambda_min_Q"] = c.lambda_min_Q;
    j["full"] = {{"D_x", f.D_x},         {"D_y", f.D_y},         {"coupling", f.coupling},
                 {"C1x", f.C1x},         {"C2x", f.C2x},         {"Cbar12x", f.Cbar12x},
                 {"Chat12x", f.Chat12x}, {"Chat11x", f.Chat11x}, {"C12y", f.C12y},
                 {"C1y", f.C1y},         {"C2y", f.C2y},         {"Cbar11x", f.Cbar11x},
                 {"C11y", f.C11y},       {"zeta1x", f.zeta1x},   {"zeta1y", f.zeta1y},
                 {"zeta1xy", f.zeta1xy}, {"zeta2x", f.zeta2x},   {"zeta2y", f.zeta2y},
                 {"zeta2xy", f.zeta2xy}};
  }
  return j;
}

double bound_step(const BoundCertificate& cert, double E, long k, double* R0_out) {
  require(E >= 0.0, "bound_step needs a nonnegative error");
  const double s = std::pow(cert.eta, static_cast<double>(k)) / cert.T;
  const double lin = (cert.z2_lin + cert.z2_quad * s) * s;
  const double aff = (cert.z1_lin + cert.z1_quad * s) * s;
  const double D = lin * E + aff;
  const double contraction = 1.0 / (1.0 + cert.delta);
  if (D == 0.0) {
    if (R0_out) *R0_out = kInf;
    return contraction * E;
  }
  if (E == 0.0) {
    if (R0_out) *R0_out = 0.0;
    return D;
  }
  const double R0 = std::sqrt(E * contraction / D);
  if (R0_out) *R0_out = R0;
  return (1.0 + R0) * D + (1.0 + 1.0 / R0) * contraction * E;
}

std::vector<BoundPoint> bound_curve(const BoundCertificate& cert, double r0, long num_outer) {
  cert.validate();
  if (r0 < 0.0) throw ConfigError("bound_curve needs r0 >= 0");
  require(num_outer >= 0, "num_outer must be nonnegative");
  std::vector<BoundPoint> out;
  out.reserve(static_cast<std::size_t>(num_outer) + 1);
  out.push_back({0, r0, r0 / cert.error_divisor, std::nan("")});
  double E = r0;
  for (long k = 0; k < num_outer; ++k) {
    double R0 = 0.0;
    E = bound_step(cert, E, k, &R0);
    out.push_back({k + 1, E, E / cert.error_divisor, R0});
  }
  return out;
}

std::vector<BoundPoint> bound_curve_empirical(const BoundCertificate& cert,
                                              const std::vector<double>& measured) {
  cert.validate();
  std::vector<BoundPoint> out;
  out.reserve(measured.size());
  for (std::size_t k = 0; k < measured.size(); ++k) {
    double R0 = 0.0;
    const double E = bound_step(cert, measured[k], static_cast<long>(k), &R0);
    out.push_back({static_cast<long>(k) + 1, E, E / cert.error_divisor, R0});
  }
  return out;
}

double default_L_ratio(const BoundCertificate& cert) {
  const double hi = cert.eta * (1.0 + cert.delta);
  if (hi > 2.0) return 2.0;
  return std::sqrt(hi);
}

ComplexityBound complexity_bound(const BoundCertificate& cert, double r0,
                                 std::optional<double> L_ratio, double eps) {
  cert.validate();
  require(r0 >= 0.0, "complexity_bound needs r0 >= 0");
  if (!(cert.eta > 1.0 / (1.0 + cert.delta)))
    throw ConfigError("complexity bound needs eta > 1/(1+delta)");
  if (!(eps > 0.0 && eps <= std::exp(-1.0)))
    throw ConfigError("complexity bound needs 0 < eps <= 1/e");
  const double eta = cert.eta;
  const double hi = eta * (1.0 + cert.delta);

  ComplexityBound c;
  c.L_ratio = L_ratio.value_or(default_L_ratio(cert));
  if (!(c.L_ratio > 1.0 && c.L_ratio < hi))
    throw ConfigError("L must satisfy 1 < L < eta (1 + delta) = " + std::to_string(hi));
  c.a = eta / c.L_ratio;
  c.R0 = 1.0 / (c.a * (1.0 + cert.delta) - 1.0);
  const double T = cert.T;
  c.C1 = (1.0 + c.R0) * cert.z2_lin / T;
  c.C2 = (1.0 + c.R0) * cert.z2_quad / (T * T);
  c.C3 = (1.0 + c.R0) * cert.z1_lin / T;
  c.C4 = (1.0 + c.R0) * cert.z1_quad / (T * T);
  const double C12 = c.C1 + c.C2;
  const double C34 = c.C3 + c.C4;
  c.alpha = (c.C1 * (1.0 + eta) + c.C2) / (c.a * (1.0 - eta * eta));
  c.beta = C12 * eta / (c.a * (1.0 - eta));
  const double L = c.L_ratio;
  c.log_S = log_add(c.alpha + safe_log(r0) - std::log(L),
                    safe_log(C34) + c.beta - std::log(eta * (1.0 - 1.0 / L)));

  const double log_eta = std::log(eta);
  const double log_inv_eps = -std::log(eps);
  c.K_bar = std::ceil((std::log(eps) - c.log_S) / log_eta);
  if (c.log_S == -kInf) c.K_bar = 0.0;

  const double blocks = cert.sampled_blocks();
  const double Ksum = static_cast<double>(cert.K_sum());
  // N <= [blocks T S / (1 - eta)] / eps + {[1 - log_eta S] Ksum + Ksum / log(1/eta)} log(1/eps)
  const double log_lead = std::log(blocks * T / (1.0 - eta)) + c.log_S;
  c.leading_coeff = std::exp(log_lead);
  const double log_eta_S = c.log_S == -kInf ? kInf : c.log_S / log_eta;
  c.log_coeff = (1.0 - log_eta_S) * Ksum + Ksum / (-log_eta);
  if (c.log_S == -kInf) c.log_coeff = Ksum + Ksum / (-log_eta);
  const double second = c.log_coeff * log_inv_eps;
  c.log_N_bound = log_add(log_lead + log_inv_eps, safe_log(second));
  c.N_bound = std::exp(c.log_N_bound);
  return c;
}

}  // namespace siadmm
