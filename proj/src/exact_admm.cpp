#include "siadmm/exact_admm.hpp"

#include <cmath>

#include "siadmm/error.hpp"

namespace siadmm {

void QuadraticInstance::validate() const {
  const auto n = H_f.rows(), m = H_g.rows(), p = A.rows();
  require(H_f.cols() == n && c_f.size() == n, "H_f / c_f dimensions");
  require(H_g.cols() == m && c_g.size() == m, "H_g / c_g dimensions");
  require(A.cols() == n && B.rows() == p && B.cols() == m && b.size() == p, "A / B / b dimensions");
  require(linalg::is_pd(H_f), "H_f must be positive definite");
  require(linalg::is_psd(H_g), "H_g must be positive semidefinite");
}

namespace {
Mat or_zero(const Mat& M, Eigen::Index n) { return M.size() == 0 ? Mat::Zero(n, n) : M; }
}  // namespace

ExactAdmm::ExactAdmm(const QuadraticInstance& inst, const ExactAdmmConfig& cfg)
    : inst_(inst), rho_(cfg.rho), gamma_(cfg.gamma) {
  inst.validate();
  require(rho_ > 0.0 && gamma_ > 0.0, "rho and gamma must be positive");
  P_ = or_zero(cfg.P, inst.H_f.rows());
  Q_ = or_zero(cfg.Q, inst.H_g.rows());
  require(linalg::is_psd(P_) && linalg::is_psd(Q_), "P and Q must be positive semidefinite");
  y_solver_.compute(inst.H_g + rho_ * inst.B.transpose() * inst.B + Q_);
  if (y_solver_.info() != Eigen::Success) throw NumericalError("y-subproblem matrix is singular");
  x_solver_.compute(inst.H_f + rho_ * inst.A.transpose() * inst.A + P_);
  if (x_solver_.info() != Eigen::Success) throw NumericalError("x-subproblem matrix is singular");
}

Iterate ExactAdmm::step(const Iterate& u) const {
  const auto& I = inst_;
  Iterate next;
  next.y = y_solver_.solve(I.B.transpose() * u.lambda - I.c_g -
                           rho_ * I.B.transpose() * (I.A * u.x - I.b) + Q_ * u.y);
  next.x = x_solver_.solve(I.A.transpose() * u.lambda - I.c_f -
                           rho_ * I.A.transpose() * (I.B * next.y - I.b) + P_ * u.x);
  next.lambda = u.lambda - gamma_ * rho_ * (I.A * next.x + I.B * next.y - I.b);
  return next;
}

GMetric ExactAdmm::metric() const {
  return GMetric(P_ + rho_ * inst_.A.transpose() * inst_.A, Q_, rho_ * gamma_);
}

Iterate exact_admm_step(const QuadraticInstance& inst, const ExactAdmmConfig& cfg,
                        const Iterate& u_k) {
  return ExactAdmm(inst, cfg).step(u_k);
}

KKTPoint solve_kkt(const QuadraticInstance& inst) {
  inst.validate();
  const auto n = inst.H_f.rows(), m = inst.H_g.rows(), p = inst.A.rows();
  Mat K = Mat::Zero(n + m + p, n + m + p);
  K.block(0, 0, n, n) = inst.H_f;
  K.block(0, n + m, n, p) = -inst.A.transpose();
  K.block(n, n, m, m) = inst.H_g;
  K.block(n, n + m, m, p) = -inst.B.transpose();
  K.block(n + m, 0, p, n) = inst.A;
  K.block(n + m, n, p, m) = inst.B;
  Vec rhs(n + m + p);
  rhs << -inst.c_f, -inst.c_g, inst.b;
  Eigen::FullPivLU<Mat> lu(K);
  if (!lu.isInvertible()) throw NumericalError("KKT system is singular");
  const Vec z = lu.solve(rhs);
  return {z.head(n), z.segment(n, m), z.tail(p)};
}

void validate_step_condition(const QuadraticInstance& inst, const ExactAdmmConfig& cfg) {
  const Mat P = or_zero(cfg.P, inst.H_f.rows());
  if (linalg::is_zero(P)) {
    if (cfg.gamma != 1.0) throw ConfigError("step condition violated: P = 0 requires gamma = 1");
    return;
  }
  const Mat S = (2.0 - cfg.gamma) * P - (cfg.gamma - 1.0) * cfg.rho * inst.A.transpose() * inst.A;
  if (!linalg::is_pd(S))
    throw ConfigError("step condition violated: (2-gamma)P - (gamma-1) rho A'A is not positive definite");
}

ContractionReport contraction_check(const QuadraticInstance& inst, const ExactAdmmConfig& cfg,
                                    double delta, const Iterate& u0, long num_iters,
                                    double floor) {
  require(delta > 0.0, "delta must be positive");
  require(num_iters >= 0, "num_iters must be nonnegative");
  validate_step_condition(inst, cfg);
  const ExactAdmm admm(inst, cfg);
  const GMetric G = admm.metric();
  const Iterate u_star = as_iterate(solve_kkt(inst));

  ContractionReport rep;
  rep.bound = 1.0 / (1.0 + delta);
  Iterate u = u0;
  double e = g_dist_sq(G, u, u_star);
  rep.errors.push_back(e);
  bool any_checked = false;
  for (long k = 0; k < num_iters; ++k) {
    u = admm.step(u);
    const double e_next = g_dist_sq(G, u, u_star);
    rep.errors.push_back(e_next);
    if (e > floor) {
      const double r = e_next / e;
      rep.ratios.push_back(r);
      any_checked = true;
      if (!(r <= rep.bound + 1e-10)) rep.passed = false;
    } else {
      rep.ratios.push_back(std::nan(""));
    }
    e = e_next;
  }
  rep.vacuous = !any_checked;
  return rep;
}

namespace {

Mat random_orthogonal(Eigen::Index n, Stream& s) {
  Mat G(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = s.normal();
  Eigen::HouseholderQR<Mat> qr(G);
  return qr.householderQ() * Mat::Identity(n, n);
}

Vec log_uniform(Eigen::Index n, double lo, double hi, Stream& s) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::exp(s.uniform(std::log(lo), std::log(hi)));
  return v;
}

Mat random_spd(Eigen::Index n, double lo, double hi, Stream& s) {
  const Mat U = random_orthogonal(n, s);
  Mat H = U * log_uniform(n, lo, hi, s).asDiagonal() * U.transpose();
  return 0.5 * (H + H.transpose());
}

Mat random_with_singular_values(Eigen::Index rows, Eigen::Index cols, double lo, double hi,
                                Stream& s) {
  const Eigen::Index r = std::min(rows, cols);
  const Mat U = random_orthogonal(rows, s);
  const Mat V = random_orthogonal(cols, s);
  Mat S = Mat::Zero(rows, cols);
  S.topLeftCorner(r, r) = log_uniform(r, lo, hi, s).asDiagonal();
  return U * S * V.transpose();
}

Vec gaussian(Eigen::Index n, Stream& s) {
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = s.normal();
  return v;
}

}  // namespace

QuadraticInstance random_quadratic_instance(const RandomQuadraticOptions& o, Stream& s) {
  require(o.n > 0 && o.m > 0 && o.p > 0, "dimensions must be positive");
  require(o.p <= o.n + o.m, "p must not exceed n + m");
  QuadraticInstance q;
  q.H_f = random_spd(o.n, o.eig_lo, o.eig_hi, s);
  q.c_f = gaussian(o.n, s);
  q.H_g = o.g_strongly_convex ? random_spd(o.m, o.eig_lo, o.eig_hi, s) : Mat::Zero(o.m, o.m);
  q.c_g = gaussian(o.m, s);
  if (o.identity_A) {
    require(o.p == o.n, "identity A needs p = n");
    q.A = Mat::Identity(o.p, o.n);
  } else {
    q.A = random_with_singular_values(o.p, o.n, o.sv_lo, o.sv_hi, s);
  }
  q.B = random_with_singular_values(o.p, o.m, o.sv_lo, o.sv_hi, s);
  q.b = gaussian(o.p, s);
  return q;
}

QuadraticModuli quadratic_moduli(const QuadraticInstance& inst) {
  const auto ef = linalg::sym_eig_extremes(inst.H_f);
  const auto eg = linalg::sym_eig_extremes(inst.H_g);
  return {ef.min, ef.max, std::max(0.0, eg.min), eg.max};
}

StochasticProblem quadratic_as_problem(const QuadraticInstance& inst, double noise_sd) {
  inst.validate();
  require(noise_sd >= 0.0, "noise_sd must be nonnegative");
  const auto mod = quadratic_moduli(inst);
  const Mat Hf = inst.H_f, Hg = inst.H_g;
  const Vec cf = inst.c_f, cg = inst.c_g;

  ProblemParts parts;
  parts.A = inst.A;
  parts.B = inst.B;
  parts.b = inst.b;
  parts.oracle_f = [Hf, cf, noise_sd](const Vec& x, Stream& s, Vec& out) {
    out.noalias() = Hf * x;
    out += cf;
    if (noise_sd > 0.0)
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += noise_sd * s.normal();
    s.count_sample();
  };
  parts.oracle_g = GradientOracle([Hg, cg, noise_sd](const Vec& y, Stream& s, Vec& out) {
    out.noalias() = Hg * y;
    out += cg;
    if (noise_sd > 0.0)
      for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += noise_sd * s.normal();
    s.count_sample();
  });
  parts.exact_grad_f = ExactGradient([Hf, cf](const Vec& x) -> Vec { return Hf * x + cf; });
  parts.exact_grad_g = ExactGradient([Hg, cg](const Vec& y) -> Vec { return Hg * y + cg; });
  parts.constants.mu_f = mod.mu_f;
  parts.constants.L_f = mod.L_f;
  parts.constants.sigma_g = mod.sigma_g;
  parts.constants.L_g = std::max(mod.L_g, mod.sigma_g);
  const double var = noise_sd * noise_sd;
  parts.constants.v2_x = var * static_cast<double>(inst.H_f.rows());
  parts.constants.v2_y = var * static_cast<double>(inst.H_g.rows());
  parts.known_kkt = solve_kkt(inst);
  return StochasticProblem(std::move(parts));
}

}  // namespace siadmm
