#include "siadmm/si_admm.hpp"

#include <chrono>
#include <cmath>

#include "siadmm/bounds.hpp"
#include "siadmm/error.hpp"

namespace siadmm {

AugmentedLagrangianParams AlgorithmConfig::al_params(const StochasticProblem& prob) const {
  AugmentedLagrangianParams p;
  p.rho = rho;
  p.P = P.size() == 0 ? Mat::Zero(prob.dim_x(), prob.dim_x()) : P;
  p.Q = Q.size() == 0 ? Mat::Zero(prob.dim_y(), prob.dim_y()) : Q;
  return p;
}

DerivedConstants derive_constants(const StochasticProblem& prob, const AlgorithmConfig& cfg) {
  const auto params = cfg.al_params(prob);
  validate_params(prob, params);
  require(cfg.gamma > 0.0, "gamma must be positive");
  require(cfg.T > 0.0, "T must be positive");
  require(cfg.R > 0.0, "R must be positive");
  require(cfg.max_outer >= 0, "max_outer must be nonnegative");
  const auto& pc = prob.constants();

  const Mat Hx = params.rho * prob.A().transpose() * prob.A() + params.P;
  const auto ex = linalg::sym_eig_extremes(Hx);
  if (!(ex.min > 0.0) && !(pc.mu_f > 0.0)) throw ConfigError("x-subproblem is not strongly convex");
  require(linalg::is_pd(Hx), "P_hat = P + rho A'A must be positive definite");

  DerivedConstants d;
  d.x.c = pc.mu_f + ex.min;
  d.x.L = pc.L_f + ex.max;
  d.x.gamma = cfg.gamma_x.value_or(1.0 / d.x.c);
  d.x.rate = compute_rate_constants(d.x.c, d.x.L, pc.v1_x, pc.v2_x, cfg.R, d.x.gamma);

  if (prob.g_is_stochastic()) {
    if (!(pc.sigma_g > 0.0))
      throw ConfigError("sigma_g = 0 with a stochastic g-oracle: g must be strongly convex");
    const Mat Hy = params.rho * prob.B().transpose() * prob.B() + params.Q;
    const auto ey = linalg::sym_eig_extremes(Hy);
    SubproblemConstants y;
    y.c = pc.sigma_g + ey.min;
    y.L = pc.L_g + ey.max;
    y.gamma = cfg.gamma_y.value_or(1.0 / y.c);
    y.rate = compute_rate_constants(y.c, y.L, pc.v1_y, pc.v2_y, cfg.R, y.gamma);
    d.y = y;
  }

  d.delta = cfg.delta ? *cfg.delta : delta_for(prob, cfg);
  require(d.delta > 0.0, "delta must be positive");
  d.eta = cfg.eta.value_or((1.0 + d.delta / 2.0) / (1.0 + d.delta));
  require(d.eta > 0.0 && d.eta < 1.0, "eta must lie in (0, 1)");
  const double boundary = 1.0 / (1.0 + d.delta);
  if (std::abs(d.eta - boundary) <= 1e-12 * boundary)
    d.warnings.push_back("eta = 1/(1+delta) is on the boundary of the complexity theorem");
  else if (d.eta < boundary)
    d.warnings.push_back("eta < 1/(1+delta): the complexity bound does not apply");
  return d;
}

long sample_schedule(long K, double T, double eta, long k) {
  require(K >= 1 && T > 0.0 && eta > 0.0 && eta < 1.0 && k >= 0, "invalid schedule arguments");
  const double v = std::ceil(T / std::pow(eta, static_cast<double>(k)));
  if (!(v <= kScheduleCap))
    throw NumericalError("sample schedule overflow at outer index k = " + std::to_string(k));
  return std::max(K, static_cast<long>(v));
}

double schedule_inverse_sum_bound(double T, double eta) {
  require(T > 0.0 && eta > 0.0 && eta < 1.0, "invalid schedule arguments");
  return 1.0 / (T * (1.0 - eta));
}

SiAdmmStepper::Affine SiAdmmStepper::make_affine(Mat H) {
  Affine a;
  a.diagonal = linalg::is_diagonal(H);
  if (a.diagonal) a.diag = H.diagonal();
  a.H = std::move(H);
  return a;
}

SiAdmmStepper::SiAdmmStepper(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                             const DerivedConstants& consts)
    : prob_(prob), params_(cfg.al_params(prob)), gamma_(cfg.gamma) {
  validate_params(prob, params_);
  gamma_x_ = consts.x.gamma;
  gamma_y_ = consts.y ? consts.y->gamma : 0.0;
  hx_ = make_affine(params_.rho * prob.A().transpose() * prob.A() + params_.P);
  if (prob.g_is_stochastic())
    hy_ = make_affine(params_.rho * prob.B().transpose() * prob.B() + params_.Q);
}

namespace {

// grad(v) = oracle(v) + H v + c
template <class AffineT>
void run_inner(const GradientOracle& oracle, const AffineT& aff, const Vec& c, Vec& v, double gamma0,
               long steps, Stream& stream) {
  Vec scratch(v.size());
  if (aff.diagonal) {
    sa_iterate(
        [&](const Vec& p, Vec& out) {
          oracle(p, stream, out);
          out.array() += aff.diag.array() * p.array() + c.array();
        },
        v, scratch, gamma0, steps);
  } else {
    sa_iterate(
        [&](const Vec& p, Vec& out) {
          oracle(p, stream, out);
          out.noalias() += aff.H * p;
          out += c;
        },
        v, scratch, gamma0, steps);
  }
}

}  // namespace

Vec SiAdmmStepper::x_update(const Iterate& u_k, const Vec& y_next, long T_x,
                            Stream& stream) const {
  const Mat& A = prob_.A();
  const Vec c = -A.transpose() * u_k.lambda +
                params_.rho * A.transpose() * (prob_.B() * y_next - prob_.b()) -
                params_.P * u_k.x;
  Vec x = u_k.x;
  run_inner(prob_.oracle_f(), hx_, c, x, gamma_x_, T_x, stream);
  return x;
}

Iterate SiAdmmStepper::step(const Iterate& u_k, long T_y, long T_x, SampleStreams& streams) const {
  prob_.check_iterate(u_k);
  require(T_y >= 1 && T_x >= 1, "inner batch sizes must be at least 1");
  const Mat& B = prob_.B();
  const Vec cy = -B.transpose() * u_k.lambda +
                 params_.rho * B.transpose() * (prob_.A() * u_k.x - prob_.b()) -
                 params_.Q * u_k.y;
  Iterate next;
  next.y = u_k.y;
  run_inner(prob_.oracle_g_grad(), hy_, cy, next.y, gamma_y_, T_y, streams.y);
  next.x = x_update(u_k, next.y, T_x, streams.x);
  next.lambda = u_k.lambda - gamma_ * params_.rho *
                                 (prob_.A() * next.x + prob_.B() * next.y - prob_.b());
  return next;
}

Iterate SiAdmmStepper::step_exact_y(const Iterate& u_k, long T_x, SampleStreams& streams) const {
  prob_.check_iterate(u_k);
  require(T_x >= 1, "inner batch size must be at least 1");
  const auto& prox = prob_.oracle_g_prox();
  Iterate next;
  next.y = prox.update(prob_, params_, u_k.x, u_k.y, u_k.lambda);
  if (next.y.size() != prob_.dim_y()) throw ConfigError("prox update returned wrong dimension");
  next.x = x_update(u_k, next.y, T_x, streams.x);
  next.lambda = u_k.lambda - gamma_ * params_.rho *
                                 (prob_.A() * next.x + prob_.B() * next.y - prob_.b());
  return next;
}

Iterate si_admm_step(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                     const DerivedConstants& consts, const Iterate& u_k, long T_y, long T_x,
                     SampleStreams& streams) {
  return SiAdmmStepper(prob, cfg, consts).step(u_k, T_y, T_x, streams);
}

Iterate si_admm_step_exact_y(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                             const DerivedConstants& consts, const Iterate& u_k, long T_x,
                             SampleStreams& streams) {
  return SiAdmmStepper(prob, cfg, consts).step_exact_y(u_k, T_x, streams);
}

RunRecord solve(const StochasticProblem& prob, const AlgorithmConfig& cfg, const Iterate& u0,
                SampleStreams& streams, const SolveOptions& opts) {
  prob.check_iterate(u0);
  const DerivedConstants consts = derive_constants(prob, cfg);
  const SiAdmmStepper stepper(prob, cfg, consts);
  const bool stochastic_y = prob.g_is_stochastic();

  std::optional<GMetric> metric;
  std::optional<Iterate> u_star;
  if (prob.known_kkt()) {
    metric = GMetric::for_problem(prob, cfg.al_params(prob), cfg.gamma);
    u_star = as_iterate(*prob.known_kkt());
  }

  RunRecord rec;
  rec.algorithm = opts.algorithm;
  rec.seed = opts.seed;
  rec.config_hash = opts.config_hash;

  const auto t0 = std::chrono::steady_clock::now();
  auto push_row = [&](long k, const Iterate& u, std::uint64_t sx, std::uint64_t sy) {
    RunRow row;
    row.k = k;
    row.samples_x = sx;
    row.samples_y = sy;
    if (opts.record_wall_time)
      row.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (u_star) {
      row.err_u_G = g_dist_sq(*metric, u, *u_star);
      row.err_x = (u.x - u_star->x).squaredNorm();
      row.err_y = (u.y - u_star->y).squaredNorm();
    }
    if (opts.store_iterates) row.u = u;
    rec.rows.push_back(std::move(row));
  };

  Iterate u = u0;
  std::uint64_t sx = 0, sy = 0;
  push_row(0, u, 0, 0);
  for (long k = 0; k < cfg.max_outer; ++k) {
    const long Tx = sample_schedule(consts.x.K(), cfg.T, consts.eta, k);
    const long Ty = stochastic_y ? sample_schedule(consts.y->K(), cfg.T, consts.eta, k) : 1;
    const auto need = static_cast<std::uint64_t>((Tx - 1) + (Ty - 1));
    if (k == 0 && cfg.sample_budget && *cfg.sample_budget < need)
      throw ConfigError("sample budget is smaller than one outer iteration (" +
                        std::to_string(need) + " samples)");
    u = stochastic_y ? stepper.step(u, Ty, Tx, streams) : stepper.step_exact_y(u, Tx, streams);
    sx += static_cast<std::uint64_t>(Tx - 1);
    sy += static_cast<std::uint64_t>(Ty - 1);
    push_row(k + 1, u, sx, sy);
    if (cfg.sample_budget && sx + sy >= *cfg.sample_budget) break;
    if (opts.stop_when && opts.stop_when(rec.rows.back())) break;
  }
  rec.final_iterate = u;
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace siadmm
