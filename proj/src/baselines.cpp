#include "siadmm/baselines.hpp"

#include <cmath>
#include <string>

#include "siadmm/error.hpp"

namespace siadmm {

Vec soft_threshold(const Vec& v, double alpha) {
  require(alpha >= 0.0, "soft-threshold level must be nonnegative");
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i)) - alpha;
    out(i) = a > 0.0 ? std::copysign(a, v(i)) : 0.0;
  }
  return out;
}

AveragedIterate AveragedIterate::start(const Vec& x0, const Vec& y0, const Vec& lambda0) {
  AveragedIterate st;
  st.x = x0;
  st.y = y0;
  st.lambda = lambda0;
  st.x_sum = x0;
  st.x_weight = 1.0;
  st.y_sum = Vec::Zero(y0.size());
  st.y_weight = 0.0;
  return st;
}

Vec AveragedIterate::y_avg() const { return y_weight > 0.0 ? Vec(y_sum / y_weight) : y; }

double Sadm0Params::eta(long k) const {
  const double kk = static_cast<double>(k + 1);
  return mode == Sadm0Penalty::sqrt_schedule ? scale * std::sqrt(kk) : scale * kk;
}

namespace {

// Shared x/y/lambda update of SADM0 and SADM1 with proximal weight w.
inline void admm_sample_step(AveragedIterate& st, const Vec& l, double s, double rho,
                             double gamma_bar, double w) {
  const double r = 2.0 * (l.dot(st.x) - s);
  const double inv = 1.0 / (rho + w);
  const double thr = gamma_bar / rho;
  const auto n = st.x.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = (-r * l(i) + st.lambda(i) + rho * st.y(i) + w * st.x(i)) * inv;
    const double v = xi - st.lambda(i) / rho;
    const double a = std::abs(v) - thr;
    const double yi = a > 0.0 ? std::copysign(a, v) : 0.0;
    st.lambda(i) -= rho * (xi - yi);
    st.x(i) = xi;
    st.y(i) = yi;
  }
}

}  // namespace

void sadm0_step(AveragedIterate& st, const Vec& l, double s, const Sadm0Params& p) {
  admm_sample_step(st, l, s, p.rho, p.gamma_bar, p.eta(st.k));
  st.x_sum += st.x;
  st.x_weight += 1.0;
  st.y_sum += st.y;
  st.y_weight += 1.0;
  ++st.k;
}

void sadm1_step(AveragedIterate& st, const Vec& l, double s, const Sadm1Params& p) {
  const double kk = static_cast<double>(st.k);
  admm_sample_step(st, l, s, p.rho, p.gamma_bar, 0.5 * (kk + 2.0) * p.mu_f);
  // new iterates carry index k+1: x weight (k+1)+1, y weight k+1
  st.x_sum += (kk + 2.0) * st.x;
  st.x_weight += kk + 2.0;
  st.y_sum += (kk + 1.0) * st.y;
  st.y_weight += kk + 1.0;
  ++st.k;
}

DsaProjector::DsaProjector(const Mat& A) : A_(A) {
  llt_.compute(Mat::Identity(A.cols(), A.cols()) + A.transpose() * A);
  if (llt_.info() != Eigen::Success) throw NumericalError("I + A'A factorization failed");
}

void DsaProjector::project(const Vec& xt, const Vec& yt, Vec& x, Vec& y) const {
  x = llt_.solve(xt + A_.transpose() * yt);
  y.noalias() = A_ * x;
}

void project_ball(Vec& x, Vec& y, double radius_sq) {
  const double nsq = x.squaredNorm() + y.squaredNorm();
  if (nsq > radius_sq) {
    const double scale = std::sqrt(radius_sq / nsq);
    x *= scale;
    y *= scale;
  }
}

void dsa_step(DsaState& st, const Vec& lx, double sx, const Vec& ly, double sy,
              const DsaParams& p, const DsaProjector& proj) {
  require(st.k >= 1, "DSA step index starts at 1");
  const double kk = static_cast<double>(st.k);
  const Vec xt = st.x - (2.0 * (lx.dot(st.x) - sx) / (p.mu_f * kk)) * lx;
  const Vec yt = st.y - (2.0 * (ly.dot(st.y) - sy) / (p.sigma_g * kk)) * ly;
  proj.project(xt, yt, st.x, st.y);
  if (!std::isfinite(st.x.squaredNorm() + st.y.squaredNorm()))
    throw NumericalError("DSA iterate became non-finite at step " + std::to_string(st.k));
  if (p.Gamma) {
    require(*p.Gamma > 0.0, "DSA ball parameter Gamma must be positive");
    project_ball(st.x, st.y, *p.Gamma * p.z_star_norm_sq);
  }
  ++st.k;
}

Vec prox_grad_reference(const Mat& Sigma, const Vec& x_true, double gamma_bar, double tol,
                        long max_iters) {
  require(linalg::is_psd(Sigma), "Sigma must be positive semidefinite");
  require(gamma_bar >= 0.0 && tol > 0.0, "prox reference needs gamma_bar >= 0 and tol > 0");
  const double lmax = linalg::lambda_max(Sigma);
  if (!(lmax > 0.0)) return soft_threshold(Vec::Zero(x_true.size()), 0.0);
  const double t = 1.0 / (2.0 * lmax);
  Vec x = x_true;
  double res = 0.0;
  for (long it = 0; it < max_iters; ++it) {
    Vec next = soft_threshold(x - t * 2.0 * (Sigma * (x - x_true)), gamma_bar * t);
    res = (next - x).lpNorm<Eigen::Infinity>();
    x.swap(next);
    if (res <= tol) return x;
  }
  throw NumericalError("prox_grad_reference did not converge; residual " + std::to_string(res));
}

}  // namespace siadmm
