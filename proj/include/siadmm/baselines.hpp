#pragma once

#include <optional>

#include "siadmm/linalg.hpp"

namespace siadmm {

Vec soft_threshold(const Vec& v, double alpha);

// Current ADMM iterate plus running averages for SADM0 / SADM1.
struct AveragedIterate {
  Vec x;
  Vec y;
  Vec lambda;
  Vec x_sum;  // weighted sums; averages are sum / weight
  Vec y_sum;
  double x_weight = 0.0;
  double y_weight = 0.0;
  long k = 0;  // number of completed steps

  static AveragedIterate start(const Vec& x0, const Vec& y0, const Vec& lambda0);
  Vec x_avg() const { return x_sum / x_weight; }
  Vec y_avg() const;
};

enum class Sadm0Penalty {
  sqrt_schedule,  // eta_k = scale * sqrt(k)
  linear,         // eta_k = scale * k
};

struct Sadm0Params {
  double rho = 1.0;
  double gamma_bar = 0.1;
  Sadm0Penalty mode = Sadm0Penalty::sqrt_schedule;
  double scale = 1000.0;

  // Penalty at step index k (0-based); the schedule is evaluated at k + 1 so eta > 0.
  double eta(long k) const;
};

// One SADM0 step on the LASSO split x - y = 0 with sample (l, s). Uniform averages:
// x_avg over x_0..x_{k+1}, y_avg over y_1..y_{k+1}.
void sadm0_step(AveragedIterate& st, const Vec& l, double s, const Sadm0Params& p);

struct Sadm1Params {
  double rho = 1.0;
  double gamma_bar = 0.1;
  double mu_f = 1.0;
};

// One SADM1 step. Weighted averages: x_avg with weights (j+1) over j = 0..k+1,
// y_avg with weights j over j = 1..k+1.
void sadm1_step(AveragedIterate& st, const Vec& l, double s, const Sadm1Params& p);

// Least-squares projection onto {(x, y): y = Ax}: x = (I + A'A)^{-1}(x~ + A'y~), y = Ax.
class DsaProjector {
 public:
  explicit DsaProjector(const Mat& A);
  void project(const Vec& xt, const Vec& yt, Vec& x, Vec& y) const;
  const Mat& A() const { return A_; }

 private:
  Mat A_;
  Eigen::LLT<Mat> llt_;
};

struct DsaState {
  Vec x;
  Vec y;
  long k = 1;  // next step index, starts at 1
};

struct DsaParams {
  double mu_f = 1.0;
  double sigma_g = 1.0;
  std::optional<double> Gamma;  // absent: no ball projection
  double z_star_norm_sq = 0.0;
};

// Radial projection of (x; y) onto {|z|^2 <= radius_sq}.
void project_ball(Vec& x, Vec& y, double radius_sq);

void dsa_step(DsaState& st, const Vec& lx, double sx, const Vec& ly, double sy,
              const DsaParams& p, const DsaProjector& proj);

// argmin (x - x_true)'Sigma(x - x_true) + gamma_bar |x|_1 by proximal gradient.
Vec prox_grad_reference(const Mat& Sigma, const Vec& x_true, double gamma_bar,
                        double tol = 1e-10, long max_iters = 10'000'000);

}  // namespace siadmm
