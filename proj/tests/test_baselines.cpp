#include <cmath>

#include "doctest.h"
#include "siadmm/baseline_runners.hpp"
#include "siadmm/baselines.hpp"
#include "siadmm/error.hpp"
#include "siadmm/synthetic.hpp"

using namespace siadmm;

namespace {
Vec gaussian(long n, Stream& s, double scale = 1.0) {
  Vec v(n);
  for (long i = 0; i < n; ++i) v(i) = scale * s.normal();
  return v;
}
}  // namespace

TEST_CASE("soft threshold values") {
  const Vec v = (Vec(3) << 0.5, -0.05, -0.3).finished();
  CHECK(soft_threshold(v, 0.0) == v);
  const Vec s = soft_threshold(v, 0.1);
  CHECK(s(0) == doctest::Approx(0.4));
  CHECK(s(1) == 0.0);
  CHECK(s(2) == doctest::Approx(-0.2));
  CHECK_THROWS_AS(soft_threshold(v, -1.0), ConfigError);
}

TEST_CASE("soft threshold is the l1 prox: v - p in alpha d|p|") {
  Stream s(1);
  long failures = 0;
  for (int t = 0; t < 10000; ++t) {
    const Vec v = gaussian(4, s, 3.0);
    const double a = std::exp(s.normal());
    const Vec p = soft_threshold(v, a);
    const Vec g = (v - p) / a;
    for (int i = 0; i < 4; ++i) {
      const bool ok = p(i) == 0.0 ? std::abs(g(i)) <= 1.0 + 1e-12
                                  : std::abs(g(i) - (p(i) > 0 ? 1.0 : -1.0)) <= 1e-12;
      if (!ok) ++failures;
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("SADM0 leaves a consistent noiseless point in place") {
  Stream s(2);
  const Vec x = gaussian(5, s);
  auto st = AveragedIterate::start(x, x, Vec::Zero(5));
  st.y = x;
  Sadm0Params p;
  p.gamma_bar = 0.0;
  const Vec l = gaussian(5, s);
  sadm0_step(st, l, l.dot(x), p);
  CHECK((st.x - x).norm() < 1e-12);
  CHECK((st.y - x).norm() < 1e-12);
  CHECK(st.lambda.norm() < 1e-12);
  CHECK(st.k == 1);
}

TEST_CASE("SADM0 and SADM1 are deterministic given the stream") {
  Stream gen(3);
  const auto inst = gen_lasso(LassoParams{}, gen);
  BaselineRunOptions o;
  o.steps = 500;
  o.record_stride = 50;
  Stream a(9), b(9);
  const auto r1 = run_sadm0(inst.sampler(), inst.x_star, Sadm0Params{}, Report::last_iterate, o, a);
  const auto r2 = run_sadm0(inst.sampler(), inst.x_star, Sadm0Params{}, Report::last_iterate, o, b);
  REQUIRE(r1.rows.size() == r2.rows.size());
  for (std::size_t i = 0; i < r1.rows.size(); ++i) CHECK(*r1.rows[i].err_x == *r2.rows[i].err_x);
  CHECK(r1.rows.back().samples_x == 500);
  CHECK(a.samples() == 500);
  Stream c(9), d(9);
  const auto q1 = run_sadm1(inst.sampler(), inst.x_star, Sadm1Params{}, o, c);
  const auto q2 = run_sadm1(inst.sampler(), inst.x_star, Sadm1Params{}, o, d);
  CHECK((q1.final_iterate.x - q2.final_iterate.x).norm() == 0.0);
  CHECK(q1.rows.size() == 11);
}

TEST_CASE("SADM1 averaging weights") {
  Stream s(4);
  const Vec x0 = gaussian(3, s);
  auto st = AveragedIterate::start(x0, Vec::Zero(3), Vec::Zero(3));
  Sadm1Params p;
  sadm1_step(st, gaussian(3, s), s.normal(), p);
  CHECK((st.x_avg() - (x0 + 2.0 * st.x) / 3.0).norm() < 1e-12);
  CHECK((st.y_avg() - st.y).norm() < 1e-12);

  for (long k = 1; k < 10000; ++k) {
    sadm1_step(st, gaussian(3, s), s.normal(), p);
    const double K = static_cast<double>(st.k);
    if (st.k % 997 == 0 || st.k == 10000) {
      CHECK(st.x_weight == (K + 1.0) * (K + 2.0) / 2.0);
      CHECK(st.y_weight == K * (K + 1.0) / 2.0);
    }
  }
}

TEST_CASE("weighted averages of a constant sequence are the constant") {
  const Vec c = Vec::Constant(2, 1.5);
  auto st = AveragedIterate::start(c, c, Vec::Zero(2));
  // l = 0 gives zero gradient; with gamma_bar = 0 and lambda = 0 nothing moves
  Sadm1Params p;
  p.gamma_bar = 0.0;
  for (int k = 0; k < 50; ++k) sadm1_step(st, Vec::Zero(2), 0.0, p);
  CHECK((st.x_avg() - c).norm() < 1e-12);
  CHECK((st.y_avg() - c).norm() < 1e-12);
}

TEST_CASE("DSA projection lands on y = Ax and solves the normal equations") {
  Stream s(5);
  for (int t = 0; t < 1000; ++t) {
    const long n = 1 + t % 7, m = 1 + (t / 7) % 5;
    Mat A(m, n);
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < n; ++j) A(i, j) = s.normal();
    const DsaProjector proj(A);
    const Vec xt = gaussian(n, s, 5.0), yt = gaussian(m, s, 5.0);
    Vec x, y;
    proj.project(xt, yt, x, y);
    CHECK((y - A * x).norm() <= 1e-12 * (1.0 + y.norm()));
    // stacked least squares [I; A] x ~ [xt; yt] through QR
    Mat S(n + m, n);
    S << Mat::Identity(n, n), A;
    Vec r(n + m);
    r << xt, yt;
    const Vec ref = S.colPivHouseholderQr().solve(r);
    CHECK((x - ref).norm() <= 1e-9 * (1.0 + ref.norm()));
  }
}

TEST_CASE("ball projection") {
  Vec x = (Vec(2) << 0.1, 0.2).finished(), y = Vec::Constant(1, 0.1);
  const Vec x0 = x, y0 = y;
  project_ball(x, y, 1.0);
  CHECK(x == x0);
  CHECK(y == y0);
  Vec a = (Vec(1) << 3.0).finished(), b = (Vec(1) << 4.0).finished();
  project_ball(a, b, 1.0);
  CHECK(a(0) == doctest::Approx(0.6));
  CHECK(b(0) == doctest::Approx(0.8));
}

TEST_CASE("DSA run accounting and divergence marking") {
  Stream gen(6);
  DistRegParams dp;
  dp.n = 4;
  const auto inst = gen_distreg(dp, gen);
  const DsaProjector proj(inst.A);
  BaselineRunOptions o;
  o.steps = 300;
  o.record_stride = 7;
  Stream sx(1), sy(2);
  DsaParams p{1.0, 1.0, 500.0, inst.z_star().squaredNorm()};
  const auto rec = run_dsa(inst.sampler_x(), inst.sampler_y(), inst.beta1, inst.beta2, p, proj, o,
                           sx, sy);
  CHECK(rec.rows.back().k == 300);
  CHECK(rec.rows.back().samples_x == 300);
  CHECK(rec.rows.back().samples_y == 300);
  CHECK(sx.samples() == 300);
  CHECK(std::isfinite(*rec.rows.back().err_x));
  CHECK(rec.final_iterate.x.squaredNorm() + rec.final_iterate.y.squaredNorm() <=
        500.0 * inst.z_star().squaredNorm() * (1 + 1e-12));

  // tiny moduli blow the unprojected iterates up
  Stream ux(1), uy(2);
  DsaParams bad{1e-12, 1e-12, std::nullopt, 0.0};
  const auto div = run_dsa(inst.sampler_x(), inst.sampler_y(), inst.beta1, inst.beta2, bad, proj,
                           o, ux, uy);
  CHECK(std::isinf(*div.rows.back().err_x));
  CHECK(div.rows.back().samples_x == 300);
}

TEST_CASE("proximal-gradient reference") {
  const Mat S = Mat::Identity(3, 3);
  const Vec xt = (Vec(3) << 1.0, -2.0, 0.5).finished();
  CHECK((prox_grad_reference(S, xt, 0.0) - xt).norm() < 1e-9);
  const Vec one = prox_grad_reference(Mat::Constant(1, 1, 1.0), Vec::Constant(1, 3.0), 2.0);
  CHECK(one(0) == doctest::Approx(2.0).epsilon(1e-9));
  Stream gen(7);
  for (int t = 0; t < 10; ++t) {
    const auto inst = gen_lasso(LassoParams{}, gen);
    CHECK(lasso_optimality_residual(inst.Sigma, inst.x_true, 0.1, inst.x_star) <= 1e-8);
  }
}
