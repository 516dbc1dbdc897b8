// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "siadmm/baselines.hpp"
#include "siadmm/bounds.hpp"
#include "siadmm/error.hpp"
#include "siadmm/exact_admm.hpp"
#include "siadmm/harness.hpp"
#include "siadmm/moments.hpp"
#include "siadmm/synthetic.hpp"

using namespace siadmm;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* name, double limit_s, const std::function<Outcome()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s <= limit_s;
  const bool ok = o.ok && in_time;
  if (!ok) ++failures;
  std::printf("%s %s %s: %s; %.2f s (limit %.0f s)%s\n", ok ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), s, limit_s, in_time ? "" : " [over time]");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

Vec gaussian(long n, Stream& s, double scale = 1.0) {
  Vec v(n);
  for (long i = 0; i < n; ++i) v(i) = scale * s.normal();
  return v;
}

// contraction gaps from singular values, independent of the library formulas
double sv_delta(double mu, double L, double rho, const Mat& A) {
  const auto sv = Eigen::JacobiSVD<Mat>(A).singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  return 2.0 / (rho * smax * smax / mu + L / (rho * smin * smin));
}

Outcome contraction(bool with_q) {
  Stream gen(derive_seed(1, "acceptance", with_q ? "contraction-q" : "contraction", 0, "gen"));
  long steps = 0, bad = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    RandomQuadraticOptions o;
    o.n = o.m = o.p = 2 + static_cast<long>(gen.next_u64() % 19);
    o.identity_A = i % 2 == 0;
    o.g_strongly_convex = with_q || i % 4 < 2;
    const auto q = random_quadratic_instance(o, gen);
    const auto ef = Eigen::JacobiSVD<Mat>(q.H_f).singularValues();
    const double mu = ef(ef.size() - 1), L = ef(0);
    ExactAdmmConfig cfg;
    cfg.rho = std::exp(gen.uniform(std::log(0.1), std::log(100.0)));
    double delta = sv_delta(mu, L, cfg.rho, q.A);
    if (with_q) {
      const long n = o.m;
      Mat M = Mat(n, n);
      for (long a = 0; a < n; ++a)
        for (long b = 0; b < n; ++b) M(a, b) = gen.normal();
      cfg.Q = M * M.transpose() / static_cast<double>(n) + 0.1 * Mat::Identity(n, n);
      const auto eg = Eigen::JacobiSVD<Mat>(q.H_g).singularValues();
      const double sigma_g = eg(eg.size() - 1);
      const double normQ = Eigen::JacobiSVD<Mat>(cfg.Q).singularValues()(0);
      delta = std::min(delta, 2.0 * sigma_g / normQ);
    }
    const ExactAdmm admm(q, cfg);
    const GMetric G = admm.metric();
    const Iterate us = as_iterate(solve_kkt(q));
    Iterate u{gaussian(o.n, gen, 10.0), gaussian(o.m, gen, 10.0), gaussian(o.p, gen, 10.0)};
    double e = g_dist_sq(G, u, us);
    for (int k = 0; k < 50; ++k) {
      u = admm.step(u);
      const double e1 = g_dist_sq(G, u, us);
      const double excess = e1 - (e / (1.0 + delta) + 1e-10);
      worst = std::max(worst, excess);
      if (!(excess <= 0.0)) ++bad;
      ++steps;
      e = e1;
    }
  }
  return {bad == 0, std::to_string(steps) + " steps on 100 instances, " + std::to_string(bad) +
                        " violations, max excess " + fmt("%.3g", worst)};
}

Outcome sa_rate() {
  const auto res = run_experiment(ExperimentConfig::defaults("sa-rate"));
  const auto& d = res.summary["deterministic"];
  bool ok = d["violations"].get<long>() == 0 && d["checked"].get<long>() > 0;
  std::string s = "deterministic " + std::to_string(d["checked"].get<long>()) + " k checked, " +
                  std::to_string(d["violations"].get<long>()) + " violations; noisy mean/(Q/k) =";
  for (const auto& p : res.summary["noisy"]["points"]) {
    const double r = p["mean_error"].get<double>() / p["q_over_k"].get<double>();
    ok = ok && r <= 1.1;
    s += fmt(" %.3f", r);
  }
  return {ok && res.summary["noisy"]["replications"].get<long>() == 10000, s};
}

Outcome isserlis() {
  McOptions mo;
  mo.samples = 1'000'000;
  double worst = 0.0;
  for (long n : {2L, 5L, 10L}) {
    mo.seed = static_cast<std::uint64_t>(n);
    const Mat S = kms_covariance(n, 5.0);
    const GaussianRegressionSampler c{cholesky_lower(S), Vec::Zero(n), 0.0, false};
    const Mat Vc = isserlis_V_centered(S);
    worst = std::max(worst, (mc_fourth_moment(c, S, mo).mean - Vc).norm() / Vc.norm());
    // affine: n-dimensional l with the last entry fixed at 1
    const Mat Sl = kms_covariance(n - 1, 5.0);
    const GaussianRegressionSampler a{cholesky_lower(Sl), Vec::Zero(n), 0.0, true};
    Mat Sa = Mat::Zero(n, n);
    Sa.topLeftCorner(n - 1, n - 1) = Sl;
    Sa(n - 1, n - 1) = 1.0;
    const Mat Va = isserlis_V_affine(Sl);
    worst = std::max(worst, (mc_fourth_moment(a, Sa, mo).mean - Va).norm() / Va.norm());
  }
  return {worst <= 0.05, "max Frobenius relative error " + fmt("%.4f", worst)};
}

Outcome lasso_compare() {
  auto cfg = ExperimentConfig::defaults("lasso-compare");
  cfg.algorithms = {"si-admm", "sadm0"};
  const auto res = run_experiment(cfg);
  std::vector<double> errs, t_si, t_s0;
  for (const auto& r : res.algorithms[0].runs) {
    errs.push_back(*r.rows.back().err_x);
    t_si.push_back(r.wall_seconds);
  }
  for (const auto& r : res.algorithms[1].runs) t_s0.push_back(r.wall_seconds);
  const double med = median(errs), a = median(t_si), b = median(t_s0);
  const bool ok = res.algorithms[0].runs.size() == 10 && med <= 1e-3 && a < b;
  return {ok, "median SI-ADMM error " + fmt("%.3g", med) + ", median wall " + fmt("%.4f", a) +
                  " s vs SADM0 " + fmt("%.4f", b) + " s, samples " +
                  fmt("%.0f", res.summary["algorithms"]["si-admm"]["median_samples"].get<double>())};
}

// bound at k+1 from the measured mean G-error at k, against the mean iterate error at k+1
Outcome bound_check(const ExperimentResult& res, ErrorField field) {
  const auto& si = res.algorithms.front();
  const auto E = align_by_outer(si.runs, field);
  long checked = 0, bad = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.bound.size() && i + 1 < E.size(); ++i) {
    const double b = res.bound[i].iterate_bound, m = E.mean[i + 1];
    if (!(m <= b)) ++bad;
    margin = std::min(margin, b / m);
    ++checked;
  }
  const bool ok = bad == 0 && checked > 0 && res.summary["bound"]["violations"].get<long>() == 0;
  return {ok, std::to_string(checked) + " outer iterations, " + std::to_string(bad) +
                  " violations, min bound/error " + fmt("%.3g", margin)};
}

ExperimentResult distreg_run;

Outcome bound_mode() {
  auto cfg = ExperimentConfig::defaults("lasso-compare");
  cfg.rho = 50.0;
  cfg.algorithms = {"si-admm"};
  if (distreg_run.algorithms.empty()) return {false, "distreg run unavailable"};
  const auto lasso = run_experiment(cfg);
  const auto a = bound_check(lasso, ErrorField::x);
  const auto b = bound_check(distreg_run, ErrorField::xy);
  return {a.ok && b.ok, "lasso rho=50: " + a.detail + "; distreg n=50: " + b.detail};
}

Outcome complexity() {
  const auto cfg = ExperimentConfig::defaults("complexity-sweep");
  const auto res = run_experiment(cfg);
  const auto& runs = res.algorithms.front().runs;
  std::vector<double> lx, ly;
  bool dominated = true;
  std::string s;
  std::size_t i = 0;
  for (double e : {1e-1, 1e-2, 1e-3, 1e-4}) {
    std::vector<double> first;
    for (const auto& r : runs)
      for (const auto& row : r.rows)
        if (*row.err_x <= e) {
          first.push_back(static_cast<double>(row.samples_total()));
          break;
        }
    if (first.size() != runs.size()) return {false, "a replication never reached " + fmt("%g", e)};
    const double med = median(first);
    lx.push_back(std::log(1.0 / e));
    ly.push_back(std::log(med));
    const double logN = res.summary["points"][i++]["log_N_bound"].get<double>();
    dominated = dominated && std::log(med) <= logN;
    s += fmt(" %.3g", med);
  }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) mx += lx[k] / 4, my += ly[k] / 4;
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  const double slope = sxy / sxx;
  return {slope >= 0.8 && slope <= 1.3 && dominated && runs.size() == 10,
          "median first crossings" + s + ", slope " + fmt("%.3f", slope) +
              ", log N_bound(1e-4) " +
              fmt("%.3g", res.summary["points"][3]["log_N_bound"].get<double>()) +
              (dominated ? ", dominated" : ", NOT dominated")};
}

Outcome distreg() {
  distreg_run = run_experiment(ExperimentConfig::defaults("distreg-compare"));
  const auto& alg = distreg_run.summary["algorithms"];
  const double si = alg["si-admm"]["median_final_error"].get<double>();
  const double d5 = alg["dsa-500000"]["median_final_error"].get<double>();
  const double n0 = alg["dsa-none"]["initial_error"].get<double>();
  const double nf = alg["dsa-none"]["median_final_error"].get<double>();
  return {si < d5 && nf > 1e3 * n0, "SI-ADMM " + fmt("%.3g", si) + " vs DSA-500000 " +
                                        fmt("%.3g", d5) + "; DSA-none " + fmt("%.3g", n0) +
                                        " -> " + fmt("%.3g", nf)};
}

Outcome properties() {
  Stream s(derive_seed(1, "acceptance", "properties", 0, "gen"));
  long bad = 0;
  std::string s_detail;

  // soft threshold: (v - p)/alpha lies in the subdifferential of |.|_1 at p
  for (int t = 0; t < 10000; ++t) {
    const Vec v = gaussian(5, s, 3.0);
    const double a = std::exp(s.normal());
    const Vec p = soft_threshold(v, a);
    for (int i = 0; i < 5; ++i) {
      const double g = (v(i) - p(i)) / a;
      const bool ok = p(i) == 0.0 ? std::abs(g) <= 1.0 + 1e-12
                                  : std::abs(g - (p(i) > 0 ? 1.0 : -1.0)) <= 1e-12;
      if (!ok) ++bad;
    }
  }
  const long b1 = bad;

  // DSA projection vs normal equations solved by QR of [I; A]
  for (int t = 0; t < 1000; ++t) {
    const long n = 1 + t % 9, m = 1 + (t / 9) % 6;
    Mat A(m, n);
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < n; ++j) A(i, j) = s.normal();
    const DsaProjector proj(A);
    const Vec xt = gaussian(n, s, 5.0), yt = gaussian(m, s, 5.0);
    Vec x, y;
    proj.project(xt, yt, x, y);
    Mat S(n + m, n);
    S << Mat::Identity(n, n), A;
    Vec r(n + m);
    r << xt, yt;
    const Vec ref = S.colPivHouseholderQr().solve(r);
    if (!((x - ref).norm() <= 1e-9 * (1.0 + ref.norm()) && (y - A * x).norm() <= 1e-10 * (1.0 + y.norm())))
      ++bad;
  }
  const long b2 = bad - b1;

  // G-norm: dense assembly, distance identity, homogeneity
  for (int t = 0; t < 200; ++t) {
    const long n = 4, m = 3, p = 2;
    Mat P = Mat(n, n), Q = Mat(m, m);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) P(i, j) = s.normal();
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < m; ++j) Q(i, j) = s.normal();
    P = P * P.transpose();
    Q = Q * Q.transpose();
    const double rg = std::exp(s.normal());
    const GMetric G(P, Q, rg);
    const Iterate u{gaussian(n, s), gaussian(m, s), gaussian(p, s)};
    const Iterate v{gaussian(n, s), gaussian(m, s), gaussian(p, s)};
    const double dense = u.x.dot(P * u.x) + u.y.dot(Q * u.y) + u.lambda.squaredNorm() / rg;
    const double c = s.normal();
    const double g = g_norm_sq(G, u);
    if (!(std::abs(g - dense) <= 1e-12 * dense)) ++bad;
    if (!(std::abs(g_dist_sq(G, u, v) - g_norm_sq(G, u - v)) <= 1e-12 * g_norm_sq(G, u - v))) ++bad;
    if (!(std::abs(g_norm_sq(G, u * c) - c * c * g) <= 1e-12 * c * c * g)) ++bad;
  }
  const long b3 = bad - b1 - b2;

  // oracle: unbiased within 4 standard errors, second moment under v1 |x|^2 + v2
  Stream gen(derive_seed(1, "acceptance", "properties", 1, "instance"));
  const auto lasso = gen_lasso(LassoParams{}, gen);
  DistRegParams dp;
  dp.n = 20;
  const auto dr = gen_distreg(dp, gen);
  McOptions mo;
  mo.samples = 200000;
  struct Case {
    GaussianRegressionSampler sm;
    Mat Sigma;
    double v1, v2;
  };
  const std::vector<Case> cases = {{lasso.sampler(), lasso.Sigma, lasso.v1_x, lasso.v2_x},
                                   {dr.sampler_x(), dr.Sigma, dr.v1, dr.v2_x},
                                   {dr.sampler_y(), dr.Sigma, dr.v1, dr.v2_y}};
  long oracle_bad = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& cs = cases[c];
    for (int t = 0; t < 2; ++t) {
      mo.seed = 100 * c + t;
      const Vec x = cs.sm.beta + gaussian(cs.sm.dim(), s);
      const auto g = mc_gradient_mean(cs.sm, x, mo);
      const Vec exact = 2.0 * cs.Sigma * (x - cs.sm.beta);
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(std::abs(g.mean(i) - exact(i)) <= 4.5 * g.std_error(i))) ++oracle_bad;
      const auto w = mc_gradient_noise(cs.sm, cs.Sigma, x, mo);
      if (!(w.mean <= cs.v1 * x.squaredNorm() + cs.v2)) ++oracle_bad;
    }
  }
  bad += oracle_bad;

  // sample accounting: recorded counts equal the schedule sum and the stream counters
  long acct_bad = 0;
  {
    const auto prob = lasso_problem(lasso);
    AlgorithmConfig cfg;
    cfg.rho = 20.0;
    cfg.sample_budget = 100000;
    cfg.max_outer = 100000;
    SampleStreams st{Stream(1), Stream(2)};
    const auto rec = solve(prob, cfg, Iterate::zeros(10, 10, 10), st);
    const auto consts = derive_constants(prob, cfg);
    std::uint64_t want = 0;
    for (std::size_t k = 1; k < rec.rows.size(); ++k) {
      const double Tk = std::ceil(cfg.T / std::pow(consts.eta, static_cast<double>(k - 1)));
      want += static_cast<std::uint64_t>(std::max<double>(consts.x.K(), Tk)) - 1;
      if (rec.rows[k].samples_x != want || rec.rows[k].samples_y != 0) ++acct_bad;
    }
    if (st.x.samples() != want || st.y.samples() != 0) ++acct_bad;
    if (rec.rows[rec.rows.size() - 2].samples_total() >= 100000 || want < 100000) ++acct_bad;
  }
  {
    DistRegParams p;
    p.n = 5;
    const auto inst = gen_distreg(p, gen);
    const auto prob = distreg_problem(inst);
    AlgorithmConfig cfg;
    cfg.rho = 20.0;
    cfg.Q = 20.0 * Mat::Identity(5, 5);
    cfg.max_outer = 15;
    SampleStreams st{Stream(3), Stream(4)};
    const auto rec = solve(prob, cfg, Iterate::zeros(5, 5, 5), st);
    const auto consts = derive_constants(prob, cfg);
    std::uint64_t wx = 0, wy = 0;
    for (long k = 0; k < 15; ++k) {
      const double Tk = std::ceil(cfg.T / std::pow(consts.eta, static_cast<double>(k)));
      wx += static_cast<std::uint64_t>(std::max<double>(consts.x.K(), Tk)) - 1;
      wy += static_cast<std::uint64_t>(std::max<double>(consts.y->K(), Tk)) - 1;
    }
    if (rec.rows.back().samples_x != wx || rec.rows.back().samples_y != wy) ++acct_bad;
    if (st.x.samples() != wx || st.y.samples() != wy) ++acct_bad;
  }
  bad += acct_bad;

  return {bad == 0, "soft-threshold " + std::to_string(b1) + ", projection " + std::to_string(b2) +
                        ", G-norm " + std::to_string(b3) + ", oracle " + std::to_string(oracle_bad) +
                        ", accounting " + std::to_string(acct_bad) + " failures"};
}

}  // namespace

int main() {
  std::printf("acceptance: %d OpenMP thread(s), rng %s\n", omp_threads(),
              std::string(kRngFamily).c_str());
  report("C1", "exact ADMM contraction, P=0 gamma=1", 10, [] { return contraction(false); });
  report("C2", "exact ADMM contraction, Q>0 strongly convex g", 10,
         [] { return contraction(true); });
  report("C3", "SA rate Q/k", 60, sa_rate);
  report("C4", "fourth-moment closed forms vs Monte Carlo", 60, isserlis);
  report("C5", "LASSO n=10 rho=20 vs SADM0", 300, lasso_compare);
  report("C8", "distributed regression n=50 vs DSA", 300, distreg);
  report("C6", "empirical bound dominates mean error", 600, bound_mode);
  report("C7", "complexity sweep", 900, complexity);
  report("C9", "property suites", 120, properties);
  std::printf("%s: %d failure(s)\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
