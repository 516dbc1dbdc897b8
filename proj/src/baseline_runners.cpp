#include "siadmm/baseline_runners.hpp"

#include <chrono>
#include <limits>

#include "siadmm/error.hpp"

namespace siadmm {

namespace {

using Clock = std::chrono::steady_clock;

void check_opts(const BaselineRunOptions& o) {
  require(o.steps >= 0, "baseline step count must be nonnegative");
  require(o.record_stride >= 1, "record_stride must be at least 1");
}

bool record_at(const BaselineRunOptions& o, long k) {
  return k % o.record_stride == 0 || k == o.steps;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <class Step, class Row>
RunRecord lasso_loop(const GaussianRegressionSampler& sampler, const BaselineRunOptions& opts,
                     Stream& stream, AveragedIterate& st, Step&& step, Row&& fill) {
  check_opts(opts);
  RunRecord rec;
  rec.algorithm = opts.algorithm;
  rec.seed = opts.seed;
  const auto t0 = Clock::now();
  auto push = [&](long k) {
    RunRow row;
    row.k = k;
    row.samples_x = stream.samples();
    row.wall_ms = ms_since(t0);
    fill(row);
    rec.rows.push_back(std::move(row));
  };
  const std::uint64_t base = stream.samples();
  push(0);
  rec.rows.back().samples_x -= base;
  Vec l(sampler.dim());
  for (long k = 1; k <= opts.steps; ++k) {
    const double s = sampler.draw(stream, l);
    step(l, s);
    if (record_at(opts, k)) {
      push(k);
      rec.rows.back().samples_x -= base;
    }
  }
  rec.final_iterate = {st.x, st.y, st.lambda};
  rec.wall_seconds = ms_since(t0) / 1000.0;
  return rec;
}

}  // namespace

RunRecord run_sadm0(const GaussianRegressionSampler& sampler, const Vec& x_star,
                    const Sadm0Params& params, Report report, const BaselineRunOptions& opts,
                    Stream& stream) {
  require(params.scale > 0.0, "SADM0 penalty scale must be positive");
  const auto n = sampler.dim();
  auto st = AveragedIterate::start(Vec::Zero(n), Vec::Zero(n), Vec::Zero(n));
  return lasso_loop(
      sampler, opts, stream, st, [&](const Vec& l, double s) { sadm0_step(st, l, s, params); },
      [&](RunRow& row) {
        const bool avg = report == Report::average;
        const Vec x = avg ? st.x_avg() : st.x;
        const Vec y = avg ? st.y_avg() : st.y;
        row.err_x = (x - x_star).squaredNorm();
        row.err_y = (y - x_star).squaredNorm();
        if (opts.store_iterates) row.u = Iterate{x, y, st.lambda};
      });
}

RunRecord run_sadm1(const GaussianRegressionSampler& sampler, const Vec& x_star,
                    const Sadm1Params& params, const BaselineRunOptions& opts, Stream& stream) {
  require(params.mu_f > 0.0, "SADM1 needs mu_f > 0");
  const auto n = sampler.dim();
  auto st = AveragedIterate::start(Vec::Zero(n), Vec::Zero(n), Vec::Zero(n));
  return lasso_loop(
      sampler, opts, stream, st, [&](const Vec& l, double s) { sadm1_step(st, l, s, params); },
      [&](RunRow& row) {
        const Vec x = st.x_avg();
        const Vec y = st.y_avg();
        row.err_x = (x - x_star).squaredNorm();
        row.err_y = (y - x_star).squaredNorm();
        if (opts.store_iterates) row.u = Iterate{x, y, st.lambda};
      });
}

RunRecord run_dsa(const GaussianRegressionSampler& sampler_x,
                  const GaussianRegressionSampler& sampler_y, const Vec& x_star,
                  const Vec& y_star, const DsaParams& params, const DsaProjector& proj,
                  const BaselineRunOptions& opts, Stream& stream_x, Stream& stream_y) {
  check_opts(opts);
  require(params.mu_f > 0.0 && params.sigma_g > 0.0, "DSA needs mu_f, sigma_g > 0");
  RunRecord rec;
  rec.algorithm = opts.algorithm;
  rec.seed = opts.seed;
  DsaState st{Vec::Zero(sampler_x.dim()), Vec::Zero(sampler_y.dim()), 1};
  const auto t0 = Clock::now();
  const std::uint64_t bx = stream_x.samples(), by = stream_y.samples();
  bool diverged = false;
  auto push = [&](long k) {
    RunRow row;
    row.k = k;
    row.samples_x = stream_x.samples() - bx;
    row.samples_y = stream_y.samples() - by;
    row.wall_ms = ms_since(t0);
    if (diverged) {
      row.err_x = std::numeric_limits<double>::infinity();
      row.err_y = std::numeric_limits<double>::infinity();
    } else {
      row.err_x = (st.x - x_star).squaredNorm();
      row.err_y = (st.y - y_star).squaredNorm();
      if (opts.store_iterates) row.u = Iterate{st.x, st.y, Vec()};
    }
    rec.rows.push_back(std::move(row));
  };
  push(0);
  Vec lx(sampler_x.dim()), ly(sampler_y.dim());
  for (long k = 1; k <= opts.steps; ++k) {
    const double sx = sampler_x.draw(stream_x, lx);
    const double sy = sampler_y.draw(stream_y, ly);
    if (!diverged) {
      try {
        dsa_step(st, lx, sx, ly, sy, params, proj);
      } catch (const NumericalError&) {
        // overflow: the error is +inf from here on
        diverged = true;
      }
    }
    if (record_at(opts, k)) push(k);
  }
  if (diverged) {
    const double inf = std::numeric_limits<double>::infinity();
    st.x.setConstant(inf);
    st.y.setConstant(inf);
  }
  rec.final_iterate = {st.x, st.y, Vec()};
  rec.wall_seconds = ms_since(t0) / 1000.0;
  return rec;
}

}  // namespace siadmm
