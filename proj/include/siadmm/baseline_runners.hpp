#pragma once

#include <cstdint>
#include <string>

#include "siadmm/baselines.hpp"
#include "siadmm/run_record.hpp"
#include "siadmm/synthetic.hpp"

namespace siadmm {

struct BaselineRunOptions {
  std::string algorithm;
  std::uint64_t seed = 0;
  long steps = 0;
  long record_stride = 1;  // rows at k = 0, stride, 2 stride, ... and the last step
  bool store_iterates = false;
};

enum class Report { last_iterate, average };

// LASSO baselines: errors of x (and y) against x* on the reported point.
RunRecord run_sadm0(const GaussianRegressionSampler& sampler, const Vec& x_star,
                    const Sadm0Params& params, Report report, const BaselineRunOptions& opts,
                    Stream& stream);
RunRecord run_sadm1(const GaussianRegressionSampler& sampler, const Vec& x_star,
                    const Sadm1Params& params, const BaselineRunOptions& opts, Stream& stream);

// Distributed SA on min f(x) + g(y) s.t. Ax - y = 0 from x0 = y0 = 0.
RunRecord run_dsa(const GaussianRegressionSampler& sampler_x,
                  const GaussianRegressionSampler& sampler_y, const Vec& x_star,
                  const Vec& y_star, const DsaParams& params, const DsaProjector& proj,
                  const BaselineRunOptions& opts, Stream& stream_x, Stream& stream_y);

}  // namespace siadmm
