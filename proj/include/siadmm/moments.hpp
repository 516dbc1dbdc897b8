#pragma once

#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include "siadmm/synthetic.hpp"

namespace siadmm {

// Monte-Carlo estimators split into fixed chunks; chunk c draws from its own stream
// derived from (seed, c), so results do not depend on the thread count.
struct McOptions {
  long samples = 1'000'000;
  int chunks = 64;
  std::uint64_t seed = 0;
};

struct MomentEstimate {
  Mat mean;
  long samples = 0;
};

// E[(ll' - Sigma)^2] with l from `sampler` (beta and noise ignored). O(n^2) per draw.
MomentEstimate mc_fourth_moment(const GaussianRegressionSampler& sampler, const Mat& Sigma,
                                const McOptions& opts);
// Serial reference forming (ll' - Sigma)^2 explicitly, O(n^3) per draw.
MomentEstimate mc_fourth_moment_serial(const GaussianRegressionSampler& sampler,
                                       const Mat& Sigma, const McOptions& opts);

// E[ll'].
MomentEstimate mc_covariance(const GaussianRegressionSampler& sampler, const McOptions& opts);
MomentEstimate mc_covariance_serial(const GaussianRegressionSampler& sampler,
                                    const McOptions& opts);

struct ScalarEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

// E|w|^2 with w = 2 (l'x - s) l - 2 Sigma (x - beta).
ScalarEstimate mc_gradient_noise(const GaussianRegressionSampler& sampler, const Mat& Sigma,
                                 const Vec& x, const McOptions& opts);

// Mean sampled gradient 2 (l'x - s) l and its per-coordinate standard error.
struct VectorEstimate {
  Vec mean;
  Vec std_error;
  long samples = 0;
};
VectorEstimate mc_gradient_mean(const GaussianRegressionSampler& sampler, const Vec& x,
                                const McOptions& opts);

int omp_threads();

// Runs body(i) for i in [0, count) in parallel. The first failure (lowest index)
// is rethrown with the index attached.
template <class Body>
void parallel_replications(int count, Body&& body) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (int i = 0; i < count; ++i) {
    if (errors[static_cast<std::size_t>(i)]) std::rethrow_exception(errors[static_cast<std::size_t>(i)]);
  }
}

}  // namespace siadmm
