#include "siadmm/moments.hpp"

#include <cmath>

#include "siadmm/error.hpp"
#include "siadmm/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace siadmm {

int omp_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

void check(const McOptions& o) {
  require(o.samples >= 1 && o.chunks >= 1, "Monte-Carlo needs samples >= 1 and chunks >= 1");
}

long chunk_size(const McOptions& o, int c) {
  const long base = o.samples / o.chunks;
  return base + (c < o.samples % o.chunks ? 1 : 0);
}

Stream chunk_stream(const McOptions& o, int c, const char* what) {
  return Stream(derive_seed(o.seed, "monte-carlo", what, static_cast<std::uint64_t>(c), "draw"));
}

// Sums per-chunk matrices in chunk order.
template <class Kernel>
Mat chunked_sum(const McOptions& o, Eigen::Index rows, Eigen::Index cols, bool parallel,
                Kernel&& kernel) {
  std::vector<Mat> parts(static_cast<std::size_t>(o.chunks), Mat::Zero(rows, cols));
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int c = 0; c < o.chunks; ++c) kernel(c, parts[static_cast<std::size_t>(c)]);
  } else {
    for (int c = 0; c < o.chunks; ++c) kernel(c, parts[static_cast<std::size_t>(c)]);
  }
  Mat total = Mat::Zero(rows, cols);
  for (const auto& p : parts) total += p;
  return total;
}

MomentEstimate fourth_moment(const GaussianRegressionSampler& sm, const Mat& Sigma,
                             const McOptions& o, bool fast) {
  check(o);
  const auto n = sm.dim();
  require(Sigma.rows() == n && Sigma.cols() == n, "Sigma must match the sampler dimension");
  const Mat S2 = Sigma * Sigma;
  Mat sum = chunked_sum(o, n, n, fast, [&](int c, Mat& acc) {
    Stream st = chunk_stream(o, c, "fourth-moment");
    Vec l(n), Sl(n);
    Mat D(n, n);
    const long m = chunk_size(o, c);
    for (long i = 0; i < m; ++i) {
      sm.draw(st, l);
      if (fast) {
        // (ll' - S)^2 = (l'l) ll' - l (Sl)' - (Sl) l' + S^2
        Sl.noalias() = Sigma * l;
        acc.noalias() += l.squaredNorm() * (l * l.transpose());
        acc.noalias() -= l * Sl.transpose();
        acc.noalias() -= Sl * l.transpose();
      } else {
        D = l * l.transpose() - Sigma;
        acc.noalias() += D * D;
      }
    }
    if (fast) acc += static_cast<double>(m) * S2;
  });
  return {sum / static_cast<double>(o.samples), o.samples};
}

MomentEstimate covariance(const GaussianRegressionSampler& sm, const McOptions& o, bool par) {
  check(o);
  const auto n = sm.dim();
  Mat sum = chunked_sum(o, n, n, par, [&](int c, Mat& acc) {
    Stream st = chunk_stream(o, c, "covariance");
    Vec l(n);
    const long m = chunk_size(o, c);
    for (long i = 0; i < m; ++i) {
      sm.draw(st, l);
      acc.noalias() += l * l.transpose();
    }
  });
  return {sum / static_cast<double>(o.samples), o.samples};
}

}  // namespace

MomentEstimate mc_fourth_moment(const GaussianRegressionSampler& sampler, const Mat& Sigma,
                                const McOptions& opts) {
  return fourth_moment(sampler, Sigma, opts, true);
}

MomentEstimate mc_fourth_moment_serial(const GaussianRegressionSampler& sampler,
                                       const Mat& Sigma, const McOptions& opts) {
  return fourth_moment(sampler, Sigma, opts, false);
}

MomentEstimate mc_covariance(const GaussianRegressionSampler& sampler, const McOptions& opts) {
  return covariance(sampler, opts, true);
}

MomentEstimate mc_covariance_serial(const GaussianRegressionSampler& sampler,
                                    const McOptions& opts) {
  return covariance(sampler, opts, false);
}

ScalarEstimate mc_gradient_noise(const GaussianRegressionSampler& sampler, const Mat& Sigma,
                                 const Vec& x, const McOptions& opts) {
  check(opts);
  const auto n = sampler.dim();
  require(x.size() == n && Sigma.rows() == n, "dimension mismatch");
  const Vec mean_grad = 2.0 * Sigma * (x - sampler.beta);
  // column 0: sum |w|^2, column 1: sum |w|^4
  Mat sum = chunked_sum(opts, 1, 2, true, [&](int c, Mat& acc) {
    Stream st = chunk_stream(opts, c, "gradient-noise");
    Vec l(n);
    const long m = chunk_size(opts, c);
    for (long i = 0; i < m; ++i) {
      const double s = sampler.draw(st, l);
      const double w2 = (2.0 * (l.dot(x) - s) * l - mean_grad).squaredNorm();
      acc(0, 0) += w2;
      acc(0, 1) += w2 * w2;
    }
  });
  const double N = static_cast<double>(opts.samples);
  ScalarEstimate e;
  e.samples = opts.samples;
  e.mean = sum(0, 0) / N;
  const double var = std::max(0.0, sum(0, 1) / N - e.mean * e.mean);
  e.std_error = std::sqrt(var / N);
  return e;
}

VectorEstimate mc_gradient_mean(const GaussianRegressionSampler& sampler, const Vec& x,
                                const McOptions& opts) {
  check(opts);
  const auto n = sampler.dim();
  require(x.size() == n, "dimension mismatch");
  Mat sum = chunked_sum(opts, n, 2, true, [&](int c, Mat& acc) {
    Stream st = chunk_stream(opts, c, "gradient-mean");
    Vec l(n);
    const long m = chunk_size(opts, c);
    for (long i = 0; i < m; ++i) {
      const double s = sampler.draw(st, l);
      l *= 2.0 * (l.dot(x) - s);
      acc.col(0) += l;
      acc.col(1) += l.cwiseAbs2();
    }
  });
  const double N = static_cast<double>(opts.samples);
  VectorEstimate e;
  e.samples = opts.samples;
  e.mean = sum.col(0) / N;
  e.std_error = ((sum.col(1) / N - e.mean.cwiseAbs2()).cwiseMax(0.0) / N).cwiseSqrt();
  return e;
}

}  // namespace siadmm
