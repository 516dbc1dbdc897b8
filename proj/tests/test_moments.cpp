#include <omp.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "siadmm/error.hpp"
#include "siadmm/moments.hpp"
#include "siadmm/synthetic.hpp"

using namespace siadmm;

namespace {
GaussianRegressionSampler centered(long n) {
  const Mat S = kms_covariance(n, 5.0);
  return {cholesky_lower(S), Vec::Zero(n), 0.0, false};
}
}  // namespace

TEST_CASE("covariance: parallel equals serial bit for bit") {
  McOptions o;
  o.samples = 20001;
  o.chunks = 7;
  o.seed = 3;
  const auto sm = centered(4);
  const auto a = mc_covariance(sm, o);
  const auto b = mc_covariance_serial(sm, o);
  CHECK(a.mean == b.mean);
  CHECK(a.samples == 20001);
}

TEST_CASE("fourth moment: expanded kernel agrees with the explicit square") {
  McOptions o;
  o.samples = 5000;
  o.seed = 4;
  for (long n : {2L, 5L}) {
    const auto sm = centered(n);
    const Mat S = kms_covariance(n, 5.0);
    const auto a = mc_fourth_moment(sm, S, o);
    const auto b = mc_fourth_moment_serial(sm, S, o);
    CHECK((a.mean - b.mean).norm() <= 1e-10 * b.mean.norm());
  }
}

TEST_CASE("results do not depend on the thread count") {
  McOptions o;
  o.samples = 10000;
  o.seed = 5;
  const auto sm = centered(3);
  const Mat S = kms_covariance(3, 5.0);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto a = mc_fourth_moment(sm, S, o);
  const auto g1 = mc_gradient_noise(sm, S, Vec::Ones(3), o);
  omp_set_num_threads(4);
  const auto b = mc_fourth_moment(sm, S, o);
  const auto g4 = mc_gradient_noise(sm, S, Vec::Ones(3), o);
  omp_set_num_threads(saved);
  CHECK(a.mean == b.mean);
  CHECK(g1.mean == g4.mean);
}

TEST_CASE("Monte-Carlo fourth moment approaches the closed forms") {
  McOptions o;
  o.samples = 200000;
  o.seed = 6;
  for (long n : {2L, 5L}) {
    const Mat S = kms_covariance(n, 5.0);
    const auto c = mc_fourth_moment(centered(n), S, o);
    const Mat Vc = isserlis_V_centered(S);
    CHECK((c.mean - Vc).norm() / Vc.norm() <= 0.05);

    // affine: l = (L z; 1)
    const Mat Sl = kms_covariance(n - 1 > 0 ? n - 1 : 1, 5.0);
    GaussianRegressionSampler aff{cholesky_lower(Sl), Vec::Zero(Sl.rows() + 1), 0.0, true};
    Mat Sa = Mat::Zero(Sl.rows() + 1, Sl.rows() + 1);
    Sa.topLeftCorner(Sl.rows(), Sl.rows()) = Sl;
    Sa(Sl.rows(), Sl.rows()) = 1.0;
    const auto m = mc_fourth_moment(aff, Sa, o);
    const Mat Va = isserlis_V_affine(Sl);
    CHECK((m.mean - Va).norm() / Va.norm() <= 0.05);
  }
}

TEST_CASE("parallel replications rethrow the lowest failing index") {
  try {
    parallel_replications(16, [](int i) {
      if (i == 5 || i == 11) throw std::runtime_error("rep " + std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "rep 5");
  }
  std::vector<int> hit(32, 0);
  parallel_replications(32, [&](int i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
}

TEST_CASE("invalid options") {
  McOptions o;
  o.samples = 0;
  CHECK_THROWS_AS(mc_covariance(centered(2), o), ConfigError);
}
