#include <cmath>

#include "doctest.h"
#include "siadmm/linalg.hpp"
#include "siadmm/rng.hpp"

using namespace siadmm;

namespace {
Mat gaussian(long r, long c, Stream& s) {
  Mat M(r, c);
  for (long j = 0; j < c; ++j)
    for (long i = 0; i < r; ++i) M(i, j) = s.normal();
  return M;
}

// power iteration on a PSD matrix
double power_max(const Mat& S) {
  Vec v = Vec::Ones(S.rows());
  double lam = 0.0;
  for (int it = 0; it < 20000; ++it) {
    Vec w = S * v;
    lam = w.norm() / v.norm();
    v = w / w.norm();
  }
  return lam;
}
}  // namespace

TEST_CASE("extreme eigenvalues of a diagonal matrix") {
  Mat D = Vec((Vec(4) << 3.0, -1.0, 7.5, 2.0).finished()).asDiagonal();
  const auto e = linalg::sym_eig_extremes(D);
  CHECK(e.min == doctest::Approx(-1.0));
  CHECK(e.max == doctest::Approx(7.5));
  CHECK(linalg::is_diagonal(D));
  CHECK_FALSE(linalg::is_psd(D));
}

TEST_CASE("lambda_max and spectral norm agree with independent routes") {
  Stream s(11);
  for (int t = 0; t < 10; ++t) {
    const Mat M = gaussian(6, 4, s);
    const Mat S = M.transpose() * M;
    CHECK(linalg::lambda_max(S) == doctest::Approx(power_max(S)).epsilon(1e-8));
    Eigen::JacobiSVD<Mat> svd(M);
    CHECK(linalg::spectral_norm(M) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
    CHECK(linalg::is_psd(S));
    CHECK(linalg::is_symmetric(S));
  }
}

TEST_CASE("numerical rank") {
  Stream s(5);
  const Mat U = gaussian(6, 2, s), V = gaussian(2, 5, s);
  CHECK(linalg::numerical_rank(U * V) == 2);
  CHECK(linalg::numerical_rank(Mat::Identity(4, 4)) == 4);
  CHECK(linalg::is_zero(Mat::Zero(3, 3)));
  CHECK_FALSE(linalg::is_pd(Mat::Zero(3, 3)));
}
