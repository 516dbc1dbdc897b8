#include "siadmm/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "siadmm/error.hpp"

namespace siadmm::linalg {

Extremes sym_eig_extremes(const Mat& S) {
  require(S.rows() == S.cols() && S.rows() > 0, "eigenvalues need a non-empty square matrix");
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

double lambda_min(const Mat& S) { return sym_eig_extremes(S).min; }
double lambda_max(const Mat& S) { return sym_eig_extremes(S).max; }

double spectral_norm(const Mat& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

Eigen::Index numerical_rank(const Mat& M, double rel_tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  const auto& s = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, s(0));
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

bool is_symmetric(const Mat& S, double rel_tol) {
  if (S.rows() != S.cols()) return false;
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  return (S - S.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool is_psd(const Mat& S, double rel_tol) {
  if (!is_symmetric(S)) return false;
  if (S.size() == 0) return true;
  auto e = sym_eig_extremes(S);
  return e.min >= -rel_tol * std::max(1.0, std::abs(e.max));
}

bool is_pd(const Mat& S, double rel_tol) {
  if (!is_symmetric(S) || S.size() == 0) return false;
  auto e = sym_eig_extremes(S);
  return e.min > rel_tol * std::max(1.0, std::abs(e.max));
}

bool is_zero(const Mat& S) { return S.size() == 0 || S.cwiseAbs().maxCoeff() == 0.0; }

bool is_diagonal(const Mat& S) {
  if (S.rows() != S.cols()) return false;
  for (Eigen::Index j = 0; j < S.cols(); ++j)
    for (Eigen::Index i = 0; i < S.rows(); ++i)
      if (i != j && S(i, j) != 0.0) return false;
  return true;
}

}  // namespace siadmm::linalg
