#pragma once

#include <Eigen/Dense>

namespace siadmm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace linalg {

struct Extremes {
  double min;
  double max;
};

Extremes sym_eig_extremes(const Mat& S);
double lambda_min(const Mat& S);
double lambda_max(const Mat& S);
double spectral_norm(const Mat& M);
Eigen::Index numerical_rank(const Mat& M, double rel_tol = 1e-10);

bool is_symmetric(const Mat& S, double rel_tol = 1e-10);
bool is_psd(const Mat& S, double rel_tol = 1e-10);
bool is_pd(const Mat& S, double rel_tol = 1e-12);
bool is_zero(const Mat& S);

// Diagonal if every off-diagonal entry is exactly zero.
bool is_diagonal(const Mat& S);

}  // namespace linalg
}  // namespace siadmm
