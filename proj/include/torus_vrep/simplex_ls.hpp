#pragma once

// min ||A w - b||^2 subject to w >= 0, sum w = 1.

#include <Eigen/Dense>

namespace tvr {

struct SimplexLsResult {
  Eigen::VectorXd weights;
  double residual = 0.0;  // ||A w - b||
  int iterations = 0;
  bool kkt = false;       // exact stationarity verified on the final support
};

/// Euclidean projection onto the probability simplex.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& y);

SimplexLsResult simplex_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol = 1e-15,
                                      int max_iterations = 20000);

}  // namespace tvr
