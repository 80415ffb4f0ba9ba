#pragma once

// Hermitian eigensolvers for assembled blocks: dense for small blocks and a
// restarted Davidson iteration with diagonal preconditioning for large ones.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "torus_vrep/manybody.hpp"

namespace tvr {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenResult {
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns, possibly fewer than values
  Eigen::VectorXd residuals;
  double h_norm = 0.0;
  int iterations = 0;
  std::string method;
};

/// All eigenvalues; eigenvectors only for values within lambda_0 + |lambda_0| keep_rel + keep_abs
/// (all of them when keep_rel < 0).
EigenResult dense_eigen(const SparseMatrixC& H, double keep_rel = -1.0, double keep_abs = 0.0);

struct DavidsonOptions {
  int nev = 4;
  int max_subspace = 48;
  int max_iterations = 2000;
  double tol = 1e-9;  // residual relative to ||H||
  std::uint64_t seed = 0x5eed;
};

EigenResult davidson(const SparseMatrixC& H, const DavidsonOptions& opts = {});

/// Max absolute row sum, an upper bound on the spectral norm.
double norm_bound(const SparseMatrixC& H);

}  // namespace tvr
