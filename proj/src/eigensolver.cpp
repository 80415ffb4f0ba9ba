#include "torus_vrep/eigensolver.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tvr {

double norm_bound(const SparseMatrixC& H) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(H.rows());
  for (int k = 0; k < H.outerSize(); ++k) {
    for (SparseMatrixC::InnerIterator it(H, k); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return rows.size() ? rows.maxCoeff() : 0.0;
}

namespace {

Eigen::VectorXd residual_norms(const SparseMatrixC& H, const Eigen::VectorXd& values, const Eigen::MatrixXcd& vectors) {
  Eigen::VectorXd r(values.size());
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    r[j] = (H * vectors.col(j) - values[j] * vectors.col(j)).norm();
  }
  return r;
}

// Two passes of classical Gram-Schmidt against the columns of V.
double orthogonalize(const Eigen::MatrixXcd& V, Eigen::VectorXcd& t) {
  for (int pass = 0; pass < 2; ++pass) {
    if (V.cols() > 0) t -= V * (V.adjoint() * t);
  }
  return t.norm();
}

}  // namespace

EigenResult dense_eigen(const SparseMatrixC& H, double keep_rel, double keep_abs) {
  Eigen::MatrixXcd M(H);
  M = 0.5 * (M + M.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
  EigenResult r;
  r.values = es.eigenvalues();
  Eigen::Index keep = r.values.size();
  if (keep_rel >= 0.0 && keep > 0) {
    const double cut = r.values[0] + std::abs(r.values[0]) * keep_rel + keep_abs;
    keep = 1;
    while (keep < r.values.size() && r.values[keep] <= cut) ++keep;
  }
  r.vectors = es.eigenvectors().leftCols(keep);
  r.residuals = residual_norms(H, r.values.head(keep), r.vectors);
  r.h_norm = r.values.size() ? std::max(std::abs(r.values[0]), std::abs(r.values[r.values.size() - 1])) : 0.0;
  r.method = "dense";
  return r;
}

EigenResult davidson(const SparseMatrixC& H, const DavidsonOptions& opts) {
  const Eigen::Index n = H.rows();
  const int nev = static_cast<int>(std::min<Eigen::Index>(opts.nev, n));
  if (n <= std::max(4 * nev, 200)) {
    EigenResult r = dense_eigen(H);
    return r;
  }
  const double hnorm = norm_bound(H);
  const double target = opts.tol * std::max(hnorm, 1.0);
  const Eigen::VectorXcd diag = H.diagonal();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return diag[a].real() < diag[b].real(); });

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  const int start = std::min<int>(static_cast<int>(n), nev + 4);
  Eigen::MatrixXcd V(n, 0);
  for (int j = 0; j < start; ++j) {
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(n);
    t[order[static_cast<std::size_t>(j)]] = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) t[i] += 1e-3 * cplx{gauss(rng), gauss(rng)};
    const double nt = orthogonalize(V, t);
    V.conservativeResize(n, V.cols() + 1);
    V.col(V.cols() - 1) = t / nt;
  }
  Eigen::MatrixXcd W = H * V;

  EigenResult r;
  r.method = "davidson";
  r.h_norm = hnorm;
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    Eigen::MatrixXcd S = V.adjoint() * W;
    S = 0.5 * (S + S.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
    const Eigen::MatrixXcd Y = es.eigenvectors().leftCols(nev);
    const Eigen::VectorXd theta = es.eigenvalues().head(nev);
    Eigen::MatrixXcd X = V * Y;
    Eigen::MatrixXcd AX = W * Y;
    Eigen::MatrixXcd R = AX - X * theta.asDiagonal();
    Eigen::VectorXd res(nev);
    for (int j = 0; j < nev; ++j) res[j] = R.col(j).norm();
    r.iterations = iter;
    if (res.maxCoeff() <= target) {
      r.values = theta;
      r.vectors = X;
      r.residuals = residual_norms(H, theta, X);
      return r;
    }

    if (V.cols() + nev > opts.max_subspace) {
      const int keep = std::min<int>(static_cast<int>(es.eigenvalues().size()), 2 * nev);
      const Eigen::MatrixXcd Yk = es.eigenvectors().leftCols(keep);
      V = (V * Yk).eval();
      W = (W * Yk).eval();
    }

    int added = 0;
    for (int j = 0; j < nev; ++j) {
      if (res[j] <= target) continue;
      Eigen::VectorXcd t(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        double den = theta[j] - diag[i].real();
        if (std::abs(den) < 1e-8) den = den < 0 ? -1e-8 : 1e-8;
        t[i] = R(i, j) / den;
      }
      const double nt = orthogonalize(V, t);
      if (nt < 1e-12) continue;
      t /= nt;
      V.conservativeResize(n, V.cols() + 1);
      V.col(V.cols() - 1) = t;
      W.conservativeResize(n, W.cols() + 1);
      W.col(W.cols() - 1) = H * t;
      ++added;
    }
    if (added == 0) {
      Eigen::VectorXcd t(n);
      for (Eigen::Index i = 0; i < n; ++i) t[i] = cplx{gauss(rng), gauss(rng)};
      const double nt = orthogonalize(V, t);
      V.conservativeResize(n, V.cols() + 1);
      V.col(V.cols() - 1) = t / nt;
      W.conservativeResize(n, W.cols() + 1);
      W.col(W.cols() - 1) = H * V.col(V.cols() - 1);
    }
  }
  throw ConvergenceError("davidson did not converge in " + std::to_string(opts.max_iterations) +
                         " iterations");
}

}  // namespace tvr
