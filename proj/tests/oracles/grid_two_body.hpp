#pragma once

// Real-space two-particle oracle on an M x M periodic grid:
// H = -1/2 (d1^2 + d2^2) (second-order differences) + v(x1) + v(x2) + W,
// W = gamma / h on the diagonal x1 = x2 (delta) or w(x1 - x2) (multiplicative).
// Lowest eigenvalue by Lanczos with full reorthogonalization.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

struct GridTwoBody {
  int M = 64;
  double gamma = 0.0;
  std::function<double(double)> v;
  std::function<double(double)> w;

  Eigen::VectorXd apply(const Eigen::VectorXd& psi) const {
    const double h = 1.0 / M;
    const double c = 0.5 / (h * h);
    Eigen::VectorXd out(psi.size());
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) {
        const int ip = (i + 1) % M, im = (i + M - 1) % M, jp = (j + 1) % M, jm = (j + M - 1) % M;
        double diag = 4.0 * c;
        if (v) diag += v(i * h) + v(j * h);
        if (w) diag += w(std::fmod((i - j + M) * h, 1.0));
        if (i == j) diag += gamma / h;
        out[i * M + j] = diag * psi[i * M + j] -
                         c * (psi[ip * M + j] + psi[im * M + j] + psi[i * M + jp] + psi[i * M + jm]);
      }
    }
    return out;
  }

  double ground_energy(int steps = 400, unsigned seed = 1) const {
    const int n = M * M;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    Eigen::MatrixXd Q(n, steps + 1);
    Eigen::VectorXd q(n);
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) q[i * M + j] = u(rng);
    }
    // Symmetric start: the singlet ground state is symmetric in (x1, x2).
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < i; ++j) q[i * M + j] = q[j * M + i];
    }
    q.normalize();
    Q.col(0) = q;
    std::vector<double> alpha, beta;
    double previous = 0.0;
    for (int k = 0; k < steps; ++k) {
      Eigen::VectorXd z = apply(Q.col(k));
      alpha.push_back(Q.col(k).dot(z));
      for (int pass = 0; pass < 2; ++pass) z -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).transpose() * z);
      const double b = z.norm();
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k + 1, k + 1);
      for (int i = 0; i <= k; ++i) {
        T(i, i) = alpha[i];
        if (i < k) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      const double e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues()[0];
      if (k > 10 && std::abs(e - previous) < 1e-13 * (1.0 + std::abs(e))) return e;
      previous = e;
      if (b < 1e-14) return e;
      beta.push_back(b);
      Q.col(k + 1) = z / b;
    }
    return previous;
  }
};

}  // namespace oracle
