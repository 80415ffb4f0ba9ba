#include "torus_vrep/simplex_ls.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace tvr {

Eigen::VectorXd project_simplex(const Eigen::VectorXd& y) {
  const Eigen::Index m = y.size();
  std::vector<double> u(y.data(), y.data() + m);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  return (y.array() - theta).max(0.0).matrix();
}

namespace {

// Solve the equality-constrained problem on `support`; returns false if the
// system is inconsistent.
bool solve_on_support(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c, const std::vector<int>& support,
                      Eigen::VectorXd& w, double& nu) {
  const int s = static_cast<int>(support.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s + 1, s + 1);
  Eigen::VectorXd rhs(s + 1);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) K(i, j) = Q(support[i], support[j]);
    K(i, s) = K(s, i) = 1.0;
    rhs[i] = c[support[i]];
  }
  rhs[s] = 1.0;
  const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
  if (!sol.allFinite() || (K * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return false;
  w = Eigen::VectorXd::Zero(Q.rows());
  for (int i = 0; i < s; ++i) w[support[i]] = sol[i];
  nu = sol[s];
  return true;
}

}  // namespace

SimplexLsResult simplex_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol,
                                      int max_iterations) {
  const Eigen::Index m = A.cols();
  SimplexLsResult r;
  if (m == 0) throw std::invalid_argument("simplex least squares needs at least one column");
  auto residual = [&](const Eigen::VectorXd& w) { return (A * w - b).norm(); };
  if (m == 1) {
    r.weights = Eigen::VectorXd::Ones(1);
    r.residual = residual(r.weights);
    r.kkt = true;
    return r;
  }
  const Eigen::MatrixXd Q = A.transpose() * A;
  const Eigen::VectorXd c = A.transpose() * b;
  const double L = std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(),
                            1e-300);

  // Accelerated projected gradient.
  Eigen::VectorXd w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd z = w;
  double t = 1.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const Eigen::VectorXd next = project_simplex(z - (Q * z - c) / L);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / tn) * (next - w);
    const double step = (next - w).norm();
    w = next;
    t = tn;
    if (step < tol) break;
  }
  r.iterations = it;
  r.weights = w;
  r.residual = residual(w);

  // Active-set polishing to the exact minimizer.
  std::vector<int> support;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (w[i] > 1e-10) support.push_back(static_cast<int>(i));
  }
  for (int round = 0; round < 2 * static_cast<int>(m) + 2 && !support.empty(); ++round) {
    Eigen::VectorXd ws;
    double nu = 0.0;
    if (!solve_on_support(Q, c, support, ws, nu)) break;
    int worst = -1;
    for (int i : support) {
      if (ws[i] < -1e-14 && (worst < 0 || ws[i] < ws[worst])) worst = i;
    }
    if (worst >= 0) {
      support.erase(std::find(support.begin(), support.end(), worst));
      continue;
    }
    ws = ws.cwiseMax(0.0);
    ws /= ws.sum();
    const Eigen::VectorXd g = Q * ws - c;
    int add = -1;
    double viol = -1e-12 * (1.0 + std::abs(nu));
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::find(support.begin(), support.end(), static_cast<int>(i)) != support.end()) continue;
      const double slack = g[i] + nu;
      if (slack < viol) {
        viol = slack;
        add = static_cast<int>(i);
      }
    }
    if (add >= 0) {
      support.push_back(add);
      std::sort(support.begin(), support.end());
      continue;
    }
    const double res = residual(ws);
    if (res <= r.residual + 1e-14) {
      r.weights = ws;
      r.residual = res;
    }
    r.kkt = true;
    break;
  }
  return r;
}

}  // namespace tvr
