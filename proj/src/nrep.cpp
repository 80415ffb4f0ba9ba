#include "torus_vrep/nrep.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace tvr {

TBoundConstants tbound_constants(int n) {
  if (n < 1) throw std::invalid_argument("particle count must be positive");
  const double s = (n - 1.0) * n * (2.0 * n - 1.0) / 6.0;
  return {6.0 * kPi * kPi * s, 0.5 + 12.0 * kPi * kPi * s / n};
}

NRepConstruction construct(const DensityField& rho, int grid, const Numerics& num) {
  if (!(rho.eta() > 0.0) || !rho.strictly_positive()) {
    throw std::invalid_argument("construction needs a strictly positive density (eta = " + std::to_string(rho.eta()) +
                                ")");
  }
  const int n = rho.n_particles();
  const TorusFunction& p = rho.profile();
  NRepConstruction c;
  c.n = n;
  c.grid = grid > 0 ? grid : std::max(256, oversampled_grid(p.cutoff(), num));
  if (c.grid < 2 * p.cutoff() + 1) throw ResolutionError("grid too coarse for density cutoff");
  const int m = c.grid;
  c.x = grid_points(m);

  // Periodic part of the antiderivative of rho - N.
  TorusFunction anti(p.cutoff());
  for (int k = -p.cutoff(); k <= p.cutoff(); ++k) {
    if (k != 0) anti.at(k) = p[k] / cplx{0.0, kTwoPi * k};
  }
  const auto periodic = anti.real_samples(m);
  const double at0 = anti.evaluate_real(0.0);
  const double scale = kTwoPi / n;
  c.phase.resize(m);
  for (int j = 0; j < m; ++j) c.phase[j] = kTwoPi * c.x[j] + scale * (periodic[j] - at0);
  const double phase_end = kTwoPi + scale * (anti.evaluate_real(1.0) - at0);

  c.rho_in = p.real_samples(m);
  c.rho_reconstructed.assign(m, 0.0);
  c.orbitals.assign(n, std::vector<cplx>(m));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < m; ++j) {
      const double amp = std::sqrt(std::max(c.rho_in[j], 0.0) / n);
      c.orbitals[k][j] = std::polar(amp, k * c.phase[j]);
      c.rho_reconstructed[j] += std::norm(c.orbitals[k][j]);
    }
    const double amp0 = std::sqrt(rho(0.0) / n);
    const cplx start = std::polar(amp0, k * c.phase[0]);
    const cplx end = std::polar(amp0, k * phase_end);
    c.periodicity_error = std::max(c.periodicity_error, std::abs(end - start));
  }
  for (int j = 0; j < m; ++j) {
    c.reconstruction_error = std::max(c.reconstruction_error, std::abs(c.rho_reconstructed[j] - c.rho_in[j]));
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      cplx g{};
      for (int j = 0; j < m; ++j) g += std::conj(c.orbitals[a][j]) * c.orbitals[b][j];
      g /= static_cast<double>(m);
      c.gram_error = std::max(c.gram_error, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  }

  c.A = von_weizsaecker_integral(p, m);
  c.rho_cubed = multiply(multiply(p, p), p)[0].real();
  c.orbital_kinetic.resize(n);
  c.kinetic = 0.0;
  for (int k = 0; k < n; ++k) {
    const double w = kTwoPi * k / n;
    c.orbital_kinetic[k] = (c.A + w * w * c.rho_cubed) / n;
    c.kinetic += 0.5 * c.orbital_kinetic[k];
  }
  c.bounds = tbound_constants(n);
  return c;
}

NRepProjection project(const NRepConstruction& c, const ModelSpec& spec) {
  if (spec.n != c.n) throw std::invalid_argument("projection needs a model with the same particle count");
  const int K = spec.cutoff;
  if (c.grid < 2 * K + 1) throw ResolutionError("construction grid too coarse for the model cutoff");
  auto basis = build_basis(spec, false);
  Eigen::MatrixXcd coef(2 * K + 1, c.n);
  for (int j = 0; j < c.n; ++j) {
    const auto f = transform(std::span<const cplx>(c.orbitals[j]), K);
    for (int k = -K; k <= K; ++k) coef(k + K, j) = f[k];
  }
  NRepProjection out{ManyBodyState{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()))}, 0.0};
  Eigen::MatrixXcd minor(c.n, c.n);
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    auto d = basis->det(i);
    if (std::any_of(d.begin(), d.end(), [&](int o) { return basis->spin_of(o) != 0; })) continue;
    for (int r = 0; r < c.n; ++r) minor.row(r) = coef.row(basis->momentum_of(d[r]) + K);
    out.state.amplitudes[static_cast<Eigen::Index>(i)] = minor.determinant();
  }
  out.loss = 1.0 - out.state.amplitudes.squaredNorm();
  return out;
}

}  // namespace tvr
