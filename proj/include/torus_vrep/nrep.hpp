#pragma once

// Explicit N-representability witness: a Slater determinant of orbitals
// phi_k = sqrt(rho/N) exp(i k f), f(x) = (2 pi / N) int_0^x rho, k = 0..N-1,
// whose density is exactly rho.

#include <vector>

#include "torus_vrep/manybody.hpp"

namespace tvr {

struct TBoundConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};

/// T <= c1 + c2 * A for the constructed determinant, with S = sum_{k<N} k^2:
/// c1 = 6 pi^2 S, c2 = 1/2 + 12 pi^2 S / N.
TBoundConstants tbound_constants(int n);

struct NRepConstruction {
  int n = 0;
  int grid = 0;
  std::vector<double> x;
  std::vector<double> phase;                   // f(x_m)
  std::vector<std::vector<cplx>> orbitals;     // orbitals[k][m]
  std::vector<double> rho_in;
  std::vector<double> rho_reconstructed;
  double reconstruction_error = 0.0;  // max |rho_rec - rho|
  double gram_error = 0.0;            // max |<phi_j, phi_l> - delta_jl|
  double periodicity_error = 0.0;     // max_k |phi_k(1) - phi_k(0)|
  double A = 0.0;
  double rho_cubed = 0.0;             // int rho^3
  std::vector<double> orbital_kinetic;  // ||grad phi_k||^2
  double kinetic = 0.0;                 // T = 1/2 sum_k ||grad phi_k||^2
  TBoundConstants bounds;

  double bound() const { return bounds.c1 + bounds.c2 * A; }
};

/// grid = 0 picks max(256, oversampled grid of rho).
NRepConstruction construct(const DensityField& rho, int grid = 0, const Numerics& num = default_numerics());

struct NRepProjection {
  ManyBodyState state;  // unnormalized Galerkin projection (spin-up orbitals)
  double loss = 0.0;    // 1 - ||projection||^2
};

NRepProjection project(const NRepConstruction& c, const ModelSpec& spec);

}  // namespace tvr
