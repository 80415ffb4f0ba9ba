#pragma once

// Ground-state solution E(v) = inf spec(H), degeneracy detection, and
// sampled checks of the kinetic form bounds.

#include <cstdint>
#include <string>
#include <vector>

#include "torus_vrep/eigensolver.hpp"
#include "torus_vrep/manybody.hpp"

namespace tvr {

struct GroundStateOptions {
  bool momentum_blocks = true;  // only used when v = 0
  bool prune = true;            // skip blocks whose kinetic floor lies above E0
  int workers = 1;
  double deg_rel = 1e-8;
  double deg_abs = 1e-10;
  int dense_limit = 5000;
  int krylov_nev = 6;
  double residual_tol = 1e-9;
  std::uint64_t seed = 0x5eed;
  Numerics numerics;
};

struct SolverDiagnostics {
  std::size_t dim = 0;
  int blocks_total = 0;
  int blocks_solved = 0;
  int blocks_pruned = 0;
  std::string method;
  double max_residual = 0.0;
  double h_norm = 0.0;
  std::vector<std::string> warnings;
};

struct GroundStateResult {
  double energy = 0.0;
  std::vector<ManyBodyState> states;
  std::vector<double> state_energies;
  std::vector<int> state_blocks;
  std::vector<DensityField> densities;
  double gap = 0.0;
  bool gap_is_lower_bound = false;
  SolverDiagnostics diagnostics;
  std::shared_ptr<const Basis> basis;

  std::size_t degeneracy() const { return states.size(); }
};

GroundStateResult solve(const ModelSpec& spec, const PotentialClass& v, const GroundStateOptions& opts = {});
double energy(const ModelSpec& spec, const PotentialClass& v, const GroundStateOptions& opts = {});

struct CutoffConvergence {
  std::vector<int> cutoffs;
  std::vector<double> energies;
  bool converged = false;
  int cutoff = 0;
  double energy = 0.0;
  double change = 0.0;
};

/// Raise the orbital cutoff in steps until E changes by less than tol.
CutoffConvergence converge_cutoff(ModelSpec spec, const PotentialClass& v, int max_cutoff, double tol = 1e-7,
                                  int step = 4, const GroundStateOptions& opts = {});

struct KineticBound {
  double a = 0.0;  // requested epsilon
  double b = 0.0;
  int mode = 0;             // truncation index n
  double prefactor = 0.0;   // actual T prefactor 2(2C|g-g_n| + C'|f-f_n|)
  double attainable = 0.0;  // smallest prefactor reachable within max_mode
  bool attained = true;
  double c_emb = 0.0;
};

/// b_eps = N(|f_n|_inf + |grad g_n|_inf) + (2C|g-g_n| + C'|f-f_n|) N with n minimal.
/// max_mode < 0 means the potential cutoff.
KineticBound kinetic_bound_estimate(const PotentialClass& v, double eps, const ModelSpec& spec, int max_mode = -1,
                                    const Numerics& num = default_numerics());

struct SampleReport {
  int samples = 0;
  int violations = 0;
  double worst_margin = 0.0;  // min over samples of (rhs - lhs)
  bool pass() const { return violations == 0; }
};

/// Checks |<v, rho_psi>| <= a T(psi) + b on sampled states of spec.
SampleReport validate_kinetic_bound(const PotentialClass& v, double a, double b, const ModelSpec& spec, int samples,
                                    std::uint64_t seed);

struct CoercivityReport {
  SampleReport lower;
  SampleReport upper;
  double upper_constant = 0.0;
  bool pass() const { return lower.pass() && upper.pass(); }
};

CoercivityReport shifted_coercivity_check(const ModelSpec& spec, const PotentialClass& v, double a, double b,
                                          int samples, std::uint64_t seed);

/// ||grad sqrt(rho_psi)||^2 = int rho'^2 / (4 rho) by trapezoid on a fine grid.
double density_gradient_integral(const TorusFunction& rho, int grid = 0);

/// Checks ||grad sqrt(rho_psi)||^2 <= 2 T(psi) on sampled states.
SampleReport psi_density_estimate_check(const ModelSpec& spec, int samples, std::uint64_t seed);

/// Checks E(l v + (1-l) v') >= l E(v) + (1-l) E(v') for random band-limited
/// v, v' with coefficients of size up to `amplitude`, l cycling through 1/4, 1/2, 3/4.
SampleReport concavity_check(const ModelSpec& spec, int triples, int potential_cutoff, double amplitude,
                             std::uint64_t seed, const GroundStateOptions& opts = {});

/// Sampled states used by the bound checks: basis determinants of lowest
/// kinetic energy first, then random states with varied damping.
std::vector<ManyBodyState> sample_states(std::shared_ptr<const Basis> basis, int count, std::uint64_t seed);

}  // namespace tvr
