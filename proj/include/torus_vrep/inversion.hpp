#pragma once

// Density-to-potential inversion by maximizing G(v) = E(v) - <v, rho>,
// ensemble matching at degenerate points, and duality-gap certificates.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "torus_vrep/groundstate.hpp"
#include "torus_vrep/nrep.hpp"

namespace tvr {

/// L2 distance between two coefficient sets of possibly different cutoff.
double l2_distance(const TorusFunction& a, const TorusFunction& b);

struct EnsembleMatch {
  std::vector<double> weights;
  TorusFunction density;
  double residual = 0.0;  // ||sum_k w_k rho_k - target||_{L2}
};

EnsembleMatch ensemble_match(const TorusFunction& target, const std::vector<TorusFunction>& densities);
EnsembleMatch ensemble_match(const DensityField& target, const GroundStateResult& result);

/// v = (1/2) (sqrt rho)'' / sqrt rho for N = 1, gauge-fixed, truncated at `cutoff`.
PotentialClass analytic_invert(const DensityField& rho, int cutoff, const Numerics& num = default_numerics());

struct PenaltyOptions {
  int starts = 3;
  int max_iterations = 3000;
  double grad_tol = 1e-10;
  std::uint64_t seed = 0x5eed;
};

struct PenaltyResult {
  double value = 0.0;      // <psi, H0 psi> at the best iterate
  double objective = 0.0;  // value + mu ||rho_psi - rho||^2
  double mismatch = 0.0;
  int iterations = 0;
  bool stagnated = false;
};

/// Minimize <psi, H0 psi> + mu ||rho_psi - rho||^2 over normalized psi.
PenaltyResult penalty_search(const DensityField& rho, const ModelSpec& spec, double mu,
                             const PenaltyOptions& opts = {});

/// Kinetic energy of the orbital-construction witness; spinful models split
/// the density evenly between the two spin channels.
double witness_kinetic(const DensityField& rho, bool spinful, const Numerics& num = default_numerics());

struct InversionOptions {
  int potential_cutoff = 0;  // 0 means max(K, density cutoff)
  double tol_rho = 1e-5;
  double tol_cert = 1e-5;
  int max_iterations = 500;
  double proximal = 0.0;  // weight of -(mu/2) ||v||^2_{H^-1}
  bool analytic_start = true;
  std::optional<PotentialClass> initial;
  double penalty_mu = 1e4;
  int refine_extra = 32;
  double refine_tol = 1e-7;
  GroundStateOptions ground;
  PenaltyOptions penalty;
};

struct Certificate {
  double D = 0.0;
  double P = 0.0;
  double gap = 0.0;
  double mismatch = 0.0;
  bool weak_duality = true;
  bool accepted = false;
  std::string primal_source;
  int refined_cutoff = 0;
  bool refined_converged = false;
};

Certificate certificate(const DensityField& rho, const PotentialClass& v, const ModelSpec& spec,
                        const InversionOptions& opts = {});

struct TraceRow {
  int iter = 0;
  double G = 0.0;
  double mismatch = 0.0;
  double step = 0.0;
};

struct InversionResult {
  PotentialClass potential;
  double dual_value = 0.0;
  double primal_value = 0.0;
  double mismatch = 0.0;
  std::vector<double> weights;
  TorusFunction matched_density;
  std::vector<TraceRow> trace;
  bool converged = false;
  int iterations = 0;
  Certificate cert;
  std::vector<std::string> warnings;
};

InversionResult lieb_maximize(const DensityField& rho, const ModelSpec& spec, const InversionOptions& opts = {});

/// G(v) = E(v) - <v, rho> together with its supergradient rho_v - rho.
struct DualEvaluation {
  double G = 0.0;
  double energy = 0.0;
  TorusFunction matched;
  std::vector<double> weights;
  double mismatch = 0.0;
};

DualEvaluation evaluate_dual(const DensityField& rho, const ModelSpec& spec, const PotentialClass& v,
                             const GroundStateOptions& opts = {});

}  // namespace tvr
