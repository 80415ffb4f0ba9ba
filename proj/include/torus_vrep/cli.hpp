#pragma once

// Command-line driver: solve, invert, nrep, example, verify.
// Exit codes: 0 success, 2 validation failure, 3 non-convergence.

#include <cstdint>
#include <string>
#include <vector>

namespace tvr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonConvergence = 3;

struct RunConfig {
  std::string subcommand;
  std::string topic;  // example or verify target

  int n = 1;
  int cutoff = 8;
  bool spinful = false;
  std::string interaction = "none";
  double interaction_strength = 1.0;

  std::string potential = "zero";
  std::string potential_file;
  double gamma = 1.0;
  double amplitude = 1.0;
  int potential_cutoff = 0;

  std::string density_file = "-";
  double a = 1.0;
  double b = 0.5;
  double alpha = 0.25;

  double tol_rho = 1e-5;
  double tol_cert = 1e-5;
  double tol_energy = 1e-7;
  int max_iterations = 500;
  double proximal = 0.0;
  double penalty_mu = 1e4;
  int max_cutoff = 0;

  double eps = 0.1;
  double bound_a = -1.0;
  double bound_b = -1.0;
  int samples = 500;
  int grid = 0;

  std::string out = "torus-vrep-out";
  bool svg = false;
  std::uint64_t seed = 0x5eed;
  int workers = 1;
};

/// args excludes the program name.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace tvr
