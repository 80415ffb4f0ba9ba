#pragma once

// Slater-determinant basis over plane-wave spin orbitals and second-quantized
// assembly of H = -1/2 Laplacian + W + V.
//
// Orbital index o = (k + K) * nspin + s, s = 0 (up) or 1 (down).
// Determinants are sorted orbital tuples in colex order, so the global index
// of a determinant is its colex rank.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "torus_vrep/spaces.hpp"

namespace tvr {

enum class InteractionKind { None, Multiplicative, Delta, Gradient };

struct Interaction {
  InteractionKind kind = InteractionKind::None;
  double strength = 0.0;       // delta coupling
  TorusFunction coefficients;  // w_q (multiplicative) or g_q (gradient)

  static Interaction none() { return {}; }
  static Interaction delta(double gamma) { return {InteractionKind::Delta, gamma, {}}; }
  static Interaction multiplicative(TorusFunction w) { return {InteractionKind::Multiplicative, 0.0, std::move(w)}; }
  static Interaction gradient(TorusFunction g) { return {InteractionKind::Gradient, 0.0, std::move(g)}; }
  /// Gradient-type interaction with g(x) = 1 - x on [0,1).
  static Interaction gaudin(int cutoff);

  /// Coefficient of w at momentum transfer q.
  cplx transfer(int q, int orbital_cutoff) const;
  int transfer_cutoff(int orbital_cutoff) const;
  /// True when W is known to be a nonnegative form (none, or delta with gamma >= 0).
  bool nonnegative() const;
  bool is_none() const { return kind == InteractionKind::None; }
};

std::string to_string(InteractionKind k);

struct ModelSpec {
  int n = 1;
  int cutoff = 4;
  bool spinful = false;
  Interaction interaction;

  int nspin() const { return spinful ? 2 : 1; }
  int orbital_count() const { return nspin() * (2 * cutoff + 1); }
  void validate() const;
};

class Basis {
 public:
  struct Block {
    int momentum = 0;  // meaningless when momentum is not resolved
    int two_sz = 0;
    std::vector<std::size_t> members;
    double min_kinetic = 0.0;
  };

  Basis(const ModelSpec& spec, bool momentum_blocks);

  int n() const { return n_; }
  int cutoff() const { return cutoff_; }
  int nspin() const { return nspin_; }
  int orbital_count() const { return norb_; }
  std::size_t dim() const { return dim_; }
  bool momentum_resolved() const { return momentum_blocks_; }

  int orbital(int k, int s) const { return (k + cutoff_) * nspin_ + s; }
  int momentum_of(int o) const { return o / nspin_ - cutoff_; }
  int spin_of(int o) const { return o % nspin_; }

  std::span<const int> det(std::size_t i) const {
    return {dets_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  /// Colex rank of a sorted orbital tuple.
  std::size_t rank(std::span<const int> sorted) const;

  double kinetic(std::size_t i) const { return kinetic_[i]; }
  const std::vector<Block>& blocks() const { return blocks_; }
  int block_of(std::size_t i) const { return block_of_[i]; }
  std::size_t local_index(std::size_t i) const { return local_[i]; }

 private:
  int n_, cutoff_, nspin_, norb_;
  bool momentum_blocks_;
  std::size_t dim_ = 0;
  std::vector<std::vector<std::size_t>> binom_;
  std::vector<int> dets_;
  std::vector<double> kinetic_;
  std::vector<Block> blocks_;
  std::vector<int> block_of_;
  std::vector<std::size_t> local_;
};

std::shared_ptr<const Basis> build_basis(const ModelSpec& spec, bool momentum_blocks = true);

using SparseMatrixC = Eigen::SparseMatrix<cplx>;

struct BlockMatrix {
  int block = 0;
  SparseMatrixC H;
};

struct FormMatrix {
  std::shared_ptr<const Basis> basis;
  std::vector<BlockMatrix> blocks;
  std::vector<std::string> warnings;
};

struct AssemblyOptions {
  std::vector<int> only_blocks;  // empty means all blocks
  int workers = 1;
};

/// Assemble with the gauge-fixed class v.
FormMatrix assemble(const ModelSpec& spec, const PotentialClass& v, std::shared_ptr<const Basis> basis,
                    const AssemblyOptions& opts = {});
/// Assemble with raw coefficients including v_0 (contributes N v_0 on the diagonal).
FormMatrix assemble_raw(const ModelSpec& spec, const TorusFunction& v, std::shared_ptr<const Basis> basis,
                        const AssemblyOptions& opts = {});
FormMatrix assemble(const ModelSpec& spec, const PotentialClass& v);

struct ManyBodyState {
  std::shared_ptr<const Basis> basis;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
  void normalize() { amplitudes /= amplitudes.norm(); }
};

ManyBodyState basis_state(std::shared_ptr<const Basis> basis, std::span<const int> orbitals);
/// Gaussian amplitudes damped by exp(-damping * kinetic), normalized.
ManyBodyState random_state(std::shared_ptr<const Basis> basis, std::mt19937_64& rng, double damping = 0.0);

/// rho_q = sum_{k,s} <a+_{k-q,s} a_{k,s}>, cutoff 2K.
TorusFunction density_coefficients(const ManyBodyState& psi);
DensityField density_from_state(const ManyBodyState& psi, const Numerics& num = default_numerics());

double kinetic_energy(const ManyBodyState& psi);
/// <psi, H psi> using the block structure of H.
double expectation(const FormMatrix& H, const ManyBodyState& psi);
/// H psi as a global vector.
Eigen::VectorXcd apply(const FormMatrix& H, const Eigen::VectorXcd& psi);

}  // namespace tvr
