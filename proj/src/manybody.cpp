#include "torus_vrep/manybody.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace tvr {

namespace {

// Fermionic sign conventions: operators act on a sorted occupation list;
// the sign is (-1)^(number of occupied orbitals preceding the slot).
int annihilate(std::vector<int>& occ, int o) {
  auto it = std::lower_bound(occ.begin(), occ.end(), o);
  if (it == occ.end() || *it != o) return 0;
  const auto pos = it - occ.begin();
  occ.erase(it);
  return (pos % 2) ? -1 : 1;
}

int create(std::vector<int>& occ, int o) {
  auto it = std::lower_bound(occ.begin(), occ.end(), o);
  if (it != occ.end() && *it == o) return 0;
  const auto pos = it - occ.begin();
  occ.insert(it, o);
  return (pos % 2) ? -1 : 1;
}

}  // namespace

Interaction Interaction::gaudin(int cutoff) {
  TorusFunction g(cutoff);
  g.at(0) = 0.5;
  for (int q = 1; q <= cutoff; ++q) {
    g.at(q) = cplx{0.0, -1.0 / (kTwoPi * q)};
    g.at(-q) = cplx{0.0, 1.0 / (kTwoPi * q)};
  }
  return gradient(g);
}

cplx Interaction::transfer(int q, int orbital_cutoff) const {
  switch (kind) {
    case InteractionKind::None: return {};
    case InteractionKind::Delta: return std::abs(q) <= 2 * orbital_cutoff ? cplx{strength, 0.0} : cplx{};
    case InteractionKind::Multiplicative: return coefficients[q];
    case InteractionKind::Gradient: return cplx{0.0, kTwoPi * q} * coefficients[q];
  }
  return {};
}

int Interaction::transfer_cutoff(int orbital_cutoff) const {
  switch (kind) {
    case InteractionKind::None: return 0;
    case InteractionKind::Delta: return 2 * orbital_cutoff;
    default: return coefficients.cutoff();
  }
}

bool Interaction::nonnegative() const {
  return kind == InteractionKind::None || (kind == InteractionKind::Delta && strength >= 0.0);
}

std::string to_string(InteractionKind k) {
  switch (k) {
    case InteractionKind::None: return "none";
    case InteractionKind::Multiplicative: return "multiplicative";
    case InteractionKind::Delta: return "delta";
    case InteractionKind::Gradient: return "gradient";
  }
  return "?";
}

void ModelSpec::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");
  if (n > orbital_count()) {
    throw std::invalid_argument("n = " + std::to_string(n) + " exceeds the " + std::to_string(orbital_count()) +
                                " available spin orbitals");
  }
  if (!std::isfinite(interaction.strength)) throw std::invalid_argument("interaction strength must be finite");
}

Basis::Basis(const ModelSpec& spec, bool momentum_blocks)
    : n_(spec.n), cutoff_(spec.cutoff), nspin_(spec.nspin()), norb_(spec.orbital_count()),
      momentum_blocks_(momentum_blocks) {
  spec.validate();
  binom_.assign(static_cast<std::size_t>(norb_ + 1), std::vector<std::size_t>(static_cast<std::size_t>(n_ + 1), 0));
  for (int m = 0; m <= norb_; ++m) {
    binom_[m][0] = 1;
    for (int r = 1; r <= std::min(m, n_); ++r) {
      binom_[m][r] = binom_[m - 1][r - 1] + binom_[m - 1][r];
    }
  }
  dim_ = binom_[norb_][n_];
  if (dim_ > 50'000'000) throw std::invalid_argument("basis dimension " + std::to_string(dim_) + " too large");

  dets_.resize(dim_ * static_cast<std::size_t>(n_));
  kinetic_.resize(dim_);
  block_of_.resize(dim_);
  local_.resize(dim_);

  std::vector<int> c(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) c[i] = i;
  std::vector<std::pair<int, int>> keys(dim_);
  for (std::size_t d = 0; d < dim_; ++d) {
    std::copy(c.begin(), c.end(), dets_.begin() + static_cast<std::ptrdiff_t>(d * n_));
    int p = 0, sz = 0;
    double t = 0.0;
    for (int o : c) {
      const int k = momentum_of(o);
      p += k;
      t += 2.0 * kPi * kPi * k * k;
      if (nspin_ == 2) sz += spin_of(o) == 0 ? 1 : -1;
    }
    kinetic_[d] = t;
    keys[d] = {momentum_blocks_ ? p : 0, sz};
    if (d + 1 == dim_) break;
    int i = 0;
    while (i < n_ && !((i == n_ - 1) ? c[i] + 1 < norb_ : c[i] + 1 < c[i + 1])) ++i;
    ++c[i];
    for (int j = 0; j < i; ++j) c[j] = j;
  }

  std::map<std::pair<int, int>, int> ids;
  for (const auto& k : keys) ids.emplace(k, 0);
  int next = 0;
  for (auto& [k, id] : ids) {
    id = next++;
    Block b;
    b.momentum = k.first;
    b.two_sz = k.second;
    b.min_kinetic = std::numeric_limits<double>::infinity();
    blocks_.push_back(std::move(b));
  }
  for (std::size_t d = 0; d < dim_; ++d) {
    const int b = ids[keys[d]];
    block_of_[d] = b;
    local_[d] = blocks_[b].members.size();
    blocks_[b].members.push_back(d);
    blocks_[b].min_kinetic = std::min(blocks_[b].min_kinetic, kinetic_[d]);
  }
}

std::size_t Basis::rank(std::span<const int> sorted) const {
  std::size_t r = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) r += binom_[sorted[i]][i + 1];
  return r;
}

std::shared_ptr<const Basis> build_basis(const ModelSpec& spec, bool momentum_blocks) {
  return std::make_shared<const Basis>(spec, momentum_blocks);
}

FormMatrix assemble_raw(const ModelSpec& spec, const TorusFunction& v, std::shared_ptr<const Basis> basis,
                        const AssemblyOptions& opts) {
  spec.validate();
  const Basis& B = *basis;
  if (B.n() != spec.n || B.cutoff() != spec.cutoff || B.nspin() != spec.nspin()) {
    throw std::invalid_argument("basis does not match model spec");
  }
  const int K = spec.cutoff;
  bool has_v = false;
  for (int k = 1; k <= v.cutoff(); ++k) has_v = has_v || v[k] != cplx{} || v[-k] != cplx{};
  if (has_v && B.momentum_resolved()) {
    throw std::invalid_argument("momentum-resolved basis requires a translation-invariant Hamiltonian");
  }

  FormMatrix out;
  out.basis = basis;
  if (has_v && v.cutoff() < 2 * K) {
    out.warnings.push_back("potential cutoff " + std::to_string(v.cutoff()) + " below 2K = " +
                           std::to_string(2 * K) + "; momentum transfers beyond it are truncated");
  }
  const auto& W = spec.interaction;
  if (!W.is_none() && W.transfer_cutoff(K) < 2 * K) {
    out.warnings.push_back("interaction cutoff " + std::to_string(W.transfer_cutoff(K)) + " below 2K = " +
                           std::to_string(2 * K));
  }

  std::vector<int> todo = opts.only_blocks;
  if (todo.empty()) {
    for (int b = 0; b < static_cast<int>(B.blocks().size()); ++b) todo.push_back(b);
  }
  out.blocks.resize(todo.size());

  std::vector<cplx> wq(static_cast<std::size_t>(4 * K + 1));
  for (int q = -2 * K; q <= 2 * K; ++q) wq[q + 2 * K] = W.transfer(q, K);
  const double v0 = v[0].real();
  const int n = spec.n;

  detail::parallel_for(static_cast<int>(todo.size()), opts.workers, [&](int t) {
    const int b = todo[t];
    const auto& members = B.blocks()[b].members;
    std::vector<Eigen::Triplet<cplx>> trip;
    std::vector<int> occ, work;
    auto push = [&](std::size_t col, const std::vector<int>& det, cplx value) {
      const std::size_t j = B.rank(det);
      if (B.block_of(j) != b) throw std::logic_error("assembly left its symmetry block");
      trip.emplace_back(static_cast<int>(B.local_index(j)), static_cast<int>(col), value);
    };
    for (std::size_t c = 0; c < members.size(); ++c) {
      const std::size_t i = members[c];
      auto d = B.det(i);
      occ.assign(d.begin(), d.end());
      trip.emplace_back(static_cast<int>(c), static_cast<int>(c), cplx{B.kinetic(i) + n * v0, 0.0});

      if (has_v) {
        for (int o : d) {
          const int k = B.momentum_of(o), s = B.spin_of(o);
          for (int kp = -K; kp <= K; ++kp) {
            if (kp == k) continue;
            const cplx amp = v[kp - k];
            if (amp == cplx{}) continue;
            work = occ;
            int sign = annihilate(work, o);
            sign *= create(work, B.orbital(kp, s));
            if (sign == 0) continue;
            push(c, work, amp * static_cast<double>(sign));
          }
        }
      }

      if (!W.is_none()) {
        for (int i1 = 0; i1 < n; ++i1) {
          for (int i2 = 0; i2 < n; ++i2) {
            if (i1 == i2) continue;
            const int o1 = d[i1], o2 = d[i2];
            const int p = B.momentum_of(o1), r = B.momentum_of(o2);
            const int s1 = B.spin_of(o1), s2 = B.spin_of(o2);
            for (int q = -2 * K; q <= 2 * K; ++q) {
              const cplx w = wq[q + 2 * K];
              if (w == cplx{}) continue;
              const int k1 = p + q, k2 = r - q;
              if (std::abs(k1) > K || std::abs(k2) > K) continue;
              work = occ;
              int sign = annihilate(work, o1);
              sign *= annihilate(work, o2);
              if (sign == 0) continue;
              sign *= create(work, B.orbital(k2, s2));
              if (sign == 0) continue;
              sign *= create(work, B.orbital(k1, s1));
              if (sign == 0) continue;
              push(c, work, 0.5 * w * static_cast<double>(sign));
            }
          }
        }
      }
    }
    const int m = static_cast<int>(members.size());
    SparseMatrixC H(m, m);
    H.setFromTriplets(trip.begin(), trip.end());
    H.prune(cplx{}, 0.0);
    SparseMatrixC diff = H - SparseMatrixC(H.adjoint());
    double scale = 1.0, defect = 0.0;
    for (int k = 0; k < H.outerSize(); ++k) {
      for (SparseMatrixC::InnerIterator it(H, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    }
    for (int k = 0; k < diff.outerSize(); ++k) {
      for (SparseMatrixC::InnerIterator it(diff, k); it; ++it) defect = std::max(defect, std::abs(it.value()));
    }
    if (defect > 1e-12 * scale) {
      throw std::logic_error("assembled block " + std::to_string(b) + " is not Hermitian (defect " +
                             std::to_string(defect) + ")");
    }
    out.blocks[t] = BlockMatrix{b, std::move(H)};
  });
  return out;
}

FormMatrix assemble(const ModelSpec& spec, const PotentialClass& v, std::shared_ptr<const Basis> basis,
                    const AssemblyOptions& opts) {
  return assemble_raw(spec, v.coefficients(), std::move(basis), opts);
}

FormMatrix assemble(const ModelSpec& spec, const PotentialClass& v) {
  return assemble(spec, v, build_basis(spec, v.is_zero()));
}

ManyBodyState basis_state(std::shared_ptr<const Basis> basis, std::span<const int> orbitals) {
  std::vector<int> sorted(orbitals.begin(), orbitals.end());
  std::sort(sorted.begin(), sorted.end());
  if (static_cast<int>(sorted.size()) != basis->n() ||
      std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("basis_state needs n distinct orbitals");
  }
  ManyBodyState s{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()))};
  s.amplitudes[static_cast<Eigen::Index>(basis->rank(sorted))] = 1.0;
  return s;
}

ManyBodyState random_state(std::shared_ptr<const Basis> basis, std::mt19937_64& rng, double damping) {
  std::normal_distribution<double> gauss;
  ManyBodyState s{basis, Eigen::VectorXcd(static_cast<Eigen::Index>(basis->dim()))};
  for (std::size_t i = 0; i < basis->dim(); ++i) {
    const double re = gauss(rng), im = gauss(rng);
    s.amplitudes[static_cast<Eigen::Index>(i)] = cplx{re, im} * std::exp(-damping * basis->kinetic(i));
  }
  s.normalize();
  return s;
}

TorusFunction density_coefficients(const ManyBodyState& psi) {
  const Basis& B = *psi.basis;
  const int K = B.cutoff();
  TorusFunction rho(2 * K);
  std::vector<int> occ, work;
  for (std::size_t i = 0; i < B.dim(); ++i) {
    const cplx ai = psi.amplitudes[static_cast<Eigen::Index>(i)];
    if (ai == cplx{}) continue;
    auto d = B.det(i);
    occ.assign(d.begin(), d.end());
    for (int o : d) {
      rho.at(0) += std::norm(ai);
      const int k = B.momentum_of(o), s = B.spin_of(o);
      for (int kp = -K; kp <= K; ++kp) {
        if (kp == k) continue;
        work = occ;
        int sign = annihilate(work, o);
        sign *= create(work, B.orbital(kp, s));
        if (sign == 0) continue;
        const cplx aj = psi.amplitudes[static_cast<Eigen::Index>(B.rank(work))];
        rho.at(k - kp) += std::conj(aj) * ai * static_cast<double>(sign);
      }
    }
  }
  return rho;
}

DensityField density_from_state(const ManyBodyState& psi, const Numerics& num) {
  return make_density(density_coefficients(psi), psi.basis->n(), num);
}

double kinetic_energy(const ManyBodyState& psi) {
  double t = 0.0;
  for (std::size_t i = 0; i < psi.basis->dim(); ++i) {
    t += std::norm(psi.amplitudes[static_cast<Eigen::Index>(i)]) * psi.basis->kinetic(i);
  }
  return t;
}

Eigen::VectorXcd apply(const FormMatrix& H, const Eigen::VectorXcd& psi) {
  const Basis& B = *H.basis;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (const auto& bm : H.blocks) {
    const auto& members = B.blocks()[bm.block].members;
    Eigen::VectorXcd local(static_cast<Eigen::Index>(members.size()));
    for (std::size_t c = 0; c < members.size(); ++c) local[c] = psi[static_cast<Eigen::Index>(members[c])];
    const Eigen::VectorXcd y = bm.H * local;
    for (std::size_t c = 0; c < members.size(); ++c) out[static_cast<Eigen::Index>(members[c])] = y[c];
  }
  return out;
}

double expectation(const FormMatrix& H, const ManyBodyState& psi) {
  if (H.blocks.size() != H.basis->blocks().size()) {
    throw std::invalid_argument("expectation needs a fully assembled form");
  }
  return psi.amplitudes.dot(tvr::apply(H, psi.amplitudes)).real();
}

}  // namespace tvr
