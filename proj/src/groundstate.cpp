#include "torus_vrep/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "parallel.hpp"

namespace tvr {

namespace {

struct SolvedBlock {
  int block = -1;
  EigenResult eig;
  std::vector<std::string> warnings;
};

SolvedBlock solve_block(const ModelSpec& spec, const PotentialClass& v, std::shared_ptr<const Basis> basis, int b,
                        const GroundStateOptions& opts) {
  AssemblyOptions ao;
  ao.only_blocks = {b};
  FormMatrix form = assemble(spec, v, basis, ao);
  const SparseMatrixC& H = form.blocks.front().H;
  SolvedBlock out;
  out.block = b;
  out.warnings = form.warnings;
  if (H.rows() <= opts.dense_limit) {
    out.eig = dense_eigen(H, opts.deg_rel, opts.deg_abs);
    return out;
  }
  DavidsonOptions d;
  d.nev = opts.krylov_nev;
  d.tol = opts.residual_tol;
  d.seed = opts.seed + static_cast<std::uint64_t>(b);
  for (;;) {
    out.eig = davidson(H, d);
    const auto& ev = out.eig.values;
    const double cut = ev[0] + std::abs(ev[0]) * opts.deg_rel + opts.deg_abs;
    if (ev[ev.size() - 1] > cut || ev.size() >= H.rows()) break;
    d.nev *= 2;
  }
  return out;
}

}  // namespace

GroundStateResult solve(const ModelSpec& spec, const PotentialClass& v, const GroundStateOptions& opts) {
  spec.validate();
  const bool invariant = v.is_zero();
  auto basis = build_basis(spec, opts.momentum_blocks && invariant);
  const auto& blocks = basis->blocks();

  std::vector<int> order(blocks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return blocks[a].min_kinetic < blocks[b].min_kinetic; });

  const bool can_prune = opts.prune && invariant && spec.interaction.nonnegative();
  auto threshold = [&](double e) { return e + std::abs(e) * opts.deg_rel + opts.deg_abs; };

  GroundStateResult res;
  res.basis = basis;
  auto& diag = res.diagnostics;
  diag.dim = basis->dim();
  diag.blocks_total = static_cast<int>(blocks.size());

  std::vector<SolvedBlock> solved;
  double best = std::numeric_limits<double>::infinity();
  double pruned_floor = std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const int workers = std::max(1, opts.workers);
  while (pos < order.size()) {
    if (can_prune && blocks[order[pos]].min_kinetic > threshold(best)) {
      pruned_floor = blocks[order[pos]].min_kinetic;
      diag.blocks_pruned = static_cast<int>(order.size() - pos);
      break;
    }
    std::vector<int> batch;
    while (pos < order.size() && static_cast<int>(batch.size()) < workers) {
      if (can_prune && !batch.empty() && blocks[order[pos]].min_kinetic > threshold(best)) break;
      batch.push_back(order[pos++]);
    }
    std::vector<SolvedBlock> out(batch.size());
    detail::parallel_for(static_cast<int>(batch.size()), workers,
                         [&](int i) { out[i] = solve_block(spec, v, basis, batch[i], opts); });
    for (auto& s : out) {
      best = std::min(best, s.eig.values[0]);
      solved.push_back(std::move(s));
    }
  }
  diag.blocks_solved = static_cast<int>(solved.size());

  res.energy = best;
  const double cut = threshold(best);
  double next = pruned_floor;
  std::vector<std::tuple<double, int, int, std::size_t>> picks;  // (E, block, column, solved index)
  bool dense = false, krylov = false;
  for (std::size_t s = 0; s < solved.size(); ++s) {
    const auto& e = solved[s].eig;
    dense = dense || e.method == "dense";
    krylov = krylov || e.method == "davidson";
    diag.h_norm = std::max(diag.h_norm, e.h_norm);
    for (Eigen::Index j = 0; j < e.values.size(); ++j) {
      if (e.values[j] <= cut) {
        if (j < e.vectors.cols()) picks.emplace_back(e.values[j], solved[s].block, static_cast<int>(j), s);
      } else {
        next = std::min(next, e.values[j]);
        break;
      }
    }
    for (const auto& w : solved[s].warnings) {
      if (std::find(diag.warnings.begin(), diag.warnings.end(), w) == diag.warnings.end()) diag.warnings.push_back(w);
    }
  }
  diag.method = dense && krylov ? "dense+davidson" : (krylov ? "davidson" : "dense");
  std::sort(picks.begin(), picks.end());
  res.gap = next - best;
  res.gap_is_lower_bound = diag.blocks_pruned > 0 && pruned_floor <= next;

  for (const auto& [e, b, j, s] : picks) {
    const auto& members = blocks[b].members;
    ManyBodyState st{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()))};
    for (std::size_t c = 0; c < members.size(); ++c) {
      st.amplitudes[static_cast<Eigen::Index>(members[c])] = solved[s].eig.vectors(static_cast<Eigen::Index>(c), j);
    }
    st.normalize();
    diag.max_residual = std::max(diag.max_residual, solved[s].eig.residuals[j]);
    res.states.push_back(std::move(st));
    res.state_energies.push_back(e);
    res.state_blocks.push_back(b);
    res.densities.push_back(density_from_state(res.states.back(), opts.numerics));
  }
  if (diag.max_residual > opts.residual_tol * std::max(diag.h_norm, 1.0)) {
    diag.warnings.push_back("ground-state residual " + std::to_string(diag.max_residual) + " above tolerance");
  }
  return res;
}

double energy(const ModelSpec& spec, const PotentialClass& v, const GroundStateOptions& opts) {
  return solve(spec, v, opts).energy;
}

CutoffConvergence converge_cutoff(ModelSpec spec, const PotentialClass& v, int max_cutoff, double tol, int step,
                                  const GroundStateOptions& opts) {
  CutoffConvergence c;
  double prev = energy(spec, v, opts);
  c.cutoffs.push_back(spec.cutoff);
  c.energies.push_back(prev);
  c.cutoff = spec.cutoff;
  c.energy = prev;
  c.change = std::numeric_limits<double>::infinity();
  while (spec.cutoff + step <= max_cutoff) {
    spec.cutoff += step;
    const double e = energy(spec, v, opts);
    c.cutoffs.push_back(spec.cutoff);
    c.energies.push_back(e);
    c.change = std::abs(e - prev);
    c.cutoff = spec.cutoff;
    c.energy = e;
    prev = e;
    if (c.change < tol) {
      c.converged = true;
      break;
    }
  }
  return c;
}

KineticBound kinetic_bound_estimate(const PotentialClass& v, double eps, const ModelSpec& spec, int max_mode,
                                    const Numerics& num) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const auto [f, g] = decompose_potential(v);
  const int kv = v.cutoff();
  const double c = embedding_constant();

  // tail[n] = ||h - h_n||_{L2}
  auto tails = [kv](const TorusFunction& h) {
    std::vector<double> t(static_cast<std::size_t>(kv + 1), 0.0);
    double acc = 0.0;
    for (int n = kv; n >= 0; --n) {
      t[n] = std::sqrt(acc);
      acc += std::norm(h[n]) + (n > 0 ? std::norm(h[-n]) : 0.0);
    }
    return t;
  };
  const auto tf = tails(f), tg = tails(g);
  auto term = [&](int n) { return 2.0 * c * tg[n] + c * tf[n]; };

  const int limit = max_mode < 0 ? kv : std::min(max_mode, kv);
  KineticBound kb;
  kb.a = eps;
  kb.c_emb = c;
  kb.attainable = 2.0 * term(limit);
  kb.attained = false;
  int n = limit;
  for (int m = 0; m <= limit; ++m) {
    if (2.0 * term(m) <= eps) {
      n = m;
      kb.attained = true;
      break;
    }
  }
  kb.mode = n;
  kb.prefactor = 2.0 * term(n);
  const double sup = norm(f.with_cutoff(n), Space::Linf, num) + norm(g.with_cutoff(n).derivative(), Space::Linf, num);
  kb.b = spec.n * sup + term(n) * spec.n;
  return kb;
}

std::vector<ManyBodyState> sample_states(std::shared_ptr<const Basis> basis, int count, std::uint64_t seed) {
  std::vector<ManyBodyState> out;
  const std::size_t dim = basis->dim();
  std::vector<std::size_t> idx(dim);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return basis->kinetic(a) < basis->kinetic(b); });
  const int determinants = std::min<int>(count / 10, static_cast<int>(dim));
  for (int i = 0; i < determinants; ++i) {
    ManyBodyState s{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim))};
    s.amplitudes[static_cast<Eigen::Index>(idx[i])] = 1.0;
    out.push_back(std::move(s));
  }
  std::mt19937_64 rng(seed);
  const double damping[] = {0.0, 1e-3, 1e-2, 3e-2, 1e-1};
  for (int i = determinants; i < count; ++i) out.push_back(random_state(basis, rng, damping[i % 5]));
  return out;
}

SampleReport validate_kinetic_bound(const PotentialClass& v, double a, double b, const ModelSpec& spec, int samples,
                                    std::uint64_t seed) {
  auto basis = build_basis(spec, false);
  SampleReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& psi : sample_states(basis, samples, seed)) {
    const double lhs = std::abs(pair(v, density_coefficients(psi)));
    const double margin = a * kinetic_energy(psi) + b - lhs;
    ++rep.samples;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -1e-12 * (1.0 + lhs)) ++rep.violations;
  }
  return rep;
}

CoercivityReport shifted_coercivity_check(const ModelSpec& spec, const PotentialClass& v, double a, double b,
                                          int samples, std::uint64_t seed) {
  if (!(a < 1.0)) throw std::invalid_argument("coercivity check needs a < 1");
  auto basis = build_basis(spec, false);
  const FormMatrix H = assemble(spec, v, basis);
  CoercivityReport rep;
  rep.upper_constant = std::max((1.0 + a) / 2.0, (1.0 - a) / 2.0 + 2.0 * b);
  rep.lower.worst_margin = rep.upper.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& psi : sample_states(basis, samples, seed)) {
    const double t = kinetic_energy(psi);
    const double shifted = expectation(H, psi) + (1.0 - a) / 2.0 + b;
    const double tol = 1e-10 * (1.0 + std::abs(shifted) + t);
    const double lower = shifted - (1.0 - a) / 2.0 * (2.0 * t + 1.0);
    const double upper = rep.upper_constant * (2.0 * t + 1.0) - shifted;
    for (auto [m, r] : {std::pair{lower, &rep.lower}, std::pair{upper, &rep.upper}}) {
      ++r->samples;
      r->worst_margin = std::min(r->worst_margin, m);
      if (m < -tol) ++r->violations;
    }
  }
  return rep;
}

double density_gradient_integral(const TorusFunction& rho, int grid) {
  const int m = grid > 0 ? grid : std::max(1024, 16 * (2 * rho.cutoff() + 1));
  const auto r = rho.real_samples(m);
  const auto d = rho.derivative().real_samples(m);
  double a = 0.0;
  for (int j = 0; j < m; ++j) {
    if (r[j] > 1e-300) a += d[j] * d[j] / (4.0 * r[j]);
  }
  return a / m;
}

SampleReport psi_density_estimate_check(const ModelSpec& spec, int samples, std::uint64_t seed) {
  auto basis = build_basis(spec, false);
  SampleReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& psi : sample_states(basis, samples, seed)) {
    const double t = kinetic_energy(psi);
    const double margin = 2.0 * t - density_gradient_integral(density_coefficients(psi));
    ++rep.samples;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -1e-8) ++rep.violations;
  }
  return rep;
}

SampleReport concavity_check(const ModelSpec& spec, int triples, int potential_cutoff, double amplitude,
                             std::uint64_t seed, const GroundStateOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto random_potential = [&] {
    TorusFunction v(potential_cutoff);
    for (int k = 1; k <= potential_cutoff; ++k) {
      const cplx c{amplitude * u(rng), amplitude * u(rng)};
      v.at(k) = c;
      v.at(-k) = std::conj(c);
    }
    return PotentialClass(v);
  };
  SampleReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double lambdas[] = {0.25, 0.5, 0.75};
  for (int i = 0; i < triples; ++i) {
    const auto v = random_potential();
    const auto w = random_potential();
    const double l = lambdas[i % 3];
    const double mixed = energy(spec, l * v + (1.0 - l) * w, opts);
    const double margin = mixed - (l * energy(spec, v, opts) + (1.0 - l) * energy(spec, w, opts));
    ++rep.samples;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < -1e-9) ++rep.violations;
  }
  return rep;
}

}  // namespace tvr
