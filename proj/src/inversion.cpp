#include "torus_vrep/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torus_vrep/simplex_ls.hpp"

namespace tvr {

double l2_distance(const TorusFunction& a, const TorusFunction& b) {
  const int kc = std::max(a.cutoff(), b.cutoff());
  double s = 0.0;
  for (int k = -kc; k <= kc; ++k) s += std::norm(a[k] - b[k]);
  return std::sqrt(s);
}

EnsembleMatch ensemble_match(const TorusFunction& target, const std::vector<TorusFunction>& densities) {
  if (densities.empty()) throw std::invalid_argument("ensemble match needs at least one density");
  int kc = target.cutoff();
  for (const auto& d : densities) kc = std::max(kc, d.cutoff());
  const Eigen::Index rows = 2 * (2 * kc + 1);
  auto flatten = [&](const TorusFunction& f) {
    Eigen::VectorXd out(rows);
    for (int k = -kc; k <= kc; ++k) {
      out[2 * (k + kc)] = f[k].real();
      out[2 * (k + kc) + 1] = f[k].imag();
    }
    return out;
  };
  Eigen::MatrixXd A(rows, static_cast<Eigen::Index>(densities.size()));
  for (std::size_t j = 0; j < densities.size(); ++j) A.col(static_cast<Eigen::Index>(j)) = flatten(densities[j]);
  const auto ls = simplex_least_squares(A, flatten(target));

  EnsembleMatch m;
  m.density = TorusFunction(kc);
  for (std::size_t j = 0; j < densities.size(); ++j) {
    m.weights.push_back(ls.weights[static_cast<Eigen::Index>(j)]);
    m.density += densities[j] * ls.weights[static_cast<Eigen::Index>(j)];
  }
  m.residual = l2_distance(m.density, target);
  return m;
}

EnsembleMatch ensemble_match(const DensityField& target, const GroundStateResult& result) {
  std::vector<TorusFunction> d;
  for (const auto& r : result.densities) d.push_back(r.profile());
  return ensemble_match(target.profile(), d);
}

PotentialClass analytic_invert(const DensityField& rho, int cutoff, const Numerics& num) {
  if (rho.n_particles() != 1) throw std::invalid_argument("analytic inversion needs N = 1");
  if (!rho.strictly_positive()) throw std::invalid_argument("analytic inversion needs a strictly positive density");
  const int grid = std::max(256, oversampled_grid(std::max(rho.cutoff(), cutoff), num));
  auto s = rho.profile().real_samples(grid);
  for (auto& x : s) x = std::sqrt(x);
  const auto root = transform(std::span<const double>(s), max_cutoff(grid));
  const auto lap = root.derivative().derivative().real_samples(grid);
  std::vector<double> v(static_cast<std::size_t>(grid));
  for (int m = 0; m < grid; ++m) v[m] = 0.5 * lap[m] / s[m];
  return PotentialClass(transform(std::span<const double>(v), cutoff));
}

double witness_kinetic(const DensityField& rho, bool spinful, const Numerics& num) {
  const int n = rho.n_particles();
  if (!spinful || n == 1) return construct(rho, 0, num).kinetic;
  double t = 0.0;
  for (int part : {(n + 1) / 2, n / 2}) {
    const DensityField channel = make_density(rho.profile() * (static_cast<double>(part) / n), part, num);
    t += construct(channel, 0, num).kinetic;
  }
  return t;
}

namespace {

struct PenaltyState {
  ManyBodyState psi;
  double energy = 0.0;
  TorusFunction diff;
  double objective = 0.0;
};

}  // namespace

PenaltyResult penalty_search(const DensityField& rho, const ModelSpec& spec, double mu, const PenaltyOptions& opts) {
  if (mu < 0.0) throw std::invalid_argument("penalty weight must be nonnegative");
  spec.validate();
  auto basis = build_basis(spec, false);
  const FormMatrix H0 = assemble(spec, PotentialClass(), basis);
  const int K = spec.cutoff;

  auto evaluate = [&](ManyBodyState psi) {
    PenaltyState s;
    psi.normalize();
    s.energy = expectation(H0, psi);
    s.diff = density_coefficients(psi) - rho.profile();
    const double d = l2_distance(s.diff, TorusFunction(0));
    s.objective = s.energy + mu * d * d;
    s.psi = std::move(psi);
    return s;
  };

  std::vector<ManyBodyState> starts;
  {
    GroundStateOptions go;
    go.momentum_blocks = false;
    go.prune = false;
    const auto gs = solve(spec, PotentialClass(), go);
    starts.push_back(ManyBodyState{basis, gs.states.front().amplitudes});
  }
  if (rho.strictly_positive()) {
    try {
      auto proj = project(construct(rho), spec);
      if (proj.state.norm() > 1e-8) starts.push_back(ManyBodyState{basis, proj.state.amplitudes});
    } catch (const std::invalid_argument&) {
    }
  }
  std::mt19937_64 rng(opts.seed);
  while (static_cast<int>(starts.size()) < std::max(1, opts.starts)) starts.push_back(random_state(basis, rng, 0.01));

  PenaltyResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (auto& start : starts) {
    PenaltyState cur = evaluate(start);
    double tau = 1.0 / std::max(1.0, 2.0 * kPi * kPi * K * K * spec.n + 2.0 * mu);
    int it = 0;
    bool stagnated = false;
    for (; it < opts.max_iterations; ++it) {
      TorusFunction veff = (2.0 * mu) * cur.diff.with_cutoff(2 * K);
      const FormMatrix Heff = assemble(spec, PotentialClass(veff), basis);
      Eigen::VectorXcd hpsi = tvr::apply(Heff, cur.psi.amplitudes);
      const cplx lambda = cur.psi.amplitudes.dot(hpsi);
      const Eigen::VectorXcd r = hpsi - lambda * cur.psi.amplitudes;
      const double g2 = r.squaredNorm();
      if (std::sqrt(g2) < opts.grad_tol * (1.0 + std::abs(cur.objective))) break;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        ManyBodyState trial{basis, cur.psi.amplitudes - tau * r};
        PenaltyState next = evaluate(trial);
        if (next.objective <= cur.objective - 2e-4 * tau * g2) {
          cur = std::move(next);
          tau *= 2.0;
          accepted = true;
          break;
        }
        tau *= 0.5;
      }
      if (!accepted) {
        stagnated = true;
        break;
      }
    }
    if (cur.objective < best.objective) {
      best.objective = cur.objective;
      best.value = cur.energy;
      best.mismatch = l2_distance(cur.diff, TorusFunction(0));
      best.iterations = it;
      best.stagnated = stagnated;
    }
  }
  return best;
}

DualEvaluation evaluate_dual(const DensityField& rho, const ModelSpec& spec, const PotentialClass& v,
                             const GroundStateOptions& opts) {
  const auto gs = solve(spec, v, opts);
  const auto m = ensemble_match(rho, gs);
  DualEvaluation d;
  d.energy = gs.energy;
  d.G = gs.energy - pair(v, rho);
  d.matched = m.density;
  d.weights = m.weights;
  d.mismatch = m.residual;
  return d;
}

Certificate certificate(const DensityField& rho, const PotentialClass& v, const ModelSpec& spec,
                        const InversionOptions& opts) {
  Certificate c;
  c.mismatch = evaluate_dual(rho, spec, v, opts.ground).mismatch;
  const auto conv = converge_cutoff(spec, v, spec.cutoff + opts.refine_extra, opts.refine_tol, 4, opts.ground);
  c.refined_cutoff = conv.cutoff;
  c.refined_converged = conv.converged;
  c.D = conv.energy - pair(v, rho);
  if (spec.interaction.is_none() && rho.strictly_positive()) {
    c.P = witness_kinetic(rho, spec.spinful, opts.ground.numerics);
    c.primal_source = "nrep";
  } else {
    c.P = penalty_search(rho, spec, opts.penalty_mu, opts.penalty).value;
    c.primal_source = "penalty";
  }
  c.gap = c.P - c.D;
  c.weak_duality = c.D <= c.P + 1e-8;
  c.accepted = c.weak_duality && c.gap <= opts.tol_cert && c.mismatch <= opts.tol_rho;
  return c;
}

namespace {

PotentialClass to_potential(const Eigen::VectorXd& x, int kv) {
  TorusFunction v(kv);
  for (int k = 1; k <= kv; ++k) {
    const cplx c{x[2 * (k - 1)], x[2 * (k - 1) + 1]};
    v.at(k) = c;
    v.at(-k) = std::conj(c);
  }
  return PotentialClass(v);
}

Eigen::VectorXd to_vector(const PotentialClass& v, int kv) {
  Eigen::VectorXd x(2 * kv);
  for (int k = 1; k <= kv; ++k) {
    x[2 * (k - 1)] = v[k].real();
    x[2 * (k - 1) + 1] = v[k].imag();
  }
  return x;
}

}  // namespace

InversionResult lieb_maximize(const DensityField& rho, const ModelSpec& spec, const InversionOptions& opts) {
  spec.validate();
  if (rho.n_particles() != spec.n) throw std::invalid_argument("density and model disagree on N");
  const int kv = opts.potential_cutoff > 0 ? opts.potential_cutoff : std::max(spec.cutoff, rho.cutoff());
  if (rho.cutoff() > kv) throw std::invalid_argument("density cutoff exceeds potential cutoff");
  if (!rho.strictly_positive()) throw std::invalid_argument("inversion needs a strictly positive density");

  InversionResult res;
  if (rho.eta() < 1e-3 * rho.n_particles()) {
    res.warnings.push_back("density minimum " + std::to_string(rho.eta()) + " is close to zero; expect ill-conditioning");
  }

  PotentialClass v0 = PotentialClass(TorusFunction(kv));
  if (opts.initial) {
    v0 = PotentialClass(opts.initial->coefficients().with_cutoff(kv));
  } else if (opts.analytic_start && spec.n == 1 && spec.interaction.is_none()) {
    v0 = analytic_invert(rho, kv, opts.ground.numerics);
  }

  const Eigen::Index dim = 2 * kv;
  Eigen::VectorXd weight(dim);
  for (int k = 1; k <= kv; ++k) weight[2 * (k - 1)] = weight[2 * (k - 1) + 1] = 1.0 + kTwoPi * kTwoPi * k * k;

  struct Point {
    Eigen::VectorXd x;
    DualEvaluation eval;
    double G = 0.0;  // including the proximal term
    Eigen::VectorXd grad;
  };
  auto evaluate = [&](const Eigen::VectorXd& x) {
    Point p;
    p.x = x;
    p.eval = evaluate_dual(rho, spec, to_potential(x, kv), opts.ground);
    p.grad.resize(dim);
    double prox = 0.0;
    for (int k = 1; k <= kv; ++k) {
      const cplx d = p.eval.matched[k] - rho.profile()[k];
      p.grad[2 * (k - 1)] = 2.0 * d.real();
      p.grad[2 * (k - 1) + 1] = 2.0 * d.imag();
    }
    if (opts.proximal > 0.0) {
      for (Eigen::Index i = 0; i < dim; ++i) {
        prox += x[i] * x[i] / weight[i];
        p.grad[i] -= 2.0 * opts.proximal * x[i] / weight[i];
      }
    }
    p.G = p.eval.G - opts.proximal * prox;
    return p;
  };

  Point cur = evaluate(to_vector(v0, kv));
  Eigen::MatrixXd Hinv = Eigen::MatrixXd::Zero(dim, dim);
  auto reset = [&] {
    Hinv.setZero();
    for (int k = 1; k <= kv; ++k) {
      Hinv(2 * (k - 1), 2 * (k - 1)) = Hinv(2 * (k - 1) + 1, 2 * (k - 1) + 1) = kPi * kPi * k * k / (2.0 * spec.n);
    }
  };
  reset();

  int iter = 0, flat = 0;
  res.trace.push_back({0, cur.eval.G, cur.eval.mismatch, 0.0});
  while (cur.eval.mismatch > opts.tol_rho && iter < opts.max_iterations) {
    ++iter;
    Eigen::VectorXd dir = Hinv * cur.grad;
    double slope = cur.grad.dot(dir);
    if (!(slope > 0.0)) {
      reset();
      dir = Hinv * cur.grad;
      slope = cur.grad.dot(dir);
    }
    double t = 1.0;
    bool accepted = false;
    Point next;
    for (int ls = 0; ls < 40; ++ls) {
      next = evaluate(cur.x + t * dir);
      if (next.G >= cur.G + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      reset();
      dir = Hinv * cur.grad;
      slope = cur.grad.dot(dir);
      t = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        next = evaluate(cur.x + t * dir);
        if (next.G >= cur.G + 1e-4 * t * slope) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
    }
    if (!accepted) {
      res.warnings.push_back("line search stagnated at iteration " + std::to_string(iter));
      break;
    }
    const Eigen::VectorXd s = next.x - cur.x;
    const Eigen::VectorXd y = cur.grad - next.grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double r = 1.0 / sy;
      const Eigen::VectorXd hy = Hinv * y;
      Hinv += (r * r * y.dot(hy) + r) * (s * s.transpose()) - r * (hy * s.transpose() + s * hy.transpose());
    }
    const double rise = next.G - cur.G;
    cur = std::move(next);
    res.trace.push_back({iter, cur.eval.G, cur.eval.mismatch, t});
    flat = rise <= 1e-14 * (1.0 + std::abs(cur.G)) ? flat + 1 : 0;
    if (flat >= 5) {
      res.warnings.push_back("dual value stagnated at iteration " + std::to_string(iter));
      break;
    }
  }

  res.potential = to_potential(cur.x, kv);
  res.mismatch = cur.eval.mismatch;
  res.weights = cur.eval.weights;
  res.matched_density = cur.eval.matched;
  res.iterations = iter;
  res.converged = cur.eval.mismatch <= opts.tol_rho;
  if (!res.converged) {
    res.warnings.push_back("inversion did not reach tol_rho; final mismatch " + std::to_string(cur.eval.mismatch));
  }
  res.cert = certificate(rho, res.potential, spec, opts);
  res.dual_value = res.cert.D;
  res.primal_value = res.cert.P;
  if (!res.cert.weak_duality) res.warnings.push_back("weak duality violated: D exceeds P");
  return res;
}

}  // namespace tvr
