// Acceptance criteria, one per invocation: acceptance <1..10>.
// Prints one PASS/FAIL line and exits nonzero on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include "grid_two_body.hpp"
#include "quadrature.hpp"
#include "roots.hpp"
#include "torus_vrep/groundstate.hpp"
#include "torus_vrep/inversion.hpp"
#include "torus_vrep/nrep.hpp"

using namespace tvr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

ModelSpec model(int n, int cutoff, bool spinful = false, Interaction w = {}) {
  ModelSpec s;
  s.n = n;
  s.cutoff = cutoff;
  s.spinful = spinful;
  s.interaction = std::move(w);
  return s;
}

DensityField cosine_density() {
  TorusFunction f(1);
  f.at(0) = 1.0;
  f.at(1) = f.at(-1) = 0.25;
  return make_density(f, 1);
}

TorusFunction random_real_function(int cutoff, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  TorusFunction f(cutoff);
  f.at(0) = g(rng);
  for (int k = 1; k <= cutoff; ++k) {
    const cplx c{g(rng), g(rng)};
    f.at(k) = c;
    f.at(-k) = std::conj(c);
  }
  return f;
}

Outcome delta_decomposition() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto phi = random_real_function(1 + t % 8, rng);
    double at0 = 0.0;
    for (int k = -phi.cutoff(); k <= phi.cutoff(); ++k) at0 += phi[k].real();
    const double v = pair_decomposition([](double) { return 1.0; }, [](double x) { return -x; }, phi);
    worst = std::max(worst, std::abs(v - at0));
  }
  return {worst < 1e-10, fmt("max |<f + g', phi> - phi(0)| = %.3e over 20 test functions", worst)};
}

Outcome closed_loop_single_particle() {
  const auto rho = cosine_density();
  const auto v = analytic_invert(rho, 32);
  const auto r = solve(model(1, 32), v);
  const double err = l2_distance(r.densities.front().profile(), rho.profile());
  return {r.degeneracy() == 1 && err < 1e-6, fmt("||rho_v - rho||_L2 = %.3e at K=32", err)};
}

Outcome lieb_single_particle() {
  const auto rho = cosine_density();
  const auto d = rho.profile().derivative();
  const double a = oracle::integrate([&](double x) {
    const double g = d.evaluate_real(x);
    return g * g / (4.0 * rho(x));
  });
  InversionOptions opts;
  opts.analytic_start = false;
  const auto r = lieb_maximize(rho, model(1, 16), opts);
  const double gap = std::abs(r.cert.P - r.cert.D);
  const double p_err = std::abs(r.cert.P - 0.5 * a);
  return {r.mismatch < 1e-5 && gap < 1e-6 && p_err < 1e-10,
          fmt("mismatch %.3e, |P - D| = %.3e, |P - A/2| = %.3e", r.mismatch, gap, p_err)};
}

Outcome nrep_witness() {
  std::mt19937_64 rng(1004);
  int bad = 0;
  double worst_rec = 0.0, worst_margin = INFINITY;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 3;
    const auto c = construct(random_density(n, 1 + t % 8, rng, 0.02 + 0.1 * (t % 4)));
    worst_rec = std::max(worst_rec, c.reconstruction_error);
    worst_margin = std::min(worst_margin, c.bound() - c.kinetic);
    if (c.reconstruction_error >= 1e-10 || c.kinetic > c.bound()) ++bad;
  }
  return {bad == 0, fmt("%.0f failures, max reconstruction error %.3e, min bound margin %.3e", bad, worst_rec,
                        worst_margin)};
}

Outcome psi_density_estimate() {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> damping(0.0, 2.0);
  int bad = 0, count = 0;
  double worst = INFINITY;
  for (const auto& spec : {model(1, 4), model(2, 3)}) {
    auto basis = build_basis(spec, false);
    for (int t = 0; t < 250; ++t) {
      const auto psi = random_state(basis, rng, damping(rng));
      const auto rho = density_coefficients(psi);
      const auto d = rho.derivative();
      const double a = oracle::integrate([&](double x) {
        const double r = rho.evaluate_real(x), g = d.evaluate_real(x);
        return r > 0.0 ? g * g / (4.0 * r) : 0.0;
      });
      const double margin = 2.0 * kinetic_energy(psi) + 1e-8 - a;
      worst = std::min(worst, margin);
      if (margin < 0.0) ++bad;
      ++count;
    }
  }
  return {bad == 0 && count == 500, fmt("%.0f of %.0f states violate, min margin %.3e", bad, count, worst)};
}

Outcome concavity() {
  const auto rep = concavity_check(model(2, 4), 200, 4, 2.0, 1006);
  return {rep.samples == 200 && rep.pass() && rep.worst_margin >= -1e-9,
          fmt("%.0f triples, %.0f violations, worst margin %.3e", rep.samples, rep.violations, rep.worst_margin)};
}

Outcome klmn_delta_comb() {
  const auto spec = model(2, 3, true);
  const auto v = delta_potential(1.0, 16384);
  const auto b1 = kinetic_bound_estimate(v, 0.1, spec);
  const auto b2 = kinetic_bound_estimate(v, 0.01, spec);
  const auto r1 = validate_kinetic_bound(v, b1.a, b1.b, spec, 500, 1007);
  const auto r2 = validate_kinetic_bound(v, b2.a, b2.b, spec, 500, 1008);
  const auto c1 = shifted_coercivity_check(spec, v, b1.a, b1.b, 500, 1009);
  const auto c2 = shifted_coercivity_check(spec, v, b2.a, b2.b, 500, 1010);
  const bool ok = b1.attained && b2.attained && r1.samples == 500 && r2.samples == 500 && r1.pass() && r2.pass() &&
                  b2.b > b1.b && c1.pass() && c2.pass();
  return {ok, fmt("b_0.1 = %.4g, b_0.01 = %.4g, sample violations %.0f, coercivity violations %.0f", b1.b, b2.b,
                  r1.violations + r2.violations,
                  c1.lower.violations + c1.upper.violations + c2.lower.violations + c2.upper.violations)};
}

Outcome kronig_penney() {
  const double gamma = 5.0;
  const double exact = oracle::kronig_penney_ground(gamma);
  const int k = 32;
  // the zero mode gamma of the comb is removed by the gauge
  const double e = energy(model(1, k), delta_potential(gamma, 2 * k)) + gamma;
  const double err = std::abs(e - exact);
  return {err < 1e-6, fmt("E0 = %.10f, band-edge root %.10f, error %.3e at K=32", e, exact, err)};
}

Outcome delta_interaction() {
  const int k = 192;
  double prev = -INFINITY, worst = 0.0;
  bool monotone = true;
  std::string detail;
  for (double gamma : {1.0, 2.0, 4.0}) {
    const double e = energy(model(2, k, true, Interaction::delta(gamma)), PotentialClass());
    const double grid = oracle::GridTwoBody{64, gamma, {}, {}}.ground_energy();
    const double rel = std::abs(e - grid) / std::abs(grid);
    monotone = monotone && e >= prev;
    prev = e;
    worst = std::max(worst, rel);
    detail += fmt("gamma %.0f: E0 %.6f grid %.6f; ", gamma, e, grid);
  }
  return {monotone && worst < 1e-3, detail + fmt("max relative deviation %.3e", worst)};
}

Outcome englisch_inversion() {
  EnglischParams p;
  double h_min = INFINITY, h_max = 0.0, prev_l2 = 0.0, mismatch48 = INFINITY;
  bool monotone = true;
  std::string detail;
  for (int k : {16, 32, 48}) {
    const auto rho = englisch_density(p, k);
    const auto r = lieb_maximize(rho, model(1, k));
    const double h = norm(r.potential.coefficients(), Space::Hminus1);
    const double l2 = norm(r.potential.coefficients(), Space::L2);
    h_min = std::min(h_min, h);
    h_max = std::max(h_max, h);
    monotone = monotone && l2 > prev_l2;
    prev_l2 = l2;
    if (k == 48) mismatch48 = r.mismatch;
    detail += fmt("K=%.0f: mismatch %.2e, H-1 %.4f, L2 %.3f; ", k, r.mismatch, h, l2);
  }
  const double spread = (h_max - h_min) / h_min;
  return {mismatch48 < 1e-4 && spread < 0.1 && monotone, detail + fmt("H-1 spread %.3f", spread)};
}

struct Criterion {
  const char* name;
  double limit_seconds;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"delta distribution from f = 1, g = -x", 1.0, delta_decomposition},
    {"closed-loop single-particle inversion", 5.0, closed_loop_single_particle},
    {"Lieb maximization for N = 1", 30.0, lieb_single_particle},
    {"N-representability witness and kinetic bound", 60.0, nrep_witness},
    {"density gradient estimate on random states", 60.0, psi_density_estimate},
    {"concavity of the ground energy", 120.0, concavity},
    {"kinetic bound and coercivity for the delta comb", 60.0, klmn_delta_comb},
    {"Kronig-Penney band edge", 5.0, kronig_penney},
    {"delta interaction against a real-space grid", 120.0, delta_interaction},
    {"Englisch density inversion", 120.0, englisch_inversion},
};

}  // namespace

int main(int argc, char** argv) {
  const int n = static_cast<int>(std::size(kCriteria));
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <1..%d>\n", n);
    return 2;
  }
  const int i = std::atoi(argv[1]);
  if (i < 1 || i > n) {
    std::fprintf(stderr, "criterion must be in 1..%d\n", n);
    return 2;
  }
  const auto& c = kCriteria[i - 1];
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < c.limit_seconds;
  const bool pass = o.pass && in_time;
  std::printf("%s criterion %d (%s): %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", i, c.name,
              o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : " exceeded");
  return pass ? 0 : 1;
}
