#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "torus_vrep/inversion.hpp"

using namespace tvr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelSpec model(int n, int K, bool spinful = false, Interaction w = Interaction::none()) {
  ModelSpec s;
  s.n = n;
  s.cutoff = K;
  s.spinful = spinful;
  s.interaction = std::move(w);
  return s;
}

DensityField cosine_density(int n = 1) {
  TorusFunction f(1);
  f.at(0) = 1.0;
  f.at(1) = f.at(-1) = 0.25;
  return make_density(f, n);
}

TorusFunction random_function(int cutoff, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TorusFunction v(cutoff);
  for (int k = 1; k <= cutoff; ++k) {
    const cplx c{amplitude * u(rng), amplitude * u(rng)};
    v.at(k) = c;
    v.at(-k) = std::conj(c);
  }
  return v;
}

double hminus1_distance(const PotentialClass& a, const PotentialClass& b) {
  const int kc = std::max(a.cutoff(), b.cutoff());
  return norm(a.coefficients().with_cutoff(kc) - b.coefficients().with_cutoff(kc), Space::Hminus1);
}

}  // namespace

TEST_CASE("analytic inversion of a constant density is zero") {
  const auto v = analytic_invert(make_density(TorusFunction::constant(1.0), 1), 8);
  CHECK(norm(v.coefficients(), Space::L2) < 1e-14);
}

TEST_CASE("analytic inversion closes the loop for 1 + 0.5 cos") {
  const auto rho = cosine_density();
  const auto v = analytic_invert(rho, 64);
  const auto r = solve(model(1, 32), v);
  REQUIRE(r.degeneracy() == 1);
  CHECK(l2_distance(r.densities.front().profile(), rho.profile()) < 1e-6);
  // single-particle energy is -<v, rho> + A / 2 at the representing potential
  CHECK_THAT(r.energy - pair(v, rho), WithinAbs(0.5 * rho.von_weizsaecker(), 1e-8));
}

TEST_CASE("analytic inversion validates its input") {
  CHECK_THROWS_AS(analytic_invert(cosine_density(2), 8), std::invalid_argument);
  TorusFunction touching(1);
  touching.at(0) = 1.0;
  touching.at(1) = touching.at(-1) = 0.5;
  CHECK_THROWS_AS(analytic_invert(make_density(touching, 1), 8), std::invalid_argument);
}

TEST_CASE("ensemble matching") {
  SECTION("singleton") {
    TorusFunction a(1), t(1);
    a.at(0) = 1.0;
    a.at(1) = a.at(-1) = 0.1;
    t.at(0) = 1.0;
    const auto m = ensemble_match(t, {a});
    REQUIRE(m.weights.size() == 1);
    CHECK(m.weights[0] == 1.0);
    CHECK_THAT(m.residual, WithinAbs(std::sqrt(0.02), 1e-15));
  }
  SECTION("midpoint of two states") {
    TorusFunction a(1), b(1);
    a.at(0) = b.at(0) = 1.0;
    a.at(1) = a.at(-1) = 0.3;
    b.at(1) = b.at(-1) = -0.1;
    const auto m = ensemble_match((a + b) * 0.5, {a, b});
    CHECK_THAT(m.weights[0], WithinAbs(0.5, 1e-12));
    CHECK_THAT(m.weights[1], WithinAbs(0.5, 1e-12));
    CHECK(m.residual < 1e-12);
  }
  SECTION("random three-fold hull members") {
    std::mt19937_64 rng(81);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<TorusFunction> d;
      for (int j = 0; j < 3; ++j) {
        auto f = random_function(4, 0.2, rng);
        f.at(0) = 2.0;
        d.push_back(f);
      }
      double w[3] = {u(rng), u(rng), u(rng)};
      const double s = w[0] + w[1] + w[2];
      const auto target = d[0] * (w[0] / s) + d[1] * (w[1] / s) + d[2] * (w[2] / s);
      const auto m = ensemble_match(target, d);
      CHECK(m.residual < 1e-10);
      CHECK_THAT(m.weights[0] + m.weights[1] + m.weights[2], WithinAbs(1.0, 1e-12));
      for (double x : m.weights) CHECK(x >= 0.0);
    }
  }
  CHECK_THROWS_AS(ensemble_match(TorusFunction(1), std::vector<TorusFunction>{}), std::invalid_argument);
}

TEST_CASE("degenerate free ground state matches a constant density as an ensemble") {
  const auto gs = solve(model(2, 3), PotentialClass());
  REQUIRE(gs.degeneracy() == 2);
  const auto m = ensemble_match(make_density(TorusFunction::constant(1.0), 2), gs);
  CHECK(m.residual < 1e-12);
}

TEST_CASE("penalty search limits") {
  SECTION("constant density reproduces the filled shell") {
    for (int n : {1, 2, 3}) {
      const auto spec = model(n, 3);
      const auto p = penalty_search(make_density(TorusFunction::constant(1.0), n), spec, 100.0);
      CHECK_THAT(p.value, WithinAbs(energy(spec, PotentialClass()), 1e-8));
      CHECK(p.mismatch < 1e-6);
    }
  }
  SECTION("no penalty gives the free ground energy") {
    const auto spec = model(2, 3);
    const auto p = penalty_search(cosine_density(2), spec, 0.0);
    CHECK_THAT(p.value, WithinAbs(energy(spec, PotentialClass()), 1e-8));
  }
  SECTION("single particle value approaches A / 2 as the weight grows") {
    const auto rho = cosine_density();
    const double target = 0.5 * rho.von_weizsaecker();
    double previous = std::numeric_limits<double>::infinity();
    for (double mu : {10.0, 1e3, 1e5}) {
      const auto p = penalty_search(rho, model(1, 8), mu);
      const double err = std::abs(p.value - target);
      CHECK(err < previous);
      previous = err;
    }
    CHECK(previous < 1e-3);
  }
  CHECK_THROWS_AS(penalty_search(cosine_density(), model(1, 2), -1.0), std::invalid_argument);
}

TEST_CASE("witness kinetic energy splits spinful densities by channel") {
  const auto rho = cosine_density(3);
  const double up = construct(make_density(rho.profile() * (2.0 / 3.0), 2)).kinetic;
  const double down = construct(make_density(rho.profile() * (1.0 / 3.0), 1)).kinetic;
  CHECK_THAT(witness_kinetic(rho, true), WithinRel(up + down, 1e-14));
  CHECK_THAT(witness_kinetic(rho, false), WithinRel(construct(rho).kinetic, 1e-14));
  CHECK(witness_kinetic(rho, true) < witness_kinetic(rho, false));
}

TEST_CASE("certificates") {
  SECTION("free particle with constant density") {
    const auto c = certificate(make_density(TorusFunction::constant(1.0), 1), PotentialClass(), model(1, 4));
    CHECK(c.D == 0.0);
    CHECK(c.P == 0.0);
    CHECK(c.gap == 0.0);
    CHECK(c.accepted);
    CHECK(c.primal_source == "nrep");
  }
  SECTION("analytic potential") {
    const auto rho = cosine_density();
    const auto c = certificate(rho, analytic_invert(rho, 32), model(1, 32));
    CHECK(std::abs(c.gap) < 1e-6);
    CHECK(c.mismatch < 1e-6);
    CHECK(c.accepted);
  }
  SECTION("wrong potential is rejected") {
    const auto rho = cosine_density();
    const auto c = certificate(rho, delta_potential(1.0, 16), model(1, 8));
    CHECK(c.gap > 1e-3);
    CHECK(c.weak_duality);
    CHECK_FALSE(c.accepted);
  }
  SECTION("interacting model uses the penalty primal") {
    const auto rho = make_density(TorusFunction::constant(1.0), 2);
    const auto c = certificate(rho, PotentialClass(), model(2, 2, true, Interaction::delta(1.0)));
    CHECK(c.primal_source == "penalty");
    CHECK(c.weak_duality);
  }
}

TEST_CASE("weak duality holds at random potentials") {
  std::mt19937_64 rng(82);
  for (int trial = 0; trial < 10; ++trial) {
    const auto spec = model(1 + trial % 2, 6);
    const auto rho = random_density(spec.n, 3, rng, 0.3);
    const auto c = certificate(rho, PotentialClass(random_function(3, 4.0, rng)), spec);
    CHECK(c.D <= c.P + 1e-8);
    CHECK(c.weak_duality);
    CHECK(0.5 * rho.von_weizsaecker() <= c.P + 1e-8);
  }
}

TEST_CASE("constant density inverts to the zero potential at iteration zero") {
  for (const auto& spec : {model(3, 3), model(2, 3, true, Interaction::delta(2.0))}) {
    const auto r = lieb_maximize(make_density(TorusFunction::constant(1.0), spec.n), spec);
    CHECK(r.iterations == 0);
    CHECK(r.mismatch < 1e-12);
    CHECK(r.potential.is_zero());
    CHECK(r.converged);
  }
}

TEST_CASE("single-particle Lieb maximization matches the analytic inversion") {
  const auto rho = cosine_density();
  const auto spec = model(1, 16);
  InversionOptions opts;
  opts.analytic_start = false;
  const auto r = lieb_maximize(rho, spec, opts);
  CHECK(r.converged);
  CHECK(r.mismatch < 1e-5);
  CHECK(hminus1_distance(r.potential, analytic_invert(rho, 16)) < 1e-4);
  CHECK(std::abs(r.cert.P - r.cert.D) < 1e-6);
  CHECK_THAT(r.cert.P, WithinRel(0.5 * rho.von_weizsaecker(), 1e-12));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].G >= r.trace[i - 1].G);
}

TEST_CASE("two-particle inversion of a forward-solved target") {
  const auto spec = model(2, 4);
  auto basis = build_basis(spec, false);
  ManyBodyState psi{basis, Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->dim()))};
  const int e0 = basis->orbital(0, 0), ep = basis->orbital(1, 0), em = basis->orbital(-1, 0);
  const int a[] = {std::min(e0, ep), std::max(e0, ep)}, b[] = {std::min(e0, em), std::max(e0, em)};
  const double sa = e0 < ep ? 1.0 : -1.0, sb = e0 < em ? 1.0 : -1.0;
  psi.amplitudes[basis->rank(a)] = sa / std::sqrt(2.0);
  psi.amplitudes[basis->rank(b)] = sb / std::sqrt(2.0);
  const auto rho = density_from_state(psi);
  CHECK_THAT(rho(0.0), WithinAbs(3.0, 1e-12));
  CHECK_THAT(rho(0.25), WithinAbs(1.0, 1e-12));

  const auto r = lieb_maximize(rho, spec);
  CHECK(r.mismatch < 1e-5);
  CHECK(r.converged);
  CHECK(r.cert.weak_duality);
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].G >= r.trace[i - 1].G);
}

TEST_CASE("dual supergradient matches finite differences") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 6; ++trial) {
    const auto spec = model(1 + trial % 2, 5);
    const auto rho = random_density(spec.n, 3, rng, 0.3);
    const PotentialClass v(random_function(4, 3.0, rng));
    const auto at = evaluate_dual(rho, spec, v);
    REQUIRE(at.weights.size() == 1);
    const PotentialClass dir(random_function(4, 1.0, rng));
    const double t = 1e-5;
    const double fd =
        (evaluate_dual(rho, spec, v + t * dir).G - evaluate_dual(rho, spec, v + (-t) * dir).G) / (2.0 * t);
    CHECK_THAT(fd, WithinAbs(pair(dir, at.matched - rho.profile()), 1e-5));
  }
}

TEST_CASE("initial guesses differing by a constant give identical results") {
  const auto rho = cosine_density(2);
  const auto spec = model(2, 4);
  std::mt19937_64 rng(84);
  const auto v = random_function(2, 0.5, rng);
  InversionOptions a, b;
  a.initial = PotentialClass(v);
  b.initial = PotentialClass(v + TorusFunction::constant(4.0));
  a.max_iterations = b.max_iterations = 20;
  const auto ra = lieb_maximize(rho, spec, a), rb = lieb_maximize(rho, spec, b);
  CHECK(ra.potential == rb.potential);
  CHECK(ra.dual_value == rb.dual_value);
  CHECK(ra.iterations == rb.iterations);
}

TEST_CASE("proximal term keeps the potential smaller") {
  const auto rho = cosine_density();
  InversionOptions plain, prox;
  plain.analytic_start = prox.analytic_start = false;
  prox.proximal = 1.0;
  prox.max_iterations = plain.max_iterations = 60;
  const auto a = lieb_maximize(rho, model(1, 8), plain), b = lieb_maximize(rho, model(1, 8), prox);
  CHECK(norm(b.potential.coefficients(), Space::Hminus1) < norm(a.potential.coefficients(), Space::Hminus1));
  CHECK(b.mismatch > a.mismatch);
}

TEST_CASE("inversion input validation") {
  const auto rho = cosine_density();
  CHECK_THROWS_AS(lieb_maximize(rho, model(2, 4)), std::invalid_argument);
  std::mt19937_64 rng(85);
  TorusFunction wide = random_function(6, 0.02, rng);
  wide.at(0) = 1.0;
  InversionOptions opts;
  opts.potential_cutoff = 3;
  CHECK_THROWS_AS(lieb_maximize(make_density(wide, 1), model(1, 4), opts), std::invalid_argument);

  TorusFunction thin(1);
  thin.at(0) = 1.0;
  thin.at(1) = thin.at(-1) = 0.4998;
  InversionOptions quick;
  quick.max_iterations = 1;
  const auto r = lieb_maximize(make_density(thin, 1), model(1, 4), quick);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings.front().find("close to zero") != std::string::npos);
}
