#include "torus_vrep/spaces.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

namespace tvr {

double von_weizsaecker_integral(const TorusFunction& rho, int grid) {
  auto s = rho.real_samples(grid);
  for (auto& x : s) x = std::sqrt(std::max(x, 0.0));
  const auto root = transform(std::span<const double>(s), max_cutoff(grid));
  double a = 0.0;
  for (int k = 1; k <= root.cutoff(); ++k) a += 2.0 * kTwoPi * kTwoPi * k * k * std::norm(root[k]);
  return a;
}

DensityField make_density(const TorusFunction& coefficients, int n_particles, const Numerics& num) {
  if (n_particles < 1) throw std::invalid_argument("particle count must be positive");
  for (auto c : coefficients.coefficients()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw std::invalid_argument("density contains NaN or Inf");
  }
  if (!coefficients.is_real(1e-10)) throw std::invalid_argument("density must be real-valued");
  const double mean = coefficients[0].real();
  if (!(mean > 0.0)) throw std::invalid_argument("density has nonpositive mean");

  DensityField d;
  d.n_ = n_particles;
  d.profile_ = coefficients.real_part() * (n_particles / mean);
  d.profile_.at(0) = static_cast<double>(n_particles);

  const int grid = oversampled_grid(d.profile_.cutoff(), num);
  const auto s = d.profile_.real_samples(grid);
  d.eta_ = *std::min_element(s.begin(), s.end());
  d.max_ = *std::max_element(s.begin(), s.end());
  if (d.eta_ < -num.positivity_tol * d.max_) {
    throw std::invalid_argument("density takes negative value " + std::to_string(d.eta_));
  }
  d.strict_ = d.eta_ > num.positivity_tol * d.max_;
  d.vw_ = von_weizsaecker_integral(d.profile_, std::max(256, grid));
  return d;
}

DensityField make_density(std::span<const double> samples, int n_particles, int cutoff,
                          const Numerics& num) {
  for (double x : samples) {
    if (std::isnan(x)) throw std::invalid_argument("density samples contain NaN");
    if (x < 0.0) throw std::invalid_argument("density samples contain a negative value");
  }
  return make_density(transform(samples, cutoff), n_particles, num);
}

DensityField random_density(int n_particles, int cutoff, std::mt19937_64& rng, double floor, const Numerics& num) {
  if (cutoff < 0) throw std::invalid_argument("cutoff must be nonnegative");
  if (!(floor > 0.0)) throw std::invalid_argument("density floor must be positive");
  std::normal_distribution<double> g;
  TorusFunction f(cutoff);
  for (int k = 1; k <= cutoff; ++k) {
    const cplx c = cplx{g(rng), g(rng)} / static_cast<double>(k);
    f.at(k) = c;
    f.at(-k) = std::conj(c);
  }
  const auto s = f.real_samples(oversampled_grid(cutoff, num));
  const double lo = *std::min_element(s.begin(), s.end());
  const double hi = *std::max_element(s.begin(), s.end());
  f.at(0) = std::max(-lo, 0.0) + floor * (1.0 + hi - lo);
  return make_density(f, n_particles, num);
}

MembershipReport membership(const DensityField& rho, const Numerics& num) {
  MembershipReport r;
  r.in_X = rho.profile().is_real(1e-12) &&
           std::abs(rho.profile()[0].real() - rho.n_particles()) <= num.normalization_tol * rho.n_particles();
  r.eta = rho.eta();
  r.A = rho.von_weizsaecker();
  r.in_Xpos = r.in_X && rho.strictly_positive();
  if (r.eta > 0.0) {
    r.in_I_bound = norm_squared_h1(rho.profile()) / (4.0 * r.eta);
    r.bound_holds = r.A <= r.in_I_bound * (1.0 + 1e-12);
  } else {
    r.in_I_bound = std::numeric_limits<double>::infinity();
  }
  return r;
}

PotentialClass::PotentialClass(TorusFunction coefficients) : v_(std::move(coefficients)) {
  for (auto c : v_.coefficients()) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw std::invalid_argument("potential contains NaN or Inf");
  }
  v_.at(0) = 0.0;
}

PotentialClass PotentialClass::from_decomposition(const TorusFunction& f, const TorusFunction& g) {
  PotentialClass v(f + g.derivative());
  TorusFunction f0 = f;
  f0.at(0) = 0.0;
  v.decomposition_ = std::make_pair(std::move(f0), g);
  return v;
}

bool PotentialClass::is_zero() const {
  return std::all_of(v_.coefficients().begin(), v_.coefficients().end(), [](cplx c) { return c == cplx{}; });
}

double pair(const PotentialClass& v, const TorusFunction& rho) { return inner(v.coefficients(), rho).real(); }

std::pair<TorusFunction, TorusFunction> decompose_potential(const PotentialClass& v) {
  const int kc = v.cutoff();
  TorusFunction f(kc), g(kc);
  for (int k = -kc; k <= kc; ++k) {
    const double w = 1.0 + kTwoPi * kTwoPi * k * k;
    f.at(k) = v[k] / w;
    g.at(k) = cplx{0.0, -kTwoPi * k} * v[k] / w;
  }
  return {f, g};
}

PotentialClass delta_potential(double strength, int cutoff) {
  if (cutoff < 1) throw std::invalid_argument("delta potential needs cutoff >= 1");
  TorusFunction v(cutoff);
  for (int k = -cutoff; k <= cutoff; ++k) v.at(k) = strength;
  return PotentialClass(v);
}

PotentialClass cosine_potential(double amplitude, int cutoff) {
  TorusFunction v(std::max(cutoff, 1));
  v.at(1) = 0.5 * amplitude;
  v.at(-1) = 0.5 * amplitude;
  return PotentialClass(v);
}

void EnglischParams::validate() const {
  if (!(a > b && b > 0.0)) throw std::invalid_argument("englisch density requires a > b > 0");
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("englisch density requires 0 < alpha < 1/2");
  if (n_particles < 1) throw std::invalid_argument("particle count must be positive");
}

double EnglischParams::raw(double x) const {
  double t = x - std::floor(x);
  const double d = std::min(t, 1.0 - t);
  const double s = a + b * std::pow(d, alpha + 0.5);
  return s * s;
}

double EnglischParams::scale() const {
  const double beta = alpha + 0.5;
  const double integral = a * a + 4.0 * a * b * std::pow(0.5, beta + 1.0) / (beta + 1.0) +
                          2.0 * b * b * std::pow(0.5, 2.0 * beta + 1.0) / (2.0 * beta + 1.0);
  return n_particles / integral;
}

DensityField englisch_density(const EnglischParams& p, int cutoff, const Numerics& num) {
  p.validate();
  const double s = p.scale();
  TorusFunction rho(cutoff);
  boost::math::quadrature::tanh_sinh<double> endpoint;
  for (int k = 1; k <= cutoff; ++k) {
    auto f = [&](double x) { return p.raw(x) * std::cos(kTwoPi * k * x); };
    const int panels = std::max(8, 4 * k);
    const double h = 0.5 / panels;
    double c = endpoint.integrate(f, 0.0, h);
    for (int j = 1; j < panels; ++j) {
      c += boost::math::quadrature::gauss<double, 20>::integrate(f, j * h, (j + 1) * h);
    }
    rho.at(k) = rho.at(-k) = 2.0 * s * c;
  }
  rho.at(0) = static_cast<double>(p.n_particles);
  return make_density(rho, p.n_particles, num);
}

}  // namespace tvr
