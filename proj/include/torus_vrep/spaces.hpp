#pragma once

// Density and potential spaces on the torus.
//
// DensityField: real profile with c_0 = N, plus cached minimum and
// von Weizsaecker integral A = ||grad sqrt(rho)||^2.
// PotentialClass: zero-mean representative of v modulo constants.

#include <optional>
#include <random>
#include <utility>

#include "torus_vrep/fourier.hpp"

namespace tvr {

class DensityField {
 public:
  DensityField() = default;

  int n_particles() const { return n_; }
  int cutoff() const { return profile_.cutoff(); }
  const TorusFunction& profile() const { return profile_; }
  double eta() const { return eta_; }
  double von_weizsaecker() const { return vw_; }
  double max_value() const { return max_; }
  bool strictly_positive() const { return strict_; }

  double operator()(double x) const { return profile_.evaluate_real(x); }

  friend DensityField make_density(const TorusFunction&, int, const Numerics&);

 private:
  int n_ = 0;
  TorusFunction profile_;
  double eta_ = 0.0;
  double vw_ = 0.0;
  double max_ = 0.0;
  bool strict_ = false;
};

/// Normalize to int rho = N and cache eta and A. Throws on NaN input,
/// nonpositive mean or a negative value on the oversampled grid.
DensityField make_density(const TorusFunction& coefficients, int n_particles,
                          const Numerics& num = default_numerics());
DensityField make_density(std::span<const double> samples, int n_particles, int cutoff,
                          const Numerics& num = default_numerics());

/// ||grad sqrt(rho)||^2 from sqrt(rho) sampled on a grid of M points.
double von_weizsaecker_integral(const TorusFunction& rho, int grid);

struct MembershipReport {
  bool in_X = false;
  bool in_Xpos = false;
  double eta = 0.0;
  double A = 0.0;
  double in_I_bound = 0.0;  // ||rho||_{H1}^2 / (4 eta), +inf when eta <= 0
  bool bound_holds = true;
};

MembershipReport membership(const DensityField& rho, const Numerics& num = default_numerics());

class PotentialClass {
 public:
  PotentialClass() = default;
  /// Gauge-fixes by dropping the k = 0 coefficient.
  explicit PotentialClass(TorusFunction coefficients);
  /// v = f + grad g, stored together with its decomposition.
  static PotentialClass from_decomposition(const TorusFunction& f, const TorusFunction& g);

  int cutoff() const { return v_.cutoff(); }
  const TorusFunction& coefficients() const { return v_; }
  cplx operator[](int k) const { return v_[k]; }
  bool is_zero() const;

  bool has_decomposition() const { return decomposition_.has_value(); }
  const std::pair<TorusFunction, TorusFunction>& decomposition() const { return *decomposition_; }

  PotentialClass with_cutoff(int cutoff) const { return PotentialClass(v_.with_cutoff(cutoff)); }

  friend PotentialClass operator+(const PotentialClass& a, const PotentialClass& b) {
    return PotentialClass(a.v_ + b.v_);
  }
  friend PotentialClass operator*(double s, const PotentialClass& a) { return PotentialClass(s * a.v_); }

  bool operator==(const PotentialClass& o) const { return v_ == o.v_; }

 private:
  TorusFunction v_;
  std::optional<std::pair<TorusFunction, TorusFunction>> decomposition_;
};

/// sum_k conj(v_k) rho_k.
double pair(const PotentialClass& v, const TorusFunction& rho);
inline double pair(const PotentialClass& v, const DensityField& rho) { return pair(v, rho.profile()); }

/// Least-norm f, g with f_k + 2 pi i k g_k = v_k.
std::pair<TorusFunction, TorusFunction> decompose_potential(const PotentialClass& v);

PotentialClass delta_potential(double strength, int cutoff);
PotentialClass cosine_potential(double amplitude, int cutoff = 1);

struct EnglischParams {
  double a = 1.0;
  double b = 0.5;
  double alpha = 0.25;
  int n_particles = 1;

  void validate() const;
  /// Unnormalized (a + b d^(alpha+1/2))^2, d = min(x, 1-x).
  double raw(double x) const;
  /// Factor N / int raw.
  double scale() const;
};

/// Random band-limited density whose minimum before rescaling is floor * (1 + oscillation range).
DensityField random_density(int n_particles, int cutoff, std::mt19937_64& rng, double floor = 0.05,
                            const Numerics& num = default_numerics());

DensityField englisch_density(const EnglischParams& p, int cutoff,
                              const Numerics& num = default_numerics());

}  // namespace tvr
