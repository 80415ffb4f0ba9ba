#pragma once

// Periodic spectral backbone on the unit torus [0,1).
//
// Convention: f(x) = sum_k c_k exp(2 pi i k x), c_k = int_0^1 f(x) exp(-2 pi i k x) dx.
// A TorusFunction stores the coefficients for k = -K..K; grid samples are
// produced on demand at x_m = m / M for any M >= 2K + 1.

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvr {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Numerical defaults shared by all modules. Every field may be overridden
/// by callers (the CLI exposes them as flags).
struct Numerics {
  int oversample = 8;               ///< L1/Linf grids use oversample * (2K+1) points
  double consistency_tol = 1e-12;   ///< sample/coefficient agreement
  double normalization_tol = 1e-10; ///< |int rho - N|
  double positivity_tol = 1e-10;    ///< eta must exceed this (relative to max) for X>0
};

const Numerics& default_numerics();

class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Space { L1, L2, Linf, H1, Hminus1 };

Space parse_space(const std::string& tag);
std::string to_string(Space s);

class TorusFunction {
 public:
  TorusFunction() = default;
  /// Zero function with cutoff K.
  explicit TorusFunction(int cutoff);
  /// Coefficients ordered k = -K..K (size must be odd).
  explicit TorusFunction(std::vector<cplx> coefficients);

  static TorusFunction constant(double value, int cutoff = 0);
  /// Single mode a * exp(2 pi i k x).
  static TorusFunction mode(int k, cplx amplitude, int cutoff);

  int cutoff() const { return cutoff_; }
  std::size_t size() const { return coeffs_.size(); }

  /// Coefficient of mode k; zero outside -K..K.
  cplx operator[](int k) const {
    return (k < -cutoff_ || k > cutoff_) ? cplx{} : coeffs_[static_cast<std::size_t>(k + cutoff_)];
  }
  cplx& at(int k);
  std::span<const cplx> coefficients() const { return coeffs_; }

  cplx evaluate(double x) const;
  double evaluate_real(double x) const { return evaluate(x).real(); }

  /// Inverse transform to M uniform samples (M >= 2K+1).
  std::vector<cplx> samples(int grid) const;
  std::vector<double> real_samples(int grid) const;

  bool is_real(double tol = 1e-12) const;
  /// Enforce c_{-k} = conj(c_k) by symmetrization.
  TorusFunction real_part() const;

  TorusFunction derivative() const;
  TorusFunction with_cutoff(int cutoff) const;

  TorusFunction& operator+=(const TorusFunction& o);
  TorusFunction& operator-=(const TorusFunction& o);
  TorusFunction& operator*=(cplx s);

  friend TorusFunction operator+(TorusFunction a, const TorusFunction& b) { return a += b; }
  friend TorusFunction operator-(TorusFunction a, const TorusFunction& b) { return a -= b; }
  friend TorusFunction operator*(TorusFunction a, cplx s) { return a *= s; }
  friend TorusFunction operator*(cplx s, TorusFunction a) { return a *= s; }
  friend TorusFunction operator*(TorusFunction a, double s) { return a *= cplx{s, 0.0}; }
  friend TorusFunction operator*(double s, TorusFunction a) { return a *= cplx{s, 0.0}; }

  bool operator==(const TorusFunction&) const = default;

 private:
  int cutoff_ = 0;
  std::vector<cplx> coeffs_{cplx{}};
};

/// Uniform grid x_m = m / M.
std::vector<double> grid_points(int grid);

/// Oversampled grid size used for L1 / Linf evaluation and positivity tests.
int oversampled_grid(int cutoff, const Numerics& num = default_numerics());

/// Forward discrete transform of M uniform real samples, keeping modes |k| <= K.
/// Throws ResolutionError when M < 2K+1.
TorusFunction transform(std::span<const double> samples, int cutoff);
TorusFunction transform(std::span<const cplx> samples, int cutoff);

/// Largest cutoff representable on a grid of M points.
inline int max_cutoff(int grid) { return (grid - 1) / 2; }

/// Pointwise product evaluated on a grid fine enough to be exact.
TorusFunction multiply(const TorusFunction& a, const TorusFunction& b);

double norm(const TorusFunction& f, Space space, const Numerics& num = default_numerics());
double norm_squared_h1(const TorusFunction& f);
double norm_squared_hminus1(const TorusFunction& f);

/// Spectral inner product int conj(a) b.
cplx inner(const TorusFunction& a, const TorusFunction& b);

/// C_emb^2 = sum_k 1/(1 + 4 pi^2 k^2) = coth(1/2) / 2, so that
/// ||f||_inf <= C_emb ||f||_{H1}.
double embedding_constant();

/// <f, phi> - <g, phi'> for real-space f, g on [0,1) (not necessarily periodic),
/// integrated by composite Gauss-Legendre quadrature.
double pair_decomposition(const std::function<double(double)>& f,
                          const std::function<double(double)>& g,
                          const TorusFunction& phi, int panels = 64);

}  // namespace tvr
