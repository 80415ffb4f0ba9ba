#include "torus_vrep/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <mutex>

namespace tvr {

namespace {

// FFTW planning is not thread-safe; execution with new-array functions is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(n, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<cplx> in(static_cast<std::size_t>(n)), out(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

void fft(std::vector<cplx>& in, std::vector<cplx>& out, int sign) {
  const int n = static_cast<int>(in.size());
  out.resize(in.size());
  fftw_plan p = PlanCache::instance().get(n, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

inline std::size_t wrap(int k, int m) { return static_cast<std::size_t>(((k % m) + m) % m); }

}  // namespace

const Numerics& default_numerics() {
  static const Numerics n{};
  return n;
}

Space parse_space(const std::string& tag) {
  if (tag == "L1") return Space::L1;
  if (tag == "L2") return Space::L2;
  if (tag == "Linf") return Space::Linf;
  if (tag == "H1") return Space::H1;
  if (tag == "Hminus1") return Space::Hminus1;
  throw std::invalid_argument("unknown norm space '" + tag + "'");
}

std::string to_string(Space s) {
  switch (s) {
    case Space::L1: return "L1";
    case Space::L2: return "L2";
    case Space::Linf: return "Linf";
    case Space::H1: return "H1";
    case Space::Hminus1: return "Hminus1";
  }
  return "?";
}

TorusFunction::TorusFunction(int cutoff)
    : cutoff_(cutoff), coeffs_(static_cast<std::size_t>(2 * cutoff + 1)) {
  if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
}

TorusFunction::TorusFunction(std::vector<cplx> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.size() % 2 != 1) throw std::invalid_argument("coefficient count must be odd (k=-K..K)");
  cutoff_ = static_cast<int>(coeffs_.size() / 2);
}

TorusFunction TorusFunction::constant(double value, int cutoff) {
  TorusFunction f(cutoff);
  f.at(0) = value;
  return f;
}

TorusFunction TorusFunction::mode(int k, cplx amplitude, int cutoff) {
  TorusFunction f(std::max(cutoff, std::abs(k)));
  f.at(k) = amplitude;
  return f;
}

cplx& TorusFunction::at(int k) {
  if (k < -cutoff_ || k > cutoff_) throw std::out_of_range("mode outside cutoff");
  return coeffs_[static_cast<std::size_t>(k + cutoff_)];
}

cplx TorusFunction::evaluate(double x) const {
  cplx sum{};
  for (int k = -cutoff_; k <= cutoff_; ++k) sum += (*this)[k] * std::polar(1.0, kTwoPi * k * x);
  return sum;
}

std::vector<cplx> TorusFunction::samples(int grid) const {
  if (grid < 2 * cutoff_ + 1) {
    throw ResolutionError("grid of " + std::to_string(grid) + " points cannot represent cutoff " +
                          std::to_string(cutoff_));
  }
  std::vector<cplx> spec(static_cast<std::size_t>(grid)), out;
  for (int k = -cutoff_; k <= cutoff_; ++k) spec[wrap(k, grid)] += (*this)[k];
  fft(spec, out, FFTW_BACKWARD);
  return out;
}

std::vector<double> TorusFunction::real_samples(int grid) const {
  auto s = samples(grid);
  std::vector<double> r(s.size());
  std::transform(s.begin(), s.end(), r.begin(), [](cplx z) { return z.real(); });
  return r;
}

bool TorusFunction::is_real(double tol) const {
  double scale = 0.0;
  for (auto c : coeffs_) scale = std::max(scale, std::abs(c));
  for (int k = 0; k <= cutoff_; ++k) {
    if (std::abs((*this)[k] - std::conj((*this)[-k])) > tol * std::max(1.0, scale)) return false;
  }
  return true;
}

TorusFunction TorusFunction::real_part() const {
  TorusFunction r(cutoff_);
  for (int k = -cutoff_; k <= cutoff_; ++k) r.at(k) = 0.5 * ((*this)[k] + std::conj((*this)[-k]));
  return r;
}

TorusFunction TorusFunction::derivative() const {
  TorusFunction d(cutoff_);
  for (int k = -cutoff_; k <= cutoff_; ++k) d.at(k) = cplx{0.0, kTwoPi * k} * (*this)[k];
  return d;
}

TorusFunction TorusFunction::with_cutoff(int cutoff) const {
  TorusFunction r(cutoff);
  const int kmax = std::min(cutoff, cutoff_);
  for (int k = -kmax; k <= kmax; ++k) r.at(k) = (*this)[k];
  return r;
}

TorusFunction& TorusFunction::operator+=(const TorusFunction& o) {
  if (o.cutoff_ > cutoff_) *this = with_cutoff(o.cutoff_);
  for (int k = -o.cutoff_; k <= o.cutoff_; ++k) at(k) += o[k];
  return *this;
}

TorusFunction& TorusFunction::operator-=(const TorusFunction& o) {
  if (o.cutoff_ > cutoff_) *this = with_cutoff(o.cutoff_);
  for (int k = -o.cutoff_; k <= o.cutoff_; ++k) at(k) -= o[k];
  return *this;
}

TorusFunction& TorusFunction::operator*=(cplx s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

std::vector<double> grid_points(int grid) {
  std::vector<double> x(static_cast<std::size_t>(grid));
  for (int m = 0; m < grid; ++m) x[static_cast<std::size_t>(m)] = static_cast<double>(m) / grid;
  return x;
}

int oversampled_grid(int cutoff, const Numerics& num) { return num.oversample * (2 * cutoff + 1); }

TorusFunction transform(std::span<const cplx> samples, int cutoff) {
  const int grid = static_cast<int>(samples.size());
  if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
  if (grid < 2 * cutoff + 1) {
    throw ResolutionError("insufficient resolution: " + std::to_string(grid) +
                          " samples for cutoff " + std::to_string(cutoff) + " (need >= " +
                          std::to_string(2 * cutoff + 1) + ")");
  }
  std::vector<cplx> in(samples.begin(), samples.end()), out;
  fft(in, out, FFTW_FORWARD);
  TorusFunction f(cutoff);
  const double inv = 1.0 / grid;
  for (int k = -cutoff; k <= cutoff; ++k) f.at(k) = out[wrap(k, grid)] * inv;
  return f;
}

TorusFunction transform(std::span<const double> samples, int cutoff) {
  std::vector<cplx> z(samples.begin(), samples.end());
  auto f = transform(std::span<const cplx>(z), cutoff);
  return f.real_part();
}

TorusFunction multiply(const TorusFunction& a, const TorusFunction& b) {
  const int cutoff = a.cutoff() + b.cutoff();
  const int grid = 2 * cutoff + 1;
  auto sa = a.samples(grid);
  auto sb = b.samples(grid);
  for (std::size_t i = 0; i < sa.size(); ++i) sa[i] *= sb[i];
  return transform(std::span<const cplx>(sa), cutoff);
}

double norm_squared_h1(const TorusFunction& f) {
  double s = 0.0;
  for (int k = -f.cutoff(); k <= f.cutoff(); ++k) s += (1.0 + kTwoPi * kTwoPi * k * k) * std::norm(f[k]);
  return s;
}

double norm_squared_hminus1(const TorusFunction& f) {
  double s = 0.0;
  for (int k = -f.cutoff(); k <= f.cutoff(); ++k) s += std::norm(f[k]) / (1.0 + kTwoPi * kTwoPi * k * k);
  return s;
}

double norm(const TorusFunction& f, Space space, const Numerics& num) {
  switch (space) {
    case Space::L2: {
      double s = 0.0;
      for (auto c : f.coefficients()) s += std::norm(c);
      return std::sqrt(s);
    }
    case Space::H1: return std::sqrt(norm_squared_h1(f));
    case Space::Hminus1: return std::sqrt(norm_squared_hminus1(f));
    case Space::L1:
    case Space::Linf: {
      const auto s = f.samples(oversampled_grid(f.cutoff(), num));
      double acc = 0.0;
      for (auto z : s) acc = (space == Space::L1) ? acc + std::abs(z) : std::max(acc, std::abs(z));
      return space == Space::L1 ? acc / static_cast<double>(s.size()) : acc;
    }
  }
  throw std::invalid_argument("unknown norm space");
}

cplx inner(const TorusFunction& a, const TorusFunction& b) {
  cplx s{};
  const int kmax = std::min(a.cutoff(), b.cutoff());
  for (int k = -kmax; k <= kmax; ++k) s += std::conj(a[k]) * b[k];
  return s;
}

double embedding_constant() { return std::sqrt(0.5 / std::tanh(0.5)); }

double pair_decomposition(const std::function<double(double)>& f,
                          const std::function<double(double)>& g, const TorusFunction& phi,
                          int panels) {
  const TorusFunction dphi = phi.derivative();
  auto integrand = [&](double x) { return f(x) * phi.evaluate_real(x) - g(x) * dphi.evaluate_real(x); };
  double total = 0.0;
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    total += boost::math::quadrature::gauss<double, 20>::integrate(integrand, p * h, (p + 1) * h);
  }
  return total;
}

}  // namespace tvr
