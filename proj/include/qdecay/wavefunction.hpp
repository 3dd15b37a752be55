#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qdecay/quadrature.hpp"
#include "qdecay/special.hpp"

namespace qdecay {

/// Default tail-mass target when auto-sizing position/momentum windows.
inline constexpr double kWindowTailMass = 1e-10;

/// Threshold scale for declaring a moment / amplitude numerically zero.
inline constexpr double kZeroThreshold = 1e-10;

struct GridSpec {
  double lo = 0.0;
  double step = 0.0;
  std::size_t count = 0;
  double hi() const { return lo + step * double(count - 1); }
};

/// psi_hat(k) = N k^m exp(-a0 k^2), unit L2 norm by construction.
struct GaussianFamilyParams {
  int m = 0;
  double a0 = 0.0;
  double amp = 0.0;  // the normalization constant N
};

/// psi_hat(k) = amp * exp(-1/(k0^2 - (k-d)^2)) on |k-d| < k0, 0 outside,
/// with amp chosen numerically so the L2 norm is 1.
struct MomentumBumpParams {
  double d = 0.0;
  double k0 = 0.0;
  double amp = 0.0;
};

struct PositionGridData {
  std::vector<Complex> samples;
  double x_min = 0.0;
  double dx = 0.0;
};

struct MomentumGridData {
  std::vector<Complex> samples;
  double k_min = 0.0;
  double dk = 0.0;
};

namespace detail {

// 4-point Lagrange interpolation on a uniform grid.
inline Complex interp_cubic(const std::vector<Complex>& s, double lo,
                            double step, double x) {
  const double u = (x - lo) / step;
  if (u < 0.0 || u > double(s.size() - 1)) return {0.0, 0.0};
  std::ptrdiff_t i0 = std::ptrdiff_t(std::floor(u)) - 1;
  i0 = std::max<std::ptrdiff_t>(0, std::min<std::ptrdiff_t>(i0, std::ptrdiff_t(s.size()) - 4));
  const double r = u - double(i0);
  // Lagrange basis at offsets 0..3
  const double l0 = -(r - 1.0) * (r - 2.0) * (r - 3.0) / 6.0;
  const double l1 = r * (r - 2.0) * (r - 3.0) / 2.0;
  const double l2 = -r * (r - 1.0) * (r - 3.0) / 2.0;
  const double l3 = r * (r - 1.0) * (r - 2.0) / 6.0;
  return l0 * s[i0] + l1 * s[i0 + 1] + l2 * s[i0 + 2] + l3 * s[i0 + 3];
}

inline double trapezoid_norm(const std::vector<Complex>& s, double step) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = (i == 0 || i + 1 == s.size()) ? 0.5 : 1.0;
    acc += w * std::norm(s[i]);
  }
  return std::sqrt(acc * step);
}

}  // namespace detail

/// An initial state in position or momentum representation.  Immutable after
/// construction; all member evaluations are pure, so values can be shared
/// across threads read-only.
class WaveFunction {
 public:
  enum class Kind { GaussianFamily, MomentumBump, PositionGrid, MomentumGrid };

  static WaveFunction gaussian_family(int m, double a0) {
    if (m < 0)
      throw std::invalid_argument("gaussian_family: m must be >= 0");
    if (!(a0 > 0.0))
      throw std::invalid_argument("gaussian_family: a0 must be > 0");
    GaussianFamilyParams p;
    p.m = m;
    p.a0 = a0;
    p.amp = std::sqrt(std::pow(2.0 * a0, m + 0.5) / gamma_half(m));
    WaveFunction wf{p};
    wf.normalization_ = 1.0;
    return wf;
  }

  static WaveFunction momentum_bump(double d, double k0) {
    if (!(k0 > 0.0) || !(d > k0))
      throw std::invalid_argument("momentum_bump: require d > k0 > 0");
    MomentumBumpParams p;
    p.d = d;
    p.k0 = k0;
    p.amp = 1.0;
    // normalize numerically; no closed form exists for the L2 norm
    auto raw2 = [&](double k) -> Complex {
      const double u = k - d;
      const double den = k0 * k0 - u * u;
      return {den > 0.0 ? std::exp(-2.0 / den) : 0.0, 0.0};
    };
    const QuadResult q =
        integrate_gk(raw2, d - k0, d + k0, 1e-14, 0.0, 4000, {d});
    p.amp = 1.0 / std::sqrt(q.value.real());
    WaveFunction wf{p};
    wf.normalization_ = 1.0;
    return wf;
  }

  static WaveFunction position_grid(std::vector<Complex> samples, double x_min,
                                    double dx) {
    check_grid(samples.size(), dx, "position_grid");
    WaveFunction wf{PositionGridData{std::move(samples), x_min, dx}};
    wf.normalization_ = detail::trapezoid_norm(
        std::get<PositionGridData>(wf.kind_).samples, dx);
    return wf;
  }

  static WaveFunction momentum_grid(std::vector<Complex> samples, double k_min,
                                    double dk) {
    check_grid(samples.size(), dk, "momentum_grid");
    WaveFunction wf{MomentumGridData{std::move(samples), k_min, dk}};
    wf.normalization_ = detail::trapezoid_norm(
        std::get<MomentumGridData>(wf.kind_).samples, dk);
    return wf;
  }

  Kind kind() const {
    switch (kind_.index()) {
      case 0: return Kind::GaussianFamily;
      case 1: return Kind::MomentumBump;
      case 2: return Kind::PositionGrid;
      default: return Kind::MomentumGrid;
    }
  }

  double normalization() const { return normalization_; }

  bool analytic() const {
    return kind() == Kind::GaussianFamily || kind() == Kind::MomentumBump;
  }

  const GaussianFamilyParams* gaussian() const {
    return std::get_if<GaussianFamilyParams>(&kind_);
  }
  const MomentumBumpParams* bump() const {
    return std::get_if<MomentumBumpParams>(&kind_);
  }
  const PositionGridData* pgrid() const {
    return std::get_if<PositionGridData>(&kind_);
  }
  const MomentumGridData* mgrid() const {
    return std::get_if<MomentumGridData>(&kind_);
  }

  /// Momentum amplitude at real k.  Grid kinds interpolate their samples.
  Complex psi_hat(double k) const {
    if (const auto* g = gaussian())
      return g->amp * std::pow(k, g->m) * std::exp(-g->a0 * k * k);
    if (const auto* b = bump()) {
      const double u = k - b->d;
      const double den = b->k0 * b->k0 - u * u;
      if (den <= 0.0) return {0.0, 0.0};
      return {b->amp * std::exp(-1.0 / den), 0.0};
    }
    if (const auto* m = mgrid())
      return detail::interp_cubic(m->samples, m->k_min, m->dk, k);
    throw std::invalid_argument(
        "psi_hat: position-grid state has no momentum samples; use to_momentum");
  }

  /// Analytic continuation of psi_hat to complex momentum (analytic
  /// families only).  Returned as a complex log to survive huge exponents.
  Complex log_psi_hat(Complex z) const {
    if (const auto* g = gaussian()) {
      Complex lg = std::log(Complex{g->amp, 0.0}) - g->a0 * z * z;
      if (g->m > 0) lg += double(g->m) * std::log(z);
      return lg;
    }
    if (const auto* b = bump()) {
      const Complex u = z - b->d;
      return std::log(Complex{b->amp, 0.0}) - 1.0 / (b->k0 * b->k0 - u * u);
    }
    throw std::invalid_argument("log_psi_hat: analytic families only");
  }

  /// Position amplitude at real x.
  Complex psi(double x) const {
    if (const auto* g = gaussian()) {
      // inverse transform of N k^m exp(-a0 k^2) in closed form
      const double b = g->a0;
      const double sb = std::sqrt(b);
      const Complex h = hermite(g->m, Complex{x / (2.0 * sb), 0.0});
      const double pref = g->amp / kSqrt2Pi * std::sqrt(kPi / b) /
                          std::pow(2.0 * sb, g->m);
      return ipow(g->m) * pref * h * std::exp(-x * x / (4.0 * b));
    }
    if (const auto* b = bump()) {
      // smooth compactly supported integrand; panel count follows |x|
      const double a_ = b->d - b->k0, b_ = b->d + b->k0;
      const int panels =
          8 + int(std::ceil(std::abs(x) * (b_ - a_) / (2.0 * kPi) / 2.0));
      auto f = [&](double k) {
        return psi_hat(k) * std::exp(Complex{0.0, k * x});
      };
      return gl_composite(f, a_, b_, panels) / kSqrt2Pi;
    }
    if (const auto* p = pgrid())
      return detail::interp_cubic(p->samples, p->x_min, p->dx, x);
    const auto* m = mgrid();
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < m->samples.size(); ++i) {
      const double w = (i == 0 || i + 1 == m->samples.size()) ? 0.5 : 1.0;
      const double k = m->k_min + double(i) * m->dk;
      acc += w * m->samples[i] * std::exp(Complex{0.0, k * x});
    }
    return acc * m->dk / kSqrt2Pi;
  }

  /// Half-width of a symmetric position window holding all but ~tail_mass
  /// of the probability.  Moments up to high order amplify tails, so the
  /// default target is strict.
  double position_window(double tail_mass = kWindowTailMass) const {
    if (const auto* p = pgrid())
      return std::max(std::abs(p->x_min), std::abs(p->x_min + p->dx * double(p->samples.size() - 1)));
    double L = initial_position_scale();
    for (int iter = 0; iter < 60; ++iter) {
      // outer-shell mass estimate: integrate |psi|^2 over [L, L + 4 decay lengths]
      auto f = [&](double x) { return Complex{std::norm(psi(x)) + std::norm(psi(-x)), 0.0}; };
      const Complex shell = gl_composite(f, L, 2.0 * L, 24);
      if (shell.real() < 0.5 * tail_mass * normalization_ * normalization_)
        return 2.0 * L;
      L *= 2.0;
    }
    throw NumericError("position_window: tail mass target unreachable");
  }

  /// Half-width (or outer edge) of the momentum support, by tail target.
  double momentum_window(double tail_mass = 1e-12) const {
    if (const auto* b = bump()) return b->d + b->k0;
    if (const auto* m = mgrid())
      return std::max(std::abs(m->k_min),
                      std::abs(m->k_min + m->dk * double(m->samples.size() - 1)));
    if (const auto* g = gaussian()) {
      double K = std::sqrt((g->m + 1.0) / (2.0 * g->a0)) + 1.0;
      for (int iter = 0; iter < 200; ++iter) {
        const double dens = std::norm(psi_hat(K)) * K;
        if (dens < tail_mass) return K;
        K *= 1.25;
      }
      return K;
    }
    throw std::invalid_argument("momentum_window: use to_momentum first");
  }

 private:
  using Variant = std::variant<GaussianFamilyParams, MomentumBumpParams,
                               PositionGridData, MomentumGridData>;

  explicit WaveFunction(Variant v) : kind_(std::move(v)) {}

  static void check_grid(std::size_t n, double step, const char* who) {
    if (n < 16)
      throw std::invalid_argument(std::string(who) + ": need >= 16 samples");
    if (!(step > 0.0))
      throw std::invalid_argument(std::string(who) + ": spacing must be > 0");
  }

  double initial_position_scale() const {
    if (const auto* g = gaussian())
      return std::sqrt(2.0 * g->a0) * (4.0 + double(g->m));
    return 8.0;  // bump: slow stretched-exponential spatial decay
  }

  Variant kind_;
  double normalization_ = 0.0;
};

struct WeightedNorm {
  double s = 0.0;
  double value = 0.0;
};

namespace detail {

inline GridSpec default_position_grid(const WaveFunction& wf,
                                      double k_abs_max) {
  // strict tail target: truncation ringing otherwise leaves a noise floor
  // in the transform that high-order moments amplify
  const double L = wf.position_window(1e-16);
  const double dx = std::min(0.25 * kPi / std::max(1.0, k_abs_max),
                             2.0 * L / 511.0);
  const std::size_t n = std::size_t(std::ceil(2.0 * L / dx)) + 1;
  return {-L, dx, n};
}

}  // namespace detail

/// Momentum representation of psi on the given grid under the convention
/// psi_hat(k) = (2 pi)^{-1/2} \int exp(-i k x) psi(x) dx.  The transform is
/// an explicit-phase uniform-grid sum with trapezoid end weights, which keeps
/// the continuous convention exact and the output bit-reproducible.
inline WaveFunction to_momentum(const WaveFunction& wf, const GridSpec& grid) {
  if (grid.count < 16 || !(grid.step > 0.0))
    throw std::invalid_argument("to_momentum: bad target grid");
  if (const auto* m = wf.mgrid()) {
    // same-grid request is the identity; otherwise resample
    std::vector<Complex> out(grid.count);
    for (std::size_t j = 0; j < grid.count; ++j)
      out[j] = detail::interp_cubic(m->samples, m->k_min, m->dk,
                                    grid.lo + double(j) * grid.step);
    return WaveFunction::momentum_grid(std::move(out), grid.lo, grid.step);
  }

  std::vector<Complex> src;
  double x0 = 0.0, dx = 0.0;
  const double k_abs_max = std::max(std::abs(grid.lo), std::abs(grid.hi()));
  if (const auto* p = wf.pgrid()) {
    src = p->samples;
    x0 = p->x_min;
    dx = p->dx;
    if (k_abs_max > 0.9 * kPi / dx)
      throw NumericError("to_momentum: target grid exceeds Nyquist band of source");
  } else {
    const GridSpec g = detail::default_position_grid(wf, k_abs_max);
    src.resize(g.count);
    for (std::size_t i = 0; i < g.count; ++i)
      src[i] = wf.psi(g.lo + double(i) * g.step);
    x0 = g.lo;
    dx = g.step;
  }

  std::vector<Complex> out(grid.count);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double k = grid.lo + double(j) * grid.step;
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double w = (i == 0 || i + 1 == src.size()) ? 0.5 : 1.0;
      const double x = x0 + double(i) * dx;
      acc += w * src[i] * std::exp(Complex{0.0, -k * x});
    }
    out[j] = acc * dx / kSqrt2Pi;
  }
  WaveFunction res =
      WaveFunction::momentum_grid(std::move(out), grid.lo, grid.step);

  // Nyquist / coverage check: leaked tail mass must stay small
  const double n2 = res.normalization() * res.normalization();
  const std::size_t edge = std::max<std::size_t>(2, grid.count / 20);
  double tail = 0.0;
  const auto& s = res.mgrid()->samples;
  for (std::size_t i = 0; i < edge; ++i)
    tail += (std::norm(s[i]) + std::norm(s[s.size() - 1 - i])) * grid.step;
  const double src_n2 = wf.normalization() * wf.normalization();
  if (tail > 1e-6 * src_n2 || std::abs(n2 - src_n2) > 1e-4 * src_n2)
    throw NumericError(
        "to_momentum: grid too coarse or too narrow (tail mass above 1e-6)");
  return res;
}

/// Inverse transform onto a position grid; mirror of to_momentum.
inline WaveFunction to_position(const WaveFunction& wf, const GridSpec& grid) {
  if (grid.count < 16 || !(grid.step > 0.0))
    throw std::invalid_argument("to_position: bad target grid");
  if (const auto* p = wf.pgrid()) {
    std::vector<Complex> out(grid.count);
    for (std::size_t j = 0; j < grid.count; ++j)
      out[j] = detail::interp_cubic(p->samples, p->x_min, p->dx,
                                    grid.lo + double(j) * grid.step);
    return WaveFunction::position_grid(std::move(out), grid.lo, grid.step);
  }

  std::vector<Complex> src;
  double k0 = 0.0, dk = 0.0;
  if (const auto* m = wf.mgrid()) {
    src = m->samples;
    k0 = m->k_min;
    dk = m->dk;
  } else if (wf.bump()) {
    const double a_ = wf.bump()->d - wf.bump()->k0;
    const double b_ = wf.bump()->d + wf.bump()->k0;
    const std::size_t n = 1025;
    dk = (b_ - a_) / double(n - 1);
    k0 = a_;
    src.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      src[i] = wf.psi_hat(k0 + double(i) * dk);
  } else {
    const double K = wf.momentum_window(1e-18);
    const double x_abs_max = std::max(std::abs(grid.lo), std::abs(grid.hi()));
    dk = std::min(0.25 * kPi / std::max(1.0, x_abs_max), 2.0 * K / 511.0);
    const std::size_t n = std::size_t(std::ceil(2.0 * K / dk)) + 1;
    k0 = -K;
    src.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      src[i] = wf.psi_hat(k0 + double(i) * dk);
  }

  std::vector<Complex> out(grid.count);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double x = grid.lo + double(j) * grid.step;
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < src.size(); ++i) {
      const double w = (i == 0 || i + 1 == src.size()) ? 0.5 : 1.0;
      const double k = k0 + double(i) * dk;
      acc += w * src[i] * std::exp(Complex{0.0, k * x});
    }
    out[j] = acc * dk / kSqrt2Pi;
  }
  WaveFunction res =
      WaveFunction::position_grid(std::move(out), grid.lo, grid.step);
  const double n2 = res.normalization() * res.normalization();
  const double src_n2 = wf.normalization() * wf.normalization();
  if (std::abs(n2 - src_n2) > 1e-4 * src_n2)
    throw NumericError("to_position: window too narrow (norm loss above 1e-4)");
  return res;
}

/// Momentum representation on an automatically sized grid; the identity for
/// anything that already has one.
inline WaveFunction to_momentum_auto(const WaveFunction& wf) {
  if (!wf.pgrid()) return wf;
  const double dx = wf.pgrid()->dx;
  const double K = 0.8 * kPi / dx;
  const double dk = 2.0 * K / 2047.0;
  return to_momentum(wf, {-K, dk, 2048});
}

/// Weighted L2 norm [ \int (1+x^2)^s |psi(x)|^2 dx ]^{1/2}.
inline WeightedNorm weighted_norm(const WaveFunction& wf, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("weighted_norm: s must be >= 0");
  auto dens = [&](double x) {
    return Complex{std::pow(1.0 + x * x, s) * std::norm(wf.psi(x)), 0.0};
  };
  double L;
  if (const auto* p = wf.pgrid()) {
    L = std::max(std::abs(p->x_min),
                 std::abs(p->x_min + p->dx * double(p->samples.size() - 1)));
    // divergence guard: weighted mass in the outer 10% of the window
    const double edge = 0.9 * L;
    const Complex tail = gl_composite(dens, edge, L, 8) +
                         gl_composite(dens, -L, -edge, 8);
    const Complex body = gl_composite(dens, -edge, edge, 64);
    if (tail.real() > 1e-6 * (body.real() + tail.real()))
      throw NumericError(
          "weighted_norm: unbounded (tail estimate above 1e-6 on grid window)");
  } else {
    L = wf.position_window();
    // stretch until the weight-amplified tail is negligible
    for (int iter = 0; iter < 40; ++iter) {
      const double t =
          std::pow(1.0 + L * L, s) * (std::norm(wf.psi(L)) + std::norm(wf.psi(-L))) * L;
      if (t < 1e-13) break;
      L *= 1.5;
    }
  }
  const QuadResult q = integrate_gk(dens, -L, L, 1e-12, 0.0, 6000, {0.0});
  return {s, std::sqrt(q.value.real())};
}

}  // namespace qdecay
