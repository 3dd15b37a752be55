#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdecay/quadrature.hpp"
#include "qdecay/special.hpp"
#include "qdecay/wavefunction.hpp"

namespace qdecay {

/// Conditioning of the binomial moment identity degrades factorially; orders
/// beyond this are not scanned by default.
inline constexpr int kDefaultMaxMomentOrder = 12;

/// Position-space moments mu_j = \int x^j psi(x) dx with certified absolute
/// error estimates.
struct MomentVector {
  std::vector<Complex> values;
  std::vector<double> abs_err;

  /// Mixed absolute/relative zero test: |mu_j| < 1e-10 (1 + sum_i |mu_i|).
  bool is_zero(std::size_t j) const {
    double scale = 1.0;
    for (const Complex& v : values) scale += std::abs(v);
    return std::abs(values[j]) < kZeroThreshold * scale;
  }
};

/// Entries <psi, G_{2j} psi> for j = 0..n, via the binomial moment identity.
struct GInnerProducts {
  std::vector<Complex> values;
  std::vector<double> abs_err;
};

namespace detail {

// Exact derivative psi_hat^{(j)}(0) for the analytic families: the Gaussian
// family is a power series N k^m sum_r (-a0)^r k^{2r} / r!, the bump vanishes
// identically near k = 0.
inline Complex analytic_deriv_zero(const WaveFunction& wf, int j) {
  if (const auto* g = wf.gaussian()) {
    if (j < g->m || (j - g->m) % 2 != 0) return {0.0, 0.0};
    const int r = (j - g->m) / 2;
    return {factorial(j) * g->amp * std::pow(-g->a0, r) / factorial(r), 0.0};
  }
  return {0.0, 0.0};  // bump: support excludes a neighbourhood of 0
}

struct GridMomentData {
  std::vector<Complex> samples;
  double lo = 0.0, step = 0.0;
};

inline GridMomentData position_samples(const WaveFunction& wf) {
  if (const auto* p = wf.pgrid()) return {p->samples, p->x_min, p->dx};
  const auto* m = wf.mgrid();
  const double K = wf.momentum_window();
  const double L = 0.7 * kPi / m->dk;
  const GridSpec g{-L, std::min(0.2 * kPi / std::max(1.0, K), 2.0 * L / 1023.0),
                   0};
  GridSpec gg = g;
  gg.count = std::size_t(std::ceil(2.0 * L / gg.step)) + 1;
  const WaveFunction pos = to_position(wf, gg);
  return {pos.pgrid()->samples, gg.lo, gg.step};
}

}  // namespace detail

/// Moments mu_j for j = 0..j_max.  Analytic families use exact closed forms
/// (odd orders vanish by parity rather than integrating to 1e-16 residue);
/// grid states use Gauss-Legendre panels on the truncated window with a
/// tail-mass criterion per order.
inline MomentVector moments(const WaveFunction& wf, int j_max) {
  if (j_max < 0) throw std::invalid_argument("moments: j_max must be >= 0");
  MomentVector mv;
  mv.values.resize(j_max + 1);
  mv.abs_err.resize(j_max + 1);

  if (wf.analytic()) {
    for (int j = 0; j <= j_max; ++j) {
      // mu_j = sqrt(2 pi) i^j psi_hat^{(j)}(0)
      const Complex d = detail::analytic_deriv_zero(wf, j);
      mv.values[j] = kSqrt2Pi * ipow(j) * d;
      mv.abs_err[j] = 8.0 * std::numeric_limits<double>::epsilon() *
                      std::abs(mv.values[j]);
    }
    return mv;
  }

  const detail::GridMomentData g = detail::position_samples(wf);
  const double lo = g.lo;
  const double hi = g.lo + g.step * double(g.samples.size() - 1);
  auto eval = [&](double x) {
    return detail::interp_cubic(g.samples, g.lo, g.step, x);
  };

  const double edge = 0.1 * (hi - lo);
  for (int j = 0; j <= j_max; ++j) {
    auto absf = [&](double x) {
      return Complex{std::pow(std::abs(x), j) * std::abs(eval(x)), 0.0};
    };
    const double body =
        gl_composite(absf, lo, hi, int(g.samples.size() / 8) + 16).real();
    const double tail = 3.0 * (gl_composite(absf, lo, lo + edge, 8).real() +
                               gl_composite(absf, hi - edge, hi, 8).real());
    if (tail > 1e-6 * (1.0 + body))
      throw NumericError("moments: tail criterion failed at order " +
                         std::to_string(j));
    auto f = [&](double x) { return std::pow(x, j) * eval(x); };
    const int panels = int(g.samples.size() / 8) + 16;
    const Complex coarse = gl_composite(f, lo, hi, panels);
    const Complex fine = gl_composite(f, lo, hi, 2 * panels);
    mv.values[j] = fine;
    mv.abs_err[j] = std::abs(fine - coarse) + tail +
                    1e-15 * body;
  }
  return mv;
}

/// (G_j psi)(x) = -(1 / (2 j!)) \int |x-y|^j psi(y) dy on the given nodes.
inline std::vector<Complex> g_apply(const WaveFunction& wf, int j,
                                    std::span<const double> x_grid) {
  if (j < 0) throw std::invalid_argument("g_apply: j must be >= 0");
  const double L = wf.position_window();
  std::vector<Complex> out(x_grid.size());
  const double scale = -0.5 / factorial(j);
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    auto f = [&](double y) {
      return std::pow(std::abs(x - y), j) * wf.psi(y);
    };
    const QuadResult q =
        integrate_gk(f, -L, L, 1e-12, 1e-14, 4000, {x});
    out[i] = scale * q.value;
  }
  return out;
}

/// <psi, G_{2j} psi> for j = 0..n from the moment identity
/// -2 (2j)! <psi, G_{2j} psi> = sum_i (-1)^i C(2j, i) conj(mu_{2j-i}) mu_i.
inline GInnerProducts g_inner_products(const WaveFunction& wf, int n) {
  if (n < 0) throw std::invalid_argument("g_inner_products: n must be >= 0");
  const MomentVector mv = moments(wf, 2 * n);
  GInnerProducts gp;
  gp.values.resize(n + 1);
  gp.abs_err.resize(n + 1);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int j = 0; j <= n; ++j) {
    Complex s{0.0, 0.0};
    double err = 0.0;
    for (int i = 0; i <= 2 * j; ++i) {
      const double w = 1.0 / (factorial(i) * factorial(2 * j - i));
      const Complex mu_hi = std::conj(mv.values[2 * j - i]);
      const Complex mu_lo = mv.values[i];
      const double sgn = (i % 2 == 0) ? 1.0 : -1.0;
      const Complex term = sgn * w * mu_hi * mu_lo;
      s += term;
      err += w * (std::abs(mu_hi) * mv.abs_err[i] +
                  std::abs(mu_lo) * mv.abs_err[2 * j - i] +
                  4.0 * eps * std::abs(term));
    }
    gp.values[j] = -0.5 * s;
    gp.abs_err[j] = 0.5 * err;
  }
  return gp;
}

inline Complex g_inner(const WaveFunction& wf, int j) {
  return g_inner_products(wf, j).values[j];
}

/// On-demand O(N^2) cross-check of g_inner by direct double quadrature of
/// the kernel -(1/(2 (2j)!)) |x-y|^{2j}.
inline Complex g_inner_direct(const WaveFunction& wf, int j) {
  if (j < 0) throw std::invalid_argument("g_inner_direct: j must be >= 0");
  // oscillatory position profiles (momentum support away from 0) need the
  // panel mesh to track the carrier frequency, which caps the usable window
  const double k_char = wf.bump() ? wf.bump()->d + wf.bump()->k0 : 0.0;
  const double L_cap = k_char > 0.0 ? 5.0 * 256.0 / (2.0 * k_char) : 1e9;
  double L = std::min(wf.position_window(), L_cap);
  // stretch so the kernel-amplified tail is negligible
  for (int iter = 0; iter < 30; ++iter) {
    const double t = std::pow(2.0 * L, 2 * j) *
                     (std::abs(wf.psi(L)) + std::abs(wf.psi(-L))) * L;
    if (t < 1e-11 || L * 1.4 > L_cap) break;
    L *= 1.4;
  }
  const int panels =
      std::clamp(int(std::ceil(2.0 * L * k_char / 5.0)), 32, 256);
  // axis nodes: composite GL16
  std::vector<double> xs, ws;
  const double h = 2.0 * L / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = -L + (p + 0.5) * h;
    for (int i = 0; i < 8; ++i) {
      xs.push_back(c - 0.5 * h * detail::kGl16Nodes[i]);
      ws.push_back(0.5 * h * detail::kGl16Weights[i]);
      xs.push_back(c + 0.5 * h * detail::kGl16Nodes[i]);
      ws.push_back(0.5 * h * detail::kGl16Weights[i]);
    }
  }
  std::vector<Complex> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = wf.psi(xs[i]);
  Complex acc{0.0, 0.0};
  for (std::size_t a = 0; a < xs.size(); ++a) {
    Complex inner{0.0, 0.0};
    for (std::size_t b = 0; b < xs.size(); ++b)
      inner += ws[b] * std::pow(std::abs(xs[a] - xs[b]), 2 * j) * vals[b];
    acc += ws[a] * std::conj(vals[a]) * inner;
  }
  return -acc / (2.0 * factorial(2 * j));
}

/// psi_hat^{(m)}(0) = (-i)^m (2 pi)^{-1/2} mu_m.
inline Complex psi_hat_deriv_zero(const WaveFunction& wf, int m) {
  if (m < 0)
    throw std::invalid_argument("psi_hat_deriv_zero: m must be >= 0");
  const MomentVector mv = moments(wf, m);
  return ipow(-m) * mv.values[m] / kSqrt2Pi;
}

/// Smallest m with |psi_hat^{(m)}(0)| above tol * scale, or nullopt when
/// every order up to max_order falls below tolerance (the class of states
/// whose survival probability decays faster than any power).
inline std::optional<int> zero_momentum_order(
    const WaveFunction& wf, double tol,
    int max_order = kDefaultMaxMomentOrder) {
  if (!(tol > 0.0))
    throw std::invalid_argument("zero_momentum_order: tol must be > 0");
  const MomentVector mv = moments(wf, max_order);
  std::vector<double> mag(max_order + 1);
  double scale = 0.0;
  for (int jj = 0; jj <= max_order; ++jj) {
    mag[jj] = std::abs(mv.values[jj]) / kSqrt2Pi;
    scale = std::max(scale, mag[jj]);
  }
  if (scale == 0.0) return std::nullopt;
  for (int jj = 0; jj <= max_order; ++jj)
    if (mag[jj] > tol * scale) return jj;
  return std::nullopt;
}

}  // namespace qdecay
