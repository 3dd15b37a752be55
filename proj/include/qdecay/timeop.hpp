#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "qdecay/moments.hpp"
#include "qdecay/propagation.hpp"
#include "qdecay/wavefunction.hpp"

namespace qdecay {

struct TimeOperatorReport {
  bool finite = false;
  double norm_value = std::numeric_limits<double>::infinity();
  Complex psi_hat_zero{0.0, 0.0};    // singular 1/k^2 coefficient source
  Complex psi_hat_prime_zero{0.0, 0.0};  // singular 1/k coefficient source
};

namespace detail {

// psi_hat'(k) for the built-in families; grids use fourth-order central
// differences with one-sided stencils at the boundary.
inline Complex psi_hat_prime(const WaveFunction& wf, double k) {
  if (const auto* g = wf.gaussian()) {
    const double e = std::exp(-g->a0 * k * k);
    const double mk = g->m > 0 ? g->m * std::pow(k, g->m - 1) : 0.0;
    return {g->amp * (mk - 2.0 * g->a0 * std::pow(k, g->m + 1)) * e, 0.0};
  }
  if (const auto* b = wf.bump()) {
    const double u = k - b->d;
    const double den = b->k0 * b->k0 - u * u;
    if (den <= 0.0) return {0.0, 0.0};
    const double v = b->amp * std::exp(-1.0 / den);
    return {v * (-2.0 * u / (den * den)), 0.0};
  }
  const auto* m = wf.mgrid();
  if (!m)
    throw std::invalid_argument("t0_apply: needs a momentum representation");
  const auto& s = m->samples;
  const double h = m->dk;
  const std::ptrdiff_t n = std::ptrdiff_t(s.size());
  std::vector<Complex> ds(s.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      ds[i] = (-s[i + 2] + 8.0 * s[i + 1] - 8.0 * s[i - 1] + s[i - 2]) /
              (12.0 * h);
    } else if (i + 4 < n && i < 2) {
      ds[i] = (-25.0 * s[i] + 48.0 * s[i + 1] - 36.0 * s[i + 2] +
               16.0 * s[i + 3] - 3.0 * s[i + 4]) /
              (12.0 * h);
    } else {
      ds[i] = (25.0 * s[i] - 48.0 * s[i - 1] + 36.0 * s[i - 2] -
               16.0 * s[i - 3] + 3.0 * s[i - 4]) /
              (12.0 * h);
    }
  }
  return interp_cubic(ds, m->k_min, h, k);
}

}  // namespace detail

/// Momentum-space action of the time operator,
///   (T0 psi)^(k) = (i/4) (2 psi_hat'(k)/k - psi_hat(k)/k^2).
inline std::vector<Complex> t0_apply(const WaveFunction& wf,
                                     std::span<const double> k_grid) {
  for (double k : k_grid)
    if (k == 0.0 || std::abs(k) < 1e-300)
      throw std::invalid_argument("t0_apply: grid must exclude k = 0");
  const WaveFunction src = to_momentum_auto(wf);
  std::vector<Complex> out(k_grid.size());
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    const double k = k_grid[i];
    const Complex ph = src.psi_hat(k);
    const Complex dph = detail::psi_hat_prime(src, k);
    out[i] = Complex{0.0, 0.25} * (2.0 * dph / k - ph / (k * k));
  }
  return out;
}

/// ||T0 psi||: finite exactly when psi_hat and psi_hat' vanish at k = 0.
/// The finite-case quadrature excludes a symmetric puncture at the origin
/// and halves its radius until convergence; a diverging schedule would
/// expose a false "finite" classification.
inline TimeOperatorReport t0_norm(const WaveFunction& wf_in) {
  const WaveFunction wf = to_momentum_auto(wf_in);
  const MomentVector mv = moments(wf, 2);
  TimeOperatorReport rep;
  rep.psi_hat_zero = mv.values[0] / kSqrt2Pi;
  rep.psi_hat_prime_zero = ipow(-1) * mv.values[1] / kSqrt2Pi;
  double scale = 1.0;
  for (const Complex& v : mv.values) scale += std::abs(v) / kSqrt2Pi;
  rep.finite = std::abs(rep.psi_hat_zero) < kZeroThreshold * scale &&
               std::abs(rep.psi_hat_prime_zero) < kZeroThreshold * scale;
  if (!rep.finite) {
    rep.norm_value = std::numeric_limits<double>::infinity();
    return rep;
  }

  double K, k_scale;
  if (const auto* g = wf.gaussian()) {
    K = wf.momentum_window();
    k_scale = std::sqrt((g->m + 0.5) / (2.0 * g->a0));
  } else if (const auto* b = wf.bump()) {
    K = b->d + b->k0;
    k_scale = b->d;
  } else {
    K = wf.momentum_window();
    k_scale = 0.25 * K;
  }

  auto dens = [&](double k) -> Complex {
    const Complex ph = wf.psi_hat(k);
    const Complex dph = detail::psi_hat_prime(wf, k);
    const Complex v = Complex{0.0, 0.25} * (2.0 * dph / k - ph / (k * k));
    return {std::norm(v), 0.0};
  };

  double rho = 1e-2 * k_scale;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int growing = 0;
  for (int iter = 0; iter < 20; ++iter) {
    const double body =
        integrate_gk(dens, rho, K, 1e-12, 1e-16, 3000).value.real() +
        integrate_gk(dens, -K, -rho, 1e-12, 1e-16, 3000).value.real();
    // midpoint estimate of the punctured sliver; O(rho^3) for finite states
    const double sliver =
        rho * (dens(0.5 * rho).real() + dens(-0.5 * rho).real());
    const double value = std::sqrt(body + sliver);
    if (std::isfinite(prev)) {
      if (std::abs(value - prev) < 1e-8) {
        rep.norm_value = value;
        return rep;
      }
      growing += (value > prev * (1.0 + 1e-3)) ? 1 : -growing;
      if (growing >= 6) {
        rep.finite = false;  // puncture schedule diverged
        rep.norm_value = std::numeric_limits<double>::infinity();
        return rep;
      }
    }
    prev = value;
    rho *= 0.5;
  }
  rep.norm_value = prev;
  return rep;
}

/// Pointwise check of |A(t)|^2 <= 4 ||T0 psi||^2 ||psi||^2 / t^2.
inline std::vector<bool> check_decay_bound(const WaveFunction& wf,
                                           const AmplitudeSeries& series) {
  const TimeOperatorReport rep = t0_norm(wf);
  if (!rep.finite)
    throw NumericError("check_decay_bound: bound vacuous (||T0 psi|| infinite)");
  const double n2 = wf.normalization() * wf.normalization();
  std::vector<bool> ok(series.times.size());
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t == 0.0) {
      ok[i] = true;  // right side infinite
      continue;
    }
    const double bound =
        4.0 * rep.norm_value * rep.norm_value * n2 / (t * t);
    const double abs2 = std::exp(series.log_abs2[i]);
    const double slack = 2.0 * series.err_est[i] + 1e-12;
    ok[i] = abs2 <= bound + slack;
  }
  return ok;
}

}  // namespace qdecay
