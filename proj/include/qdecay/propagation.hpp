#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdecay/moments.hpp"
#include "qdecay/oscillatory.hpp"
#include "qdecay/quadrature.hpp"
#include "qdecay/special.hpp"
#include "qdecay/wavefunction.hpp"

namespace qdecay {

enum class AmplitudeMethod { ClosedForm, MomentumQuadrature, PositionKernel };

inline const char* to_string(AmplitudeMethod m) {
  switch (m) {
    case AmplitudeMethod::ClosedForm: return "closed_form";
    case AmplitudeMethod::MomentumQuadrature: return "momentum_quadrature";
    default: return "position_kernel";
  }
}

struct SurvivalOptions {
  double abs_tol = 1e-8;  // required absolute accuracy of A(t)
};

/// Survival amplitude A(t) sampled on a time grid.  amps holds the complex
/// values (zero once past double underflow); log_abs2 carries log|A(t)|^2 at
/// full range so power-law fits work arbitrarily deep into the tail.
struct AmplitudeSeries {
  std::vector<double> times;
  std::vector<Complex> amps;
  std::vector<double> log_abs2;
  AmplitudeMethod method = AmplitudeMethod::MomentumQuadrature;
  std::vector<double> err_est;
};

namespace detail {

// Beyond this phase volume, real-axis quadrature of exp(-i t k^2) gives way
// to contour evaluation (analytic families) or the Filon rule (grids).
inline constexpr double kOscillatoryCrossover = 50.0;

inline LogComplex survival_gaussian_closed(const GaussianFamilyParams& g,
                                           double t) {
  const Complex A = std::pow(Complex{1.0, t / (2.0 * g.a0)}, -(g.m + 0.5));
  return LogComplex::from(A);
}

// Steepest-descent ray k = e^{-i pi/4} xi: the quadratic phase becomes a
// real Gaussian damping and the integrand loses all t-dependent oscillation,
// so relative accuracy stays at machine level no matter how small A(t) gets.
inline LogQuadResult survival_gaussian_rotated(const GaussianFamilyParams& g,
                                               double t) {
  const double N2 = g.amp * g.amp;
  const double xi_max = std::sqrt((50.0 + 14.0 * g.m) / t);
  auto f = [&](double xi) -> Complex {
    return std::pow(xi, 2 * g.m) * std::exp(Complex{-t * xi * xi, 2.0 * g.a0 * xi * xi});
  };
  const QuadResult q = integrate_gk(f, 0.0, xi_max, 1e-14, 0.0, 3000);
  const double ang = -kPi * (2 * g.m + 1) / 4.0;
  const Complex A = 2.0 * N2 * Complex{std::cos(ang), std::sin(ang)} * q.value;
  LogQuadResult r;
  r.value = LogComplex::from(A);
  const double abs_err = 2.0 * N2 * (q.abs_err + 1e-18 * std::abs(q.value));
  r.log_abs_err = abs_err > 0.0 ? std::log(abs_err)
                                : -std::numeric_limits<double>::infinity();
  return r;
}

// Tent contour for the compactly supported bump: 45-degree descents from
// both support endpoints joined at depth k0/2.  The endpoint essential
// singularities force the descent angle into (0, pi/2) measured into the
// lower half-plane; +-45 degrees balances amplitude and phase decay.
inline LogQuadResult survival_bump_contour(const MomentumBumpParams& p,
                                           double t) {
  const double a = p.d - p.k0, b = p.d + p.k0;
  const double h = 0.5 * p.k0;
  const double umax = std::sqrt(2.0) * h;
  const double lognsq = 2.0 * std::log(p.amp);
  auto phi = [&](Complex z) -> Complex {
    const Complex u = z - p.d;
    return lognsq - 2.0 / (p.k0 * p.k0 - u * u) - Complex{0.0, t} * z * z;
  };
  const Complex leg_dir{std::sqrt(0.5), -std::sqrt(0.5)};  // e^{-i pi/4}

  auto graded = [&](double ustar) {
    std::vector<double> s;
    for (double u = std::min(ustar, 0.25 * umax) / 64.0; u < umax; u *= 2.0)
      s.push_back(u);
    return s;
  };
  const double ustar_a = 1.0 / std::sqrt(2.0 * t * std::max(a * p.k0, 0.25));
  const double ustar_b = 1.0 / std::sqrt(2.0 * t * std::max(b * p.k0, 0.25));

  std::vector<PathSegment> path;
  path.push_back({[=](double u) { return Complex{a, 0.0} + u * leg_dir; },
                  [=](double) { return leg_dir; },
                  0.0, umax, graded(ustar_a)});
  path.push_back({[=](double x) { return Complex{x, -h}; },
                  [=](double) { return Complex{1.0, 0.0}; },
                  a + h, b - h, {}});
  path.push_back({[=](double v) { return Complex{b, 0.0} - (umax - v) * std::conj(leg_dir); },
                  [=](double) { return std::conj(leg_dir); },
                  0.0, umax,
                  [&] {
                    std::vector<double> s = graded(ustar_b);
                    for (double& u : s) u = umax - u;
                    std::sort(s.begin(), s.end());
                    return s;
                  }()});
  return integrate_exponential_path(phi, path, 1e-12, 3000);
}

// Momentum-space quadrature below the oscillatory crossover: plain adaptive
// Gauss-Kronrod on |psi_hat(k)|^2 exp(-i t k^2).
inline LogQuadResult survival_direct_gk(const WaveFunction& wf, double t,
                                        double k_lo, double k_hi) {
  auto f = [&](double k) -> Complex {
    const double s = std::norm(wf.psi_hat(k));
    return s * std::exp(Complex{0.0, -t * k * k});
  };
  std::vector<double> seeds;
  if (k_lo < 0.0 && k_hi > 0.0) seeds.push_back(0.0);
  const QuadResult q = integrate_gk(f, k_lo, k_hi, 1e-13, 1e-16, 6000, seeds);
  LogQuadResult r;
  r.value = LogComplex::from(q.value);
  r.log_abs_err = q.abs_err > 0.0 ? std::log(q.abs_err)
                                  : -std::numeric_limits<double>::infinity();
  return r;
}

// Filon path for sampled momentum states at large t: substitute lam = k^2 so
// the phase is linear, fold both +-sqrt(lam) branches into W(lam), and keep
// the non-oscillatory inner disk |k| < 3/sqrt(t) on a plain rule.  Cost is
// flat in t; the error estimate is honest and certifies the usable t-range.
inline LogQuadResult survival_grid_filon(const MomentumGridData& m, double t) {
  const double k_lo = m.k_min;
  const double k_hi = m.k_min + m.dk * double(m.samples.size() - 1);
  auto S = [&](double k) -> double {
    if (k < k_lo || k > k_hi) return 0.0;
    return std::norm(detail::interp_cubic(m.samples, m.k_min, m.dk, k));
  };
  auto W = [&](double lam) -> Complex {
    const double rk = std::sqrt(lam);
    return Complex{(S(rk) + S(-rk)) / (2.0 * rk), 0.0};
  };
  const double kc = 3.0 / std::sqrt(t);
  Complex total{0.0, 0.0};
  double err = 0.0;
  // inner disk, phase below ~9 rad
  const double inner_lo = std::max(k_lo, -kc);
  const double inner_hi = std::min(k_hi, kc);
  if (inner_lo < inner_hi) {
    auto f = [&](double k) -> Complex {
      return S(k) * std::exp(Complex{0.0, -t * k * k});
    };
    const QuadResult q = integrate_gk(f, inner_lo, inner_hi, 1e-13, 1e-16, 2000);
    total += q.value;
    err += q.abs_err;
  }
  // outer region in lam, split where a +- branch begins or ends
  std::vector<double> edges;
  const double lam_lo = (inner_lo < inner_hi) ? kc * kc
                                              : std::min(k_lo * k_lo, k_hi * k_hi);
  const double lam_hi = std::max(k_lo * k_lo, k_hi * k_hi);
  edges.push_back(lam_lo);
  for (double cand : {k_lo * k_lo, k_hi * k_hi})
    if (cand > lam_lo * (1.0 + 1e-12) && cand < lam_hi * (1.0 - 1e-12))
      edges.push_back(cand);
  edges.push_back(lam_hi);
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    const FilonResult fr = filon_linear_phase(W, edges[i], edges[i + 1], t);
    total += fr.value;
    err += fr.abs_err;
  }
  LogQuadResult r;
  r.value = LogComplex::from(total);
  r.log_abs_err = err > 0.0 ? std::log(err)
                            : -std::numeric_limits<double>::infinity();
  return r;
}

// Dispatch for sampled momentum states, plus a decimation cross-check: the
// quadrature rules only see the interpolant, so sampling error is estimated
// by re-running on every other sample and folding in the difference.
inline LogQuadResult survival_grid(const MomentumGridData& m, double t,
                                   double K) {
  auto run = [&](const MomentumGridData& g) {
    const double k_hi = g.k_min + g.dk * double(g.samples.size() - 1);
    if (t * K * K <= kOscillatoryCrossover) {
      WaveFunction wf = WaveFunction::momentum_grid(g.samples, g.k_min, g.dk);
      return survival_direct_gk(wf, t, g.k_min, k_hi);
    }
    return survival_grid_filon(g, t);
  };
  LogQuadResult full = run(m);
  if (m.samples.size() >= 33) {
    MomentumGridData half;
    half.k_min = m.k_min;
    half.dk = 2.0 * m.dk;
    for (std::size_t i = 0; i < m.samples.size(); i += 2)
      half.samples.push_back(m.samples[i]);
    const LogQuadResult coarse = run(half);
    const double gap = std::abs(full.value.value() - coarse.value.value());
    const double err = std::exp(full.log_abs_err) + gap / 10.0;
    full.log_abs_err = err > 0.0 ? std::log(err)
                                 : -std::numeric_limits<double>::infinity();
  }
  return full;
}

// Free propagator value at one point:
// psi(x, t) = (4 pi i t)^{-1/2} \int exp(i (x-y)^2 / (4 t)) psi(y) dy.
inline Complex kernel_point(const WaveFunction& wf, double t, double x,
                            double window) {
  if (t == 0.0)
    throw std::invalid_argument("propagate: t = 0 on kernel path; use identity");
  const Complex pref = std::pow(Complex{0.0, 4.0 * kPi * t}, -0.5);
  auto f = [&](double y) -> Complex {
    const double d = x - y;
    return std::exp(Complex{0.0, d * d / (4.0 * t)}) * wf.psi(y);
  };
  const QuadResult q =
      integrate_gk(f, -window, window, 1e-11, 1e-14, 6000, {x});
  return pref * q.value;
}

inline LogQuadResult survival_position_kernel(const WaveFunction& wf,
                                              double t) {
  const double L = wf.position_window();
  auto f = [&](double x) -> Complex {
    return std::conj(wf.psi(x)) * kernel_point(wf, t, x, L);
  };
  const QuadResult q = integrate_gk(f, -L, L, 1e-10, 1e-12, 900);
  LogQuadResult r;
  r.value = LogComplex::from(q.value);
  const double err = q.abs_err + 3e-11 * std::max(1.0, q.l1);
  r.log_abs_err = std::log(err);
  return r;
}

}  // namespace detail

/// A(t) = <psi, exp(-i t H0) psi> in log form.  Positive t only does the
/// work; A(-t) is the conjugate by integrand conjugation, and A(0) is the
/// squared norm.
inline LogQuadResult survival_amplitude_log(
    const WaveFunction& wf, double t, AmplitudeMethod method,
    const SurvivalOptions& opts = {}) {
  if (t == 0.0) {
    LogQuadResult r;
    r.value = LogComplex::from(
        Complex{wf.normalization() * wf.normalization(), 0.0});
    r.log_abs_err = std::log(1e-14);
    return r;
  }
  if (t < 0.0) {
    LogQuadResult r = survival_amplitude_log(wf, -t, method, opts);
    r.value.phase = -r.value.phase;
    return r;
  }

  LogQuadResult r;
  switch (method) {
    case AmplitudeMethod::ClosedForm: {
      const auto* g = wf.gaussian();
      if (!g)
        throw std::invalid_argument(
            "survival_amplitude: closed form available only for the Gaussian family");
      r.value = detail::survival_gaussian_closed(*g, t);
      r.log_abs_err = r.value.log_abs + std::log(1e-14);
      break;
    }
    case AmplitudeMethod::MomentumQuadrature: {
      if (const auto* g = wf.gaussian()) {
        const double K = wf.momentum_window();
        if (t * K * K <= detail::kOscillatoryCrossover)
          r = detail::survival_direct_gk(wf, t, -K, K);
        else
          r = detail::survival_gaussian_rotated(*g, t);
      } else if (const auto* b = wf.bump()) {
        const double K = b->d + b->k0;
        if (t * K * K <= detail::kOscillatoryCrossover)
          r = detail::survival_direct_gk(wf, t, b->d - b->k0, b->d + b->k0);
        else
          r = detail::survival_bump_contour(*b, t);
      } else if (const auto* m = wf.mgrid()) {
        r = detail::survival_grid(*m, t, wf.momentum_window());
      } else {
        throw std::invalid_argument(
            "survival_amplitude: transform position grids with to_momentum first");
      }
      break;
    }
    case AmplitudeMethod::PositionKernel:
      r = detail::survival_position_kernel(wf, t);
      break;
  }
  if (r.log_abs_err > std::log(opts.abs_tol))
    throw NumericError(
        "survival_amplitude: quadrature error estimate " +
        std::to_string(std::exp(r.log_abs_err)) +
        " exceeds tolerance " + std::to_string(opts.abs_tol) + " at t = " +
        std::to_string(t));
  return r;
}

inline Complex survival_amplitude(
    const WaveFunction& wf, double t,
    std::optional<AmplitudeMethod> method = std::nullopt,
    const SurvivalOptions& opts = {}) {
  const AmplitudeMethod m = method.value_or(
      wf.gaussian() ? AmplitudeMethod::ClosedForm
                    : AmplitudeMethod::MomentumQuadrature);
  return survival_amplitude_log(wf, t, m, opts).value.value();
}

/// Batched survival amplitude.  Per-point failures are flagged with
/// err_est = infinity and NaN amplitudes; the series is still returned.
inline AmplitudeSeries survival_series(
    const WaveFunction& wf, std::vector<double> times,
    std::optional<AmplitudeMethod> method = std::nullopt,
    const SurvivalOptions& opts = {}) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0)
      throw std::invalid_argument("survival_series: times must be >= 0");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::invalid_argument("survival_series: times must be strictly increasing");
  }
  const WaveFunction* src = &wf;
  std::optional<WaveFunction> transformed;
  if (wf.pgrid()) {
    // one transform up front instead of one per time point
    transformed = to_momentum_auto(wf);
    src = &*transformed;
  }

  AmplitudeSeries s;
  s.times = std::move(times);
  s.method = method.value_or(src->gaussian()
                                 ? AmplitudeMethod::ClosedForm
                                 : AmplitudeMethod::MomentumQuadrature);
  s.amps.resize(s.times.size());
  s.log_abs2.resize(s.times.size());
  s.err_est.resize(s.times.size());
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    try {
      const LogQuadResult r =
          survival_amplitude_log(*src, s.times[i], s.method, opts);
      s.amps[i] = r.value.value();
      s.log_abs2[i] = r.value.log_abs2();
      s.err_est[i] = std::exp(r.log_abs_err);
    } catch (const NumericError&) {
      s.amps[i] = Complex{std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN()};
      s.log_abs2[i] = std::numeric_limits<double>::quiet_NaN();
      s.err_est[i] = std::numeric_limits<double>::infinity();
    }
  }
  return s;
}

enum class PropagationRoute { Auto, PositionKernel, MomentumPhase };

/// psi(. , t) on the given position grid.  t = 0 is the identity; the kernel
/// quadrature itself refuses t = 0 because of the (4 pi i t)^{-1/2} factor.
inline std::vector<Complex> propagate(
    const WaveFunction& wf, double t, const GridSpec& grid,
    PropagationRoute route = PropagationRoute::Auto) {
  if (grid.count == 0 || !(grid.step > 0.0))
    throw std::invalid_argument("propagate: bad target grid");
  std::vector<Complex> out(grid.count);
  if (t == 0.0) {
    if (route == PropagationRoute::PositionKernel)
      throw std::invalid_argument(
          "propagate: t = 0 on kernel path; use identity");
    for (std::size_t i = 0; i < grid.count; ++i)
      out[i] = wf.psi(grid.lo + double(i) * grid.step);
    return out;
  }
  if (route == PropagationRoute::Auto)
    route = wf.mgrid() ? PropagationRoute::MomentumPhase
                       : PropagationRoute::PositionKernel;

  if (route == PropagationRoute::PositionKernel) {
    const double L = wf.position_window();
    for (std::size_t i = 0; i < grid.count; ++i)
      out[i] = detail::kernel_point(wf, t, grid.lo + double(i) * grid.step, L);
  } else {
    if (const auto* m = wf.mgrid()) {
      std::vector<Complex> evolved(m->samples.size());
      for (std::size_t i = 0; i < m->samples.size(); ++i) {
        const double k = m->k_min + double(i) * m->dk;
        evolved[i] = m->samples[i] * std::exp(Complex{0.0, -t * k * k});
      }
      for (std::size_t j = 0; j < grid.count; ++j) {
        const double x = grid.lo + double(j) * grid.step;
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < evolved.size(); ++i) {
          const double w = (i == 0 || i + 1 == evolved.size()) ? 0.5 : 1.0;
          const double k = m->k_min + double(i) * m->dk;
          acc += w * evolved[i] * std::exp(Complex{0.0, k * x});
        }
        out[j] = acc * m->dk / kSqrt2Pi;
      }
    } else {
      double k_lo, k_hi;
      if (const auto* b = wf.bump()) {
        k_lo = b->d - b->k0;
        k_hi = b->d + b->k0;
      } else {
        k_hi = wf.momentum_window();
        k_lo = -k_hi;
      }
      for (std::size_t j = 0; j < grid.count; ++j) {
        const double x = grid.lo + double(j) * grid.step;
        auto f = [&](double k) -> Complex {
          return wf.psi_hat(k) * std::exp(Complex{0.0, k * x - t * k * k});
        };
        std::vector<double> seeds;
        if (k_lo < 0.0 && k_hi > 0.0) seeds.push_back(0.0);
        out[j] = integrate_gk(f, k_lo, k_hi, 1e-12, 1e-15, 6000, seeds).value /
                 kSqrt2Pi;
      }
    }
  }

  // window sanity: the evolved state must still fit on the target grid
  double n2 = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double w = (i == 0 || i + 1 == out.size()) ? 0.5 : 1.0;
    n2 += w * std::norm(out[i]);
  }
  const double nrm = std::sqrt(n2 * grid.step);
  if (std::abs(nrm - wf.normalization()) > 1e-4 * wf.normalization())
    throw NumericError("propagate: norm loss " +
                       std::to_string(std::abs(nrm - wf.normalization())) +
                       "; window too narrow or grid too coarse");
  return out;
}

/// Probability of finding the particle inside [b_lo, b_hi] at time t.
inline double nonescape_probability(const WaveFunction& wf, double t,
                                    double b_lo, double b_hi) {
  if (!(b_lo < b_hi) || !std::isfinite(b_lo) || !std::isfinite(b_hi))
    throw std::invalid_argument("nonescape_probability: need bounded b_lo < b_hi");
  const double L = wf.position_window();
  auto dens = [&](double x) -> Complex {
    const Complex v = (t == 0.0) ? wf.psi(x) : detail::kernel_point(wf, t, x, L);
    return {std::norm(v), 0.0};
  };
  const QuadResult q = integrate_gk(dens, b_lo, b_hi, 1e-9, 1e-12, 600);
  const double v = q.value.real();
  if (v < -1e-9 || v > 1.0 + 1e-6)
    throw NumericError("nonescape_probability: value outside [0,1] beyond quadrature error");
  return std::clamp(v, 0.0, 1.0);
}

/// Log- or linearly spaced time grid helper shared by the CLI and tests.
inline std::vector<double> make_time_grid(double t_lo, double t_hi,
                                          std::size_t count, bool log_scale) {
  if (!(t_lo < t_hi))
    throw std::invalid_argument("make_time_grid: need t_lo < t_hi");
  if (count < 2) throw std::invalid_argument("make_time_grid: count >= 2");
  if (log_scale && !(t_lo > 0.0))
    throw std::invalid_argument("make_time_grid: log scale needs t_lo > 0");
  std::vector<double> ts(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = double(i) / double(count - 1);
    ts[i] = log_scale ? t_lo * std::pow(t_hi / t_lo, u)
                      : t_lo + (t_hi - t_lo) * u;
  }
  return ts;
}

}  // namespace qdecay
