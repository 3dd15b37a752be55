#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "qdecay/moments.hpp"
#include "qdecay/propagation.hpp"
#include "qdecay/special.hpp"

namespace qdecay {

/// Partial-sum model of the survival amplitude at large t:
///   A(t) ~ sum_{j=0}^{order_n} c_j (i t)^{-j-1/2},
///   c_j = pi^{-1} (-1)^{j-1} Gamma(j+1/2) <psi, G_{2j} psi>.
struct AsymptoticModel {
  int order_n = 0;
  std::vector<Complex> coeffs;
  std::vector<double> coeff_err;
  std::optional<int> detected_m;  // nullopt: decays faster than any power
};

struct DecayFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;  // natural log of the prefactor C
  double rms_residual = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
};

/// Builds the expansion model.  order_n is clamped to the longest prefix of
/// coefficients whose moment errors certify them to three significant digits
/// (or certify them as zeros); uncertified terms are never reported.
inline AsymptoticModel build_model(const WaveFunction& wf, int n,
                                   double tol = kZeroThreshold) {
  if (n < 0) throw std::invalid_argument("build_model: n must be >= 0");
  const GInnerProducts gp = g_inner_products(wf, n);
  AsymptoticModel model;
  model.coeffs.resize(n + 1);
  model.coeff_err.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double pref = gamma_half(j) / kPi * ((j % 2 == 0) ? -1.0 : 1.0);
    model.coeffs[j] = pref * gp.values[j];
    model.coeff_err[j] = std::abs(pref) * gp.abs_err[j];
  }
  double scale = 1.0;
  for (const Complex& c : model.coeffs) scale += std::abs(c);
  int certified = -1;
  for (int j = 0; j <= n; ++j) {
    const bool zero_ok =
        std::abs(model.coeffs[j]) + model.coeff_err[j] < kZeroThreshold * scale;
    const bool rel_ok = model.coeff_err[j] <= 1e-3 * std::abs(model.coeffs[j]);
    if (!(zero_ok || rel_ok)) break;
    certified = j;
  }
  model.order_n = std::max(0, certified);
  model.detected_m = zero_momentum_order(wf, tol);
  return model;
}

/// Partial sum sum_{j<=order_n} c_j (i t)^{-j-1/2}, principal branch.
inline Complex eval_partial_sum(const AsymptoticModel& model, double t) {
  if (!(t > 0.0))
    throw std::invalid_argument("eval_partial_sum: t must be > 0");
  Complex s{0.0, 0.0};
  for (int j = 0; j <= model.order_n; ++j)
    s += model.coeffs[j] * it_inverse_half_power(j, t);
  return s;
}

/// Leading term of the survival probability,
///   t^{-2m-1} Gamma(m+1/2)^2 (m!)^{-4} |psi_hat^{(m)}(0)|^4.
inline double leading_survival_probability(const WaveFunction& wf, double t,
                                           double tol = kZeroThreshold) {
  if (!(t > 0.0))
    throw std::invalid_argument("leading_survival_probability: t must be > 0");
  const std::optional<int> m = zero_momentum_order(wf, tol);
  if (!m)
    throw NumericError(
        "leading_survival_probability: super-polynomial class (no leading power)");
  const double d = std::abs(psi_hat_deriv_zero(wf, *m));
  const double g = gamma_half(*m) / (factorial(*m) * factorial(*m));
  return std::pow(t, -(2 * *m + 1)) * g * g * d * d * d * d;
}

/// Least-squares fit of log |A(t)|^2 = log C + p log t over a window.  Uses
/// the log-magnitude channel so it works below double underflow.
inline DecayFit fit_power_law(const AmplitudeSeries& series, double t_lo,
                              double t_hi) {
  if (!(t_lo < t_hi))
    throw std::invalid_argument("fit_power_law: need t_lo < t_hi");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const double t = series.times[i];
    if (t < t_lo || t > t_hi || !(t > 0.0)) continue;
    const double y = series.log_abs2[i];
    if (!std::isfinite(y)) continue;  // failed or identically-zero points
    xs.push_back(std::log(t));
    ys.push_back(y);
  }
  if (xs.size() < 8)
    throw std::invalid_argument(
        "fit_power_law: underdetermined window (need >= 8 usable points)");
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  DecayFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.log_prefactor = (sy - fit.exponent * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.log_prefactor + fit.exponent * xs[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

/// Scaled remainder r(t) = |A(t) - partial_sum_n(t)| t^{n+1/2}.  For states
/// in the expansion's reach this decreases toward zero along the time tail.
inline std::vector<double> remainder_diagnostic(const WaveFunction& wf, int n,
                                                std::span<const double> times) {
  const AsymptoticModel model = build_model(wf, n);
  if (model.order_n < n)
    throw NumericError("remainder_diagnostic: order clamped to " +
                       std::to_string(model.order_n) +
                       " by moment certification");
  std::vector<double> r(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const Complex a = survival_amplitude(wf, t);
    const Complex p = eval_partial_sum(model, t);
    r[i] = std::abs(a - p) * std::pow(t, n + 0.5);
  }
  return r;
}

}  // namespace qdecay
