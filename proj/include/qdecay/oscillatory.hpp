#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <vector>

#include "qdecay/quadrature.hpp"

namespace qdecay {

/// A complex number stored as log-magnitude plus phase, so survival
/// amplitudes far below the double underflow threshold stay usable.
struct LogComplex {
  double log_abs = -std::numeric_limits<double>::infinity();
  double phase = 0.0;

  Complex value() const {
    if (!std::isfinite(log_abs)) return {0.0, 0.0};
    const double r = std::exp(log_abs);  // underflows to 0 gracefully
    return {r * std::cos(phase), r * std::sin(phase)};
  }
  double log_abs2() const { return 2.0 * log_abs; }

  static LogComplex from(Complex z) {
    const double a = std::abs(z);
    if (a == 0.0) return {};
    return {std::log(a), std::arg(z)};
  }
};

/// Accumulates sums of the form sum_i exp(g_i) * m_i without overflow or
/// underflow: all mantissas are kept relative to the running maximum g.
class ScaledSum {
 public:
  void add(double log_scale, Complex mantissa, double err_mantissa = 0.0) {
    if (mantissa == Complex{0.0, 0.0} && err_mantissa == 0.0) return;
    if (!std::isfinite(log_scale)) return;  // exp(-inf) * anything = 0
    if (log_scale > scale_) {
      const double down = std::exp(scale_ - log_scale);
      sum_ *= down;
      err_ *= down;
      scale_ = log_scale;
    }
    const double up = std::exp(log_scale - scale_);
    sum_ += mantissa * up;
    err_ += err_mantissa * up;
  }

  LogComplex value() const {
    const double a = std::abs(sum_);
    if (a == 0.0 || !std::isfinite(scale_)) return {};
    return {scale_ + std::log(a), std::arg(sum_)};
  }
  /// log of the accumulated absolute error.
  double log_err() const {
    if (err_ <= 0.0 || !std::isfinite(scale_))
      return -std::numeric_limits<double>::infinity();
    return scale_ + std::log(err_);
  }

 private:
  double scale_ = -std::numeric_limits<double>::infinity();
  Complex sum_{0.0, 0.0};
  double err_ = 0.0;
};

struct LogQuadResult {
  LogComplex value;
  double log_abs_err = -std::numeric_limits<double>::infinity();
};

/// One parametrized leg of an integration path in the complex plane.
struct PathSegment {
  std::function<Complex(double)> z;   // position z(u)
  std::function<Complex(double)> dz;  // derivative z'(u)
  double u0 = 0.0, u1 = 1.0;
  std::vector<double> seeds;  // additional breakpoints in (u0, u1)
};

namespace detail {

struct ScaledPanel {
  double a, b;
  double scale;     // log factor pulled out of the panel
  Complex value;    // panel integral / exp(scale)
  double err;       // error estimate / exp(scale)
  const PathSegment* seg;
  double key() const {
    return (err > 0.0 && std::isfinite(scale)) ? scale + std::log(err)
                                               : -std::numeric_limits<double>::infinity();
  }
};

// GK15 panel of exp(phi(z(u))) z'(u) du with the largest Re(phi) at the
// nodes factored out, so values spanning thousands of e-folds stay finite.
template <class Phi>
ScaledPanel scaled_gk15_panel(Phi&& phi, const PathSegment& seg, double a,
                              double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  std::array<double, 15> us;
  us[0] = c;
  for (int i = 0; i < 7; ++i) {
    us[1 + 2 * i] = c - h * kGk15Nodes[i];
    us[2 + 2 * i] = c + h * kGk15Nodes[i];
  }
  std::array<Complex, 15> ph;
  std::array<Complex, 15> dz;
  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 15; ++i) {
    ph[i] = phi(seg.z(us[i]));
    dz[i] = seg.dz(us[i]);
    mx = std::max(mx, ph[i].real());
  }
  if (!std::isfinite(mx))
    return {a, b, -std::numeric_limits<double>::infinity(), {0.0, 0.0}, 0.0, &seg};
  auto val = [&](int i) { return std::exp(ph[i] - Complex{mx, 0.0}) * dz[i]; };
  Complex k15 = kGk15WeightsK[7] * val(0);
  Complex g7 = kGk15WeightsG[3] * val(0);
  for (int i = 0; i < 7; ++i) {
    const Complex f1 = val(1 + 2 * i);
    const Complex f2 = val(2 + 2 * i);
    k15 += kGk15WeightsK[i] * (f1 + f2);
    if (i % 2 == 1) g7 += kGk15WeightsG[i / 2] * (f1 + f2);
  }
  return {a, b, mx, k15 * h, std::abs(k15 - g7) * std::abs(h), &seg};
}

}  // namespace detail

/// Adaptive integration of exp(phi(z)) dz along a piecewise path.  phi is a
/// complex exponent; the result is returned in log form together with a log
/// absolute error.  This is the workhorse for steepest-descent contours whose
/// integrands span far more dynamic range than doubles.
template <class Phi>
LogQuadResult integrate_exponential_path(Phi&& phi,
                                         const std::vector<PathSegment>& path,
                                         double rtol = 1e-12,
                                         int max_panels = 3000) {
  auto cmp = [](const detail::ScaledPanel& x, const detail::ScaledPanel& y) {
    return x.key() < y.key();
  };
  std::priority_queue<detail::ScaledPanel, std::vector<detail::ScaledPanel>,
                      decltype(cmp)>
      heap(cmp);
  std::vector<detail::ScaledPanel> done;

  int n = 0;
  for (const auto& seg : path) {
    std::vector<double> pts;
    pts.push_back(seg.u0);
    for (double s : seg.seeds)
      if (s > seg.u0 && s < seg.u1) pts.push_back(s);
    pts.push_back(seg.u1);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      heap.push(detail::scaled_gk15_panel(phi, seg, pts[i], pts[i + 1]));
      ++n;
    }
  }

  auto totals = [&]() {
    ScaledSum s;
    std::vector<detail::ScaledPanel> all = done;
    auto copy = heap;
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    for (const auto& p : all) s.add(p.scale, p.value, p.err);
    return s;
  };

  while (n < max_panels) {
    ScaledSum s = totals();
    const LogComplex v = s.value();
    if (!std::isfinite(v.log_abs)) break;
    if (s.log_err() <= v.log_abs + std::log(rtol)) break;
    if (heap.empty()) break;
    detail::ScaledPanel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b) || p.err == 0.0) {
      done.push_back(p);
      continue;
    }
    heap.push(detail::scaled_gk15_panel(phi, *p.seg, p.a, m));
    heap.push(detail::scaled_gk15_panel(phi, *p.seg, m, p.b));
    ++n;
  }

  ScaledSum s = totals();
  return {s.value(), s.log_err()};
}

struct FilonResult {
  Complex value{0.0, 0.0};
  double abs_err = 0.0;
};

namespace detail {

// Exact moments int_0^1 u^q exp(-i w u) du, q = 0..3, stable for small w.
inline std::array<Complex, 4> filon_moments(double w) {
  std::array<Complex, 4> I;
  if (std::abs(w) < 0.5) {
    for (int q = 0; q < 4; ++q) {
      Complex s{0.0, 0.0}, term{1.0, 0.0};
      for (int k = 0;; ++k) {
        const Complex add = term / double(q + k + 1);
        s += add;
        if (std::abs(add) < 1e-19 * std::abs(s) || k > 42) break;
        term *= Complex{0.0, -w} / double(k + 1);
      }
      I[q] = s;
    }
    return I;
  }
  const Complex e = std::exp(Complex{0.0, -w});
  const Complex iw{0.0, w};
  I[0] = (1.0 - e) / iw;
  for (int q = 1; q < 4; ++q) I[q] = (double(q) * I[q - 1] - e) / iw;
  return I;
}

// One cubic Filon panel: fit W at 4 equispaced nodes, integrate the cubic
// against exp(-i t lam) exactly.
template <class W>
Complex filon_panel(W&& w, double lam0, double h, double t, double& l1) {
  const Complex f0 = w(lam0);
  const Complex f1 = w(lam0 + h / 3.0);
  const Complex f2 = w(lam0 + 2.0 * h / 3.0);
  const Complex f3 = w(lam0 + h);
  const Complex c0 = f0;
  const Complex c1 = (-11.0 * f0 + 18.0 * f1 - 9.0 * f2 + 2.0 * f3) / 2.0;
  const Complex c2 = (18.0 * f0 - 45.0 * f1 + 36.0 * f2 - 9.0 * f3) / 2.0;
  const Complex c3 = (-9.0 * f0 + 27.0 * f1 - 27.0 * f2 + 9.0 * f3) / 2.0;
  const auto I = filon_moments(t * h);
  const Complex ph = std::exp(Complex{0.0, -t * lam0});
  const Complex v = h * ph * (c0 * I[0] + c1 * I[1] + c2 * I[2] + c3 * I[3]);
  l1 += std::abs(h) *
        (std::abs(f0) + std::abs(f1) + std::abs(f2) + std::abs(f3)) / 4.0 *
        std::min(1.0, 2.0 / std::max(1.0, std::abs(t) * h));
  return v;
}

template <class W>
Complex filon_mesh(W&& w, double lo, double hi, double t, int n, double& l1) {
  // geometric mesh; cost stays flat in t because the phase is exact per panel
  const double r = std::log(hi / lo) / n;
  Complex total{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    const double a = lo * std::exp(i * r);
    const double b = lo * std::exp((i + 1) * r);
    total += filon_panel(w, a, b - a, t, l1);
  }
  return total;
}

}  // namespace detail

/// Oscillatory integral int_lo^hi W(lam) exp(-i t lam) dlam by cubic Filon
/// panels on a geometric mesh graded toward lam = lo.  The error estimate
/// comes from mesh refinement plus a roundoff floor; it is honest rather
/// than optimistic, so callers can certify their own tolerance.
template <class W>
FilonResult filon_linear_phase(W&& w, double lo, double hi, double t,
                               double mesh_ratio = 1.06) {
  if (!(hi > lo) || !(lo > 0.0))
    throw std::invalid_argument("filon_linear_phase: need 0 < lo < hi");
  const int n =
      std::max(8, int(std::ceil(std::log(hi / lo) / std::log(mesh_ratio))));
  double l1a = 0.0, l1b = 0.0;
  const Complex coarse = detail::filon_mesh(w, lo, hi, t, n, l1a);
  const Complex fine = detail::filon_mesh(w, lo, hi, t, 2 * n, l1b);
  const double eps = std::numeric_limits<double>::epsilon();
  const double err =
      std::abs(fine - coarse) + 8.0 * eps * std::max(l1a, l1b) * std::sqrt(2.0 * n);
  return {fine, err};
}

}  // namespace qdecay
