#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace qdecay {

using Complex = std::complex<double>;

/// Error type for numerical failures (non-convergence, tail criteria,
/// divergent norms).  Construction/argument errors use std::invalid_argument.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Gauss-Kronrod 15/7 nodes and weights on [-1,1], abscissa-descending.
inline constexpr std::array<double, 8> kGk15Nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kGk15WeightsK = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> kGk15WeightsG = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace detail

struct QuadResult {
  Complex value{0.0, 0.0};
  double abs_err = 0.0;
  double l1 = 0.0;  // integral of |f|, used for roundoff floors
};

/// One Gauss-Kronrod 15-point panel on [a, b].
template <class F>
QuadResult gk15_panel(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const Complex fc = f(c);
  Complex k15 = detail::kGk15WeightsK[7] * fc;
  Complex g7 = detail::kGk15WeightsG[3] * fc;
  double l1 = detail::kGk15WeightsK[7] * std::abs(fc);
  for (int i = 0; i < 7; ++i) {
    const double dx = h * detail::kGk15Nodes[i];
    const Complex f1 = f(c - dx);
    const Complex f2 = f(c + dx);
    k15 += detail::kGk15WeightsK[i] * (f1 + f2);
    l1 += detail::kGk15WeightsK[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) g7 += detail::kGk15WeightsG[i / 2] * (f1 + f2);
  }
  return {k15 * h, std::abs(k15 - g7) * std::abs(h), l1 * std::abs(h)};
}

/// Globally adaptive Gauss-Kronrod integration of a complex-valued function.
/// Refines the panel with the largest error estimate until the summed
/// estimate satisfies abs_err <= max(atol, rtol * |value|).  `seeds` places
/// mandatory breakpoints (endpoint layers, kernel kinks).
template <class F>
QuadResult integrate_gk(F&& f, double a, double b, double rtol = 1e-12,
                        double atol = 0.0, int max_panels = 4000,
                        const std::vector<double>& seeds = {}) {
  struct Panel {
    double a, b;
    QuadResult r;
  };
  auto cmp = [](const Panel& x, const Panel& y) {
    return x.r.abs_err < y.r.abs_err;
  };
  std::priority_queue<Panel, std::vector<Panel>, decltype(cmp)> heap(cmp);

  std::vector<double> pts;
  pts.push_back(a);
  for (double s : seeds)
    if (s > a && s < b) pts.push_back(s);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());

  Complex total{0.0, 0.0};
  double err = 0.0, l1 = 0.0;
  int n = 0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Panel p{pts[i], pts[i + 1], gk15_panel(f, pts[i], pts[i + 1])};
    total += p.r.value;
    err += p.r.abs_err;
    l1 += p.r.l1;
    heap.push(p);
    ++n;
  }
  const double eps_floor = 50.0 * std::numeric_limits<double>::epsilon();
  while (n < max_panels) {
    const double target = std::max(atol, rtol * std::abs(total));
    if (err <= std::max(target, eps_floor * l1)) break;
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {  // interval exhausted at machine resolution
      err -= p.r.abs_err;         // cannot improve further; accept
      continue;
    }
    Panel left{p.a, m, gk15_panel(f, p.a, m)};
    Panel right{m, p.b, gk15_panel(f, m, p.b)};
    total += left.r.value + right.r.value - p.r.value;
    err += left.r.abs_err + right.r.abs_err - p.r.abs_err;
    l1 += left.r.l1 + right.r.l1 - p.r.l1;
    heap.push(left);
    heap.push(right);
    ++n;
  }
  return {total, std::max(err, eps_floor * l1), l1};
}

namespace detail {

// Gauss-Legendre 16-point nodes/weights on [-1,1] (positive half shown).
inline constexpr std::array<double, 8> kGl16Nodes = {
    0.095012509837637440185, 0.281603550779258913230,
    0.458016777657227386342, 0.617876244402643748447,
    0.755404408355003033895, 0.865631202387831743880,
    0.944575023073232576078, 0.989400934991649932596};

inline constexpr std::array<double, 8> kGl16Weights = {
    0.189450610455068496285, 0.182603415044923588867,
    0.169156519395002538189, 0.149595988816576732081,
    0.124628971255533872052, 0.095158511682492784810,
    0.062253523938647892863, 0.027152459411754094852};

}  // namespace detail

/// Fixed 16-point Gauss-Legendre rule on [a, b].
template <class F>
Complex gl16_panel(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  Complex s{0.0, 0.0};
  for (int i = 0; i < 8; ++i) {
    const double dx = h * detail::kGl16Nodes[i];
    s += detail::kGl16Weights[i] * (f(c - dx) + f(c + dx));
  }
  return s * h;
}

/// Composite Gauss-Legendre over uniform panels.
template <class F>
Complex gl_composite(F&& f, double a, double b, int panels) {
  Complex s{0.0, 0.0};
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i)
    s += gl16_panel(f, a + i * h, a + (i + 1) * h);
  return s;
}

}  // namespace qdecay
