#pragma once

// Gauss–Legendre rules and panel quadrature with caller-supplied breakpoints.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gfspec/core.hpp"

namespace gfspec {

inline constexpr double kRoundoff = std::numeric_limits<double>::epsilon();
inline constexpr double kAbsFloor = 1e-250;

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

namespace detail {

inline GaussRule make_gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return rule;
}

}  // namespace detail

/// Cached n-point Gauss–Legendre rule (n ∈ {8, 16, 32}).
inline const GaussRule& gauss_legendre(int n) {
  static const GaussRule g8 = detail::make_gauss_legendre(8);
  static const GaussRule g16 = detail::make_gauss_legendre(16);
  static const GaussRule g32 = detail::make_gauss_legendre(32);
  switch (n) {
    case 8: return g8;
    case 16: return g16;
    case 32: return g32;
    default: throw DomainError("unsupported Gauss-Legendre order " + std::to_string(n));
  }
}

/// Sorted, de-duplicated panel edges on [lo, hi] including the given
/// breakpoints that fall strictly inside.
inline std::vector<double> panel_edges(double lo, double hi, const std::vector<double>& breakpoints) {
  std::vector<double> e;
  e.reserve(breakpoints.size() + 2);
  e.push_back(lo);
  for (double b : breakpoints)
    if (b > lo && b < hi) e.push_back(b);
  e.push_back(hi);
  std::sort(e.begin(), e.end());
  const double tiny = 1e-14 * std::max(1.0, hi - lo);
  std::vector<double> out;
  for (double v : e)
    if (out.empty() || v - out.back() > tiny) out.push_back(v);
  if (out.back() < hi) out.back() = hi;
  return out;
}

/// Composite rule: every interval between consecutive edges is split into
/// `subdiv` equal panels carrying the given Gauss rule.
template <class F>
double integrate_panels(F&& f, const std::vector<double>& edges, int subdiv, const GaussRule& rule,
                        double* abs_out = nullptr) {
  double sum = 0.0, asum = 0.0;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = edges[e + 1];
    const double h = (b - a) / subdiv;
    for (int s = 0; s < subdiv; ++s) {
      const double pa = a + s * h;
      const double half = 0.5 * h, mid = pa + half;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double v = f(mid + half * rule.nodes[i]);
        sum += rule.weights[i] * half * v;
        asum += rule.weights[i] * half * std::abs(v);
      }
    }
  }
  if (abs_out) *abs_out = asum;
  return sum;
}

struct QuadratureOptions {
  double rel_tol = 1e-9;
  int max_depth = 30;
};

struct VectorIntegral {
  std::vector<double> value;
  std::vector<double> abs_value;
};

/// Gauss–Kronrod 10/21 pair on [-1, 1]; gauss[i] is zero at Kronrod-only nodes.
struct KronrodRule {
  std::vector<double> nodes, kronrod, gauss;
};

inline const KronrodRule& gauss_kronrod21() {
  static const KronrodRule rule = [] {
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    using G = boost::math::quadrature::gauss<double, 10>;
    KronrodRule r;
    const auto& x = GK::abscissa();
    const auto& wk = GK::weights();
    const auto& wg = G::weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double g = i % 2 == 1 ? wg[i / 2] : 0.0;
      for (double sgn : {1.0, -1.0}) {
        if (i == 0 && sgn < 0) continue;
        r.nodes.push_back(sgn * x[i]);
        r.kronrod.push_back(wk[i]);
        r.gauss.push_back(g);
      }
    }
    return r;
  }();
  return rule;
}

/// Adaptive bisection for an m-component integrand f(x, vals, absv).
/// A panel is accepted when the Kronrod and Gauss estimates agree, per
/// component, to rel_tol times that component's ∫|f| (so cancelling
/// integrands are judged on their scale); otherwise it is halved.
template <class F>
VectorIntegral integrate_adaptive(F&& f, int m, const std::vector<double>& edges, const QuadratureOptions& opt = {},
                                  const std::function<bool(double, double)>& zero_on = {}) {
  const KronrodRule& rule = gauss_kronrod21();
  const auto mm = static_cast<std::size_t>(m);
  std::vector<double> fv(mm), fa(mm);
  // est holds the Kronrod value, |f| integral and Gauss value, m entries each
  auto panel = [&](double a, double b, double* est) {
    std::fill(est, est + 3 * m, 0.0);
    const double half = 0.5 * (b - a), mid = a + half;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      f(mid + half * rule.nodes[i], fv.data(), fa.data());
      const double wk = rule.kronrod[i] * half, wg = rule.gauss[i] * half;
      for (std::size_t j = 0; j < mm; ++j) {
        est[j] += wk * fv[j];
        est[mm + j] += wk * fa[j];
        est[2 * mm + j] += wg * fv[j];
      }
    }
  };

  VectorIntegral out{std::vector<double>(mm, 0.0), std::vector<double>(mm, 0.0)};
  const std::size_t nint = edges.size() < 2 ? 0 : edges.size() - 1;
  struct Item {
    double a, b;
    int depth;
    std::vector<double> est;
  };
  std::vector<Item> stack;
  std::vector<double> scale(mm, 0.0);
  for (std::size_t e = nint; e-- > 0;) {
    if (zero_on && zero_on(edges[e], edges[e + 1])) continue;
    Item it{edges[e], edges[e + 1], 0, std::vector<double>(3 * mm)};
    panel(it.a, it.b, it.est.data());
    for (std::size_t j = 0; j < mm; ++j) scale[j] += it.est[mm + j];
    stack.push_back(std::move(it));
  }
  // components far below the largest one only need absolute accuracy
  const double top = scale.empty() ? 0.0 : *std::max_element(scale.begin(), scale.end());
  const double floor = std::max(kAbsFloor, 1e-6 * opt.rel_tol * top);

  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    bool ok = true;
    for (std::size_t j = 0; j < mm && ok; ++j) {
      const double k = it.est[j], local = it.est[mm + j];
      if (!std::isfinite(k)) throw QuadratureError("non-finite integrand value");
      const double tol = opt.rel_tol * std::max(scale[j], local) + 256.0 * kRoundoff * local;
      if (std::abs(k - it.est[2 * mm + j]) > tol + floor) ok = false;
    }
    if (ok) {
      for (std::size_t j = 0; j < mm; ++j) {
        out.value[j] += it.est[j];
        out.abs_value[j] += it.est[mm + j];
      }
      continue;
    }
    if (it.depth >= opt.max_depth)
      throw QuadratureError("quadrature did not reach relative tolerance " + std::to_string(opt.rel_tol) + " on [" +
                            std::to_string(it.a) + ", " + std::to_string(it.b) + "]");
    const double mid = 0.5 * (it.a + it.b);
    Item left{it.a, mid, it.depth + 1, std::vector<double>(3 * mm)};
    Item right{mid, it.b, it.depth + 1, std::move(it.est)};
    for (Item* child : {&right, &left}) {
      if (zero_on && zero_on(child->a, child->b)) continue;
      panel(child->a, child->b, child->est.data());
      stack.push_back(std::move(*child));
    }
  }
  return out;
}

/// Breakpoints along `axis` for the line through `other` (the remaining
/// coordinate fixed); used to align panels with thin layers.
using BreakpointFn = std::function<std::vector<double>(int axis, const Point& other)>;

/// Optional predicate: true when the integrand vanishes identically on a box.
using ZeroTest = std::function<bool(const Box&)>;

/// ∫_box of an m-component integrand f(point, vals). In two dimensions the
/// integral is iterated: outer over axis 1, inner over axis 0, with inner
/// breakpoints recomputed for every outer node.
template <class F>
VectorIntegral integrate_box(int dim, const Box& box, int m, F&& f, const BreakpointFn& breakpoints,
                             const QuadratureOptions& opt = {}, const ZeroTest& zero_on = {}) {
  check_dim(dim);
  const auto mm = static_cast<std::size_t>(m);
  if (box.empty) return {std::vector<double>(mm, 0.0), std::vector<double>(mm, 0.0)};
  auto bps = [&](int axis, const Point& other) {
    return breakpoints ? breakpoints(axis, other) : std::vector<double>{};
  };
  // panels along axis 0 on the line through `other`
  auto line_test = [&](const Point& other) -> std::function<bool(double, double)> {
    if (!zero_on) return {};
    return [&zero_on, dim, other](double a, double b) {
      return zero_on(Box(dim, Point{a, other[1]}, Point{b, other[1]}));
    };
  };
  if (dim == 1) {
    const auto edges = panel_edges(box.lower(0), box.upper(0), bps(0, Point{}));
    return integrate_adaptive(
        [&](double x, double* v, double* a) {
          f(Point{x, 0.0}, v);
          for (std::size_t j = 0; j < mm; ++j) a[j] = std::abs(v[j]);
        },
        m, edges, opt, line_test(Point{}));
  }
  const auto outer = panel_edges(box.lower(1), box.upper(1), bps(1, Point{}));

  return integrate_adaptive(
      [&](double t, double* v, double* a) {
        const auto edges = panel_edges(box.lower(0), box.upper(0), bps(0, Point{0.0, t}));
        const auto inner = integrate_adaptive([&](double x, double* iv, double* ia) {
          f(Point{x, t}, iv);
          for (std::size_t j = 0; j < mm; ++j) ia[j] = std::abs(iv[j]);
        }, m, edges, opt, line_test(Point{0.0, t}));
        std::copy(inner.value.begin(), inner.value.end(), v);
        std::copy(inner.abs_value.begin(), inner.abs_value.end(), a);
      },
      m, outer, opt, zero_on ? std::function<bool(double, double)>([&](double a, double b) {
        return zero_on(Box(2, Point{box.lower(0), a}, Point{box.upper(0), b}));
      }) : std::function<bool(double, double)>{});
}

/// Scalar convenience wrapper.
inline double integrate_scalar(int dim, const Box& box, const std::function<double(const Point&)>& f,
                               const BreakpointFn& breakpoints = {}, const QuadratureOptions& opt = {}) {
  return integrate_box(dim, box, 1, [&](const Point& p, double* v) { v[0] = f(p); }, breakpoints, opt).value[0];
}

}  // namespace gfspec
