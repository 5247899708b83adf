#pragma once

// Compact regions, sample sets, the C^l seminorms p_{K,l} and D′ pairings
// against a finite dictionary of bump test functions.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "gfspec/core.hpp"
#include "gfspec/jet.hpp"
#include "gfspec/net.hpp"
#include "gfspec/quadrature.hpp"

namespace gfspec {

inline constexpr int kDefaultGridPoints = 257;
inline constexpr std::size_t kMaxOscillationSamples = 100000;

struct CompactRegion {
  Box box;
  int points_per_axis = kDefaultGridPoints;
  int points_axis1 = 0;  // grid points along axis 1; 0 means points_per_axis

  CompactRegion() = default;
  CompactRegion(Box b, int n = kDefaultGridPoints, int n1 = 0) : box(b), points_per_axis(n), points_axis1(n1) {
    validate();
  }

  static CompactRegion interval(double a, double b, int n = kDefaultGridPoints) {
    return CompactRegion(Box::interval(a, b), n);
  }

  int points(int axis) const { return axis == 1 && points_axis1 > 0 ? points_axis1 : points_per_axis; }

  void validate() const {
    if (box.empty) throw DomainError("compact region must be nonempty");
    for (int i = 0; i < box.dim; ++i) {
      if (!(box.width(i) > 0.0)) throw DomainError("compact region needs a nonempty interior");
      if (points(i) < 9) throw DomainError("compact region needs at least 9 grid points per axis");
      if (points(i) % 2 == 0) throw DomainError("grid points per axis must be odd so the center is sampled");
    }
  }

  int dim() const { return box.dim; }
  double spacing(int axis) const { return box.width(axis) / (points(axis) - 1); }
  double coordinate(int axis, int i) const {
    if (i == points(axis) - 1) return box.upper(axis);
    return box.lower(axis) + i * spacing(axis);
  }

  /// Grid in row-major order (axis 0 fastest).
  std::vector<Point> grid() const {
    std::vector<Point> out;
    if (dim() == 1) {
      for (int i = 0; i < points(0); ++i) out.push_back({coordinate(0, i), 0.0});
    } else {
      for (int j = 0; j < points(1); ++j)
        for (int i = 0; i < points(0); ++i) out.push_back({coordinate(0, i), coordinate(1, j)});
    }
    return out;
  }
};

namespace detail {

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? 0.5 * (a + b) : a + (b - a) * i / (n - 1);
  if (n > 1) v.back() = b;
  return v;
}

/// Extra samples resolving a feature inside `box` at scale ε.
inline void feature_samples(const Feature& f, const Box& box, double eps, int positions, std::vector<Point>& out) {
  const int d = box.dim;
  const double s = f.scale(eps);
  if (f.kind == Feature::Kind::layer) {
    constexpr int offsets_1d = 129, offsets_2d = 33;
    if (d == 1) {
      const double n0 = f.normal[0];
      if (n0 == 0.0) return;
      const double c = f.offset / n0, w = s / std::abs(n0);
      for (double y : linspace(-w, w, offsets_1d)) {
        const Point p{c + y, 0.0};
        if (box.contains(p)) out.push_back(p);
      }
      return;
    }
    // a line n·x = b ± y: parametrize by the coordinate the normal is weakest in
    const int axis = std::abs(f.normal[0]) >= std::abs(f.normal[1]) ? 0 : 1;
    const int other = 1 - axis;
    const double na = f.normal[static_cast<std::size_t>(axis)], no = f.normal[static_cast<std::size_t>(other)];
    for (double q : linspace(box.lower(other), box.upper(other), positions)) {
      for (double y : linspace(-s, s, offsets_2d)) {
        Point p{};
        p[static_cast<std::size_t>(other)] = q;
        p[static_cast<std::size_t>(axis)] = (f.offset + y - no * q) / na;
        if (box.contains(p)) out.push_back(p);
      }
    }
    return;
  }
  // oscillation: sample at a fraction of the wavelength along the dominant axis
  const int axis = std::abs(f.normal[0]) >= std::abs(f.normal[1]) ? 0 : 1;
  const double lambda = s / std::abs(f.normal[static_cast<std::size_t>(axis)]);
  const double width = box.width(axis);
  std::size_t count = static_cast<std::size_t>(std::ceil(width / (lambda / 16.0))) + 1;
  std::size_t budget = kMaxOscillationSamples;
  if (d == 2) budget /= static_cast<std::size_t>(positions);
  count = std::min(count, budget);
  const auto line = linspace(box.lower(axis), box.upper(axis), static_cast<int>(count));
  const auto others = d == 2 ? linspace(box.lower(1 - axis), box.upper(1 - axis), positions) : std::vector<double>{0.0};
  for (double q : others) {
    for (double v : line) {
      Point p{};
      p[static_cast<std::size_t>(axis)] = v;
      if (d == 2) p[static_cast<std::size_t>(1 - axis)] = q;
      out.push_back(p);
    }
  }
}

}  // namespace detail

/// Grid of `region` plus feature-resolving samples of `net` at scale ε.
inline std::vector<Point> sample_points(const Net& net, const CompactRegion& region, double eps) {
  std::vector<Point> pts = region.grid();
  for (const auto& f : net.features()) detail::feature_samples(f, region.box, eps, 9, pts);
  return pts;
}

/// Cumulative seminorms p_{K,0}, ..., p_{K,l} from one pass over the samples.
inline std::vector<double> cp_seminorms(const Net& net, const CompactRegion& region, int l, double eps,
                                        const std::vector<Point>* samples = nullptr) {
  if (l < 0) throw DomainError("seminorm order must be non-negative");
  if (l > net.max_order()) throw OrderExceeded("seminorm order exceeds the net's derivative order");
  if (net.dim() != region.dim()) throw DimensionMismatch("region and net dimensions differ");
  check_eps(eps);
  std::vector<double> per(static_cast<std::size_t>(l + 1), 0.0);
  if (!net.support().vanishes_on(region.box, eps)) {
    const std::vector<Point> own = samples ? std::vector<Point>{} : sample_points(net, region, eps);
    const std::vector<Point>& pts = samples ? *samples : own;
    for (const auto& p : pts) {
      const Jet j = net.jet(p, eps, l);
      for (int n = 0; n <= l; ++n) {
        const double v = j.max_abs_derivative_of_order(n);
        if (!std::isfinite(v)) {
          per[static_cast<std::size_t>(n)] = std::numeric_limits<double>::infinity();
        } else {
          per[static_cast<std::size_t>(n)] = std::max(per[static_cast<std::size_t>(n)], v);
        }
      }
    }
  }
  for (std::size_t n = 1; n < per.size(); ++n) per[n] = std::max(per[n], per[n - 1]);
  return per;
}

/// p_{K,l}(u_ε) = sup_{x∈K, |α|≤l} |∂^α u_ε(x)| over the sample set.
inline double cp_seminorm(const Net& net, const CompactRegion& region, int l, double eps) {
  return cp_seminorms(net, region, l, eps).back();
}

// ---------------------------------------------------------------------------
// Test functions
// ---------------------------------------------------------------------------

/// ψ(x) = Π_i b((x_i − c_i)/w_i), optionally times (x_0 − c_0)/w_0, with
/// b(y) = exp(−1/(1−y²)) on |y| < 1.
struct TestFunction {
  int dim = 1;
  Point center{};
  Point width{1.0, 1.0};
  bool odd = false;

  Box support() const { return Box::around(dim, center, width); }

  static double bump(double y) {
    const double q = 1.0 - y * y;
    if (q <= 1.0 / 700.0) return 0.0;
    return std::exp(-1.0 / q);
  }

  double operator()(const Point& x) const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      v *= bump((x[k] - center[k]) / width[k]);
      if (v == 0.0) return 0.0;
    }
    if (odd) v *= (x[0] - center[0]) / width[0];
    return v;
  }

  Jet jet(const Point& x, int order) const {
    Jet v(dim, order, 1.0);
    for (int i = 0; i < dim; ++i) {
      const auto k = static_cast<std::size_t>(i);
      const Jet y = (Jet::variable(dim, order, i, x[k]) - center[k]) * (1.0 / width[k]);
      const Jet q = 1.0 - y * y;
      if (q.value() <= 1.0 / 700.0) return Jet(dim, order);
      v = v * exp(-reciprocal(q));
    }
    if (odd) v = v * ((Jet::variable(dim, order, 0, x[0]) - center[0]) * (1.0 / width[0]));
    return v;
  }
};

struct TestDictionary {
  Box region;
  std::vector<TestFunction> members;

  std::size_t size() const { return members.size(); }

  /// Support edges and centers of the members along one axis.
  std::vector<double> breakpoints(int axis) const {
    std::vector<double> bp;
    const auto k = static_cast<std::size_t>(axis);
    for (const auto& m : members)
      for (double y : {-1.0, 0.0, 1.0}) bp.push_back(m.center[k] + y * m.width[k]);
    return bp;
  }

  /// All member values at x.
  void values(const Point& x, double* out) const {
    const Evaluator e(*this);
    e.values(x, out);
  }

  /// Member values with the per-axis bump factors grouped by distinct
  /// (center, width), and the factors along axis 1 kept while x_1 is unchanged.
  class Evaluator {
   public:
    explicit Evaluator(const TestDictionary& dict) : dict_(dict) {
      for (int a = 0; a < dict.region.dim; ++a) {
        const auto k = static_cast<std::size_t>(a);
        for (const auto& m : dict.members) {
          std::size_t g = 0;
          while (g < axes_[k].size() && !(axes_[k][g].c == m.center[k] && axes_[k][g].w == m.width[k])) ++g;
          if (g == axes_[k].size()) axes_[k].push_back({m.center[k], m.width[k], 0.0, false});
          group_[k].push_back(g);
        }
      }
    }

    void values(const Point& x, double* out) const {
      const int d = dict_.region.dim;
      if (d > 1 && x[1] != line_) {
        for (auto& g : axes_[1]) g.v = factor(g, x[1]);
        line_ = x[1];
      }
      // axis-0 factors are evaluated only for members alive on this line
      for (auto& g : axes_[0]) g.fresh = false;
      for (std::size_t j = 0; j < dict_.members.size(); ++j) {
        double v = d > 1 ? axes_[1][group_[1][j]].v : 1.0;
        if (v != 0.0) {
          Group& g = axes_[0][group_[0][j]];
          if (!g.fresh) {
            g.v = factor(g, x[0]);
            g.fresh = true;
          }
          v *= g.v;
        }
        const TestFunction& m = dict_.members[j];
        if (m.odd && v != 0.0) v *= (x[0] - m.center[0]) / m.width[0];
        out[j] = v;
      }
    }

   private:
    struct Group {
      double c, w, v;
      bool fresh;
    };
    static double factor(const Group& g, double coord) {
      const double y = (coord - g.c) / g.w;
      return std::abs(y) >= 1.0 ? 0.0 : TestFunction::bump(y);
    }

    const TestDictionary& dict_;
    mutable std::array<std::vector<Group>, 2> axes_;
    std::array<std::vector<std::size_t>, 2> group_;
    mutable double line_ = std::numeric_limits<double>::quiet_NaN();
  };
};

/// Bumps at the center of K and at center ± half-width/2 along each axis, with
/// widths hw/2 and hw/4, plus one odd probe per center. Every member is
/// supported in K.
inline TestDictionary make_test_dictionary(const CompactRegion& K) {
  const Box& b = K.box;
  const int d = b.dim;
  TestDictionary dict;
  dict.region = b;
  const Point c = b.center();
  Point hw{};
  for (int i = 0; i < d; ++i) hw[static_cast<std::size_t>(i)] = b.half_width(i);
  std::vector<Point> centers{c};
  for (int i = 0; i < d; ++i) {
    for (double sgn : {-1.0, 1.0}) {
      Point p = c;
      p[static_cast<std::size_t>(i)] += sgn * 0.5 * hw[static_cast<std::size_t>(i)];
      centers.push_back(p);
    }
  }
  for (const auto& p : centers) {
    for (double frac : {0.5, 0.25}) {
      Point w{};
      for (int i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] = frac * hw[static_cast<std::size_t>(i)];
      dict.members.push_back({d, p, w, false});
    }
    Point w{};
    for (int i = 0; i < d; ++i) w[static_cast<std::size_t>(i)] = 0.5 * hw[static_cast<std::size_t>(i)];
    dict.members.push_back({d, p, w, true});
  }
  return dict;
}

/// Panel breakpoints aligned with the layers and oscillations of a net.
inline BreakpointFn feature_breakpoints(const Net& net, double eps) {
  const auto features = net.features();
  const int d = net.dim();
  return [features, d, eps](int axis, const Point& other) {
    std::vector<double> bp;
    for (const auto& f : features) {
      const double s = f.scale(eps);
      if (f.kind == Feature::Kind::layer) {
        if (d == 1) {
          if (f.normal[0] == 0.0) continue;
          for (double y : {-s, 0.0, s}) bp.push_back((f.offset + y) / f.normal[0]);
        } else if (axis == 0) {
          if (f.normal[0] == 0.0) continue;
          for (double y : {-s, 0.0, s}) bp.push_back((f.offset + y - f.normal[1] * other[1]) / f.normal[0]);
        } else {
          if (f.normal[0] != 0.0 || f.normal[1] == 0.0) continue;
          for (double y : {-s, 0.0, s}) bp.push_back((f.offset + y) / f.normal[1]);
        }
      }
    }
    return bp;
  };
}

/// Pairings ∫ u_ε ψ_j for every dictionary member, from one quadrature pass.
inline std::vector<double> dprime_pairings(const Net& net, const TestDictionary& dict, double eps,
                                           const QuadratureOptions& opt = {}) {
  if (net.dim() != dict.region.dim) throw DimensionMismatch("dictionary and net dimensions differ");
  check_eps(eps);
  const int m = static_cast<int>(dict.size());
  if (net.support().vanishes_on(dict.region, eps)) return std::vector<double>(dict.size(), 0.0);
  std::vector<double> psi(dict.size());
  const TestDictionary::Evaluator eval(dict);
  auto f = [&](const Point& x, double* v) {
    eval.values(x, psi.data());
    bool any = false;
    for (double p : psi) any = any || p != 0.0;
    const double u = any ? net.value(x, eps) : 0.0;
    for (std::size_t j = 0; j < psi.size(); ++j) v[j] = u * psi[j];
  };
  const BreakpointFn features = feature_breakpoints(net, eps);
  const std::array<std::vector<double>, 2> own{dict.breakpoints(0), net.dim() > 1 ? dict.breakpoints(1) : std::vector<double>{}};
  auto bps = [&](int axis, const Point& other) {
    std::vector<double> bp = features(axis, other);
    const auto& extra = own[static_cast<std::size_t>(axis)];
    bp.insert(bp.end(), extra.begin(), extra.end());
    return bp;
  };
  const Support& support = net.support();
  auto zero = [&support, eps](const Box& k) { return support.vanishes_on(k, eps); };
  return integrate_box(net.dim(), dict.region, m, f, bps, opt, zero).value;
}

/// ∫ u_ε ψ over the support of ψ.
inline double dprime_pairing(const Net& net, const TestFunction& psi, double eps, const QuadratureOptions& opt = {}) {
  TestDictionary one;
  one.region = psi.support();
  one.members.push_back(psi);
  return dprime_pairings(net, one, eps, opt)[0];
}

}  // namespace gfspec
