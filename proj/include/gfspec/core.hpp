#pragma once

// Basic value types shared by every module: points, boxes, multi-indices and
// the error hierarchy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfspec {

/// Ambient dimensions handled by the engine: 1 (space) and 2 (space-time).
inline constexpr int kMaxDim = 2;

using Point = std::array<double, kMaxDim>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested derivative order exceeds what a net or function can supply.
class OrderExceeded : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain (ε ∉ (0,1], negative exponents, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// Order fitting rejected its samples (too few, non-finite, not decreasing).
class FitError : public Error {
 public:
  using Error::Error;
};

/// A numerical kernel (ODE integration, evaluation) failed at a specific (x, ε).
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, const Point& x, double eps)
      : Error(what), x_(x), eps_(eps) {}
  const Point& where() const { return x_; }
  double eps() const { return eps_; }

 private:
  Point x_{};
  double eps_ = 0.0;
};

inline void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) {
    throw DimensionMismatch("dimension " + std::to_string(dim) + " not supported (1.." +
                            std::to_string(kMaxDim) + ")");
  }
}

inline void check_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    throw DomainError("epsilon must lie in (0,1], got " + std::to_string(eps));
  }
}

// ---------------------------------------------------------------------------
// Multi-indices
// ---------------------------------------------------------------------------

struct MultiIndex {
  std::array<int, kMaxDim> a{};
  int dim = 1;

  MultiIndex() = default;
  explicit MultiIndex(int d) : dim(d) { check_dim(d); }
  MultiIndex(int d, std::initializer_list<int> parts) : dim(d) {
    check_dim(d);
    int i = 0;
    for (int v : parts) {
      if (i >= d) throw DimensionMismatch("multi-index has more parts than dimensions");
      if (v < 0) throw DomainError("multi-index entries must be non-negative");
      a[static_cast<std::size_t>(i++)] = v;
    }
  }

  static MultiIndex zero(int d) { return MultiIndex(d); }
  static MultiIndex unit(int d, int axis) {
    MultiIndex m(d);
    m.a[static_cast<std::size_t>(axis)] = 1;
    return m;
  }

  int order() const { return std::accumulate(a.begin(), a.begin() + dim, 0); }
  int operator[](int i) const { return a[static_cast<std::size_t>(i)]; }

  friend MultiIndex operator+(MultiIndex lhs, const MultiIndex& rhs) {
    if (lhs.dim != rhs.dim) throw DimensionMismatch("multi-index dimension mismatch");
    for (int i = 0; i < lhs.dim; ++i) lhs.a[static_cast<std::size_t>(i)] += rhs[i];
    return lhs;
  }
  friend bool operator==(const MultiIndex& x, const MultiIndex& y) {
    if (x.dim != y.dim) return false;
    for (int i = 0; i < x.dim; ++i)
      if (x[i] != y[i]) return false;
    return true;
  }

  /// α! = Π α_i!
  double factorial() const {
    double f = 1.0;
    for (int i = 0; i < dim; ++i)
      for (int k = 2; k <= a[static_cast<std::size_t>(i)]; ++k) f *= k;
    return f;
  }
};

/// All multi-indices of dimension d with |α| ≤ order, graded by total order.
inline std::vector<MultiIndex> multi_indices_up_to(int dim, int order) {
  check_dim(dim);
  std::vector<MultiIndex> out;
  for (int n = 0; n <= order; ++n) {
    if (dim == 1) {
      out.push_back(MultiIndex(1, {n}));
    } else {
      for (int b = 0; b <= n; ++b) out.push_back(MultiIndex(2, {n - b, b}));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boxes
// ---------------------------------------------------------------------------

/// Closed axis-aligned box. An empty box is flagged explicitly so that
/// intersections of disjoint supports stay representable.
struct Box {
  int dim = 1;
  Point lo{};
  Point hi{};
  bool empty = false;

  Box() = default;
  Box(int d, Point lower, Point upper) : dim(d), lo(lower), hi(upper) {
    check_dim(d);
    for (int i = 0; i < d; ++i) {
      if (!(lo[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)]))
        throw DomainError("box lower corner exceeds upper corner");
    }
  }

  static Box interval(double a, double b) { return Box(1, Point{a, 0.0}, Point{b, 0.0}); }
  static Box rect(double x0, double x1, double t0, double t1) {
    return Box(2, Point{x0, t0}, Point{x1, t1});
  }
  /// Box of half-width r_i around c along each axis.
  static Box around(int d, const Point& c, const Point& r) {
    Point l{}, h{};
    for (int i = 0; i < d; ++i) {
      auto k = static_cast<std::size_t>(i);
      l[k] = c[k] - r[k];
      h[k] = c[k] + r[k];
    }
    return Box(d, l, h);
  }
  static Box empty_box(int d) {
    Box b;
    b.dim = d;
    b.empty = true;
    return b;
  }

  double lower(int i) const { return lo[static_cast<std::size_t>(i)]; }
  double upper(int i) const { return hi[static_cast<std::size_t>(i)]; }
  double width(int i) const { return upper(i) - lower(i); }
  double half_width(int i) const { return 0.5 * width(i); }
  Point center() const {
    Point c{};
    for (int i = 0; i < dim; ++i) c[static_cast<std::size_t>(i)] = 0.5 * (lower(i) + upper(i));
    return c;
  }

  bool contains(const Point& p) const {
    if (empty) return false;
    for (int i = 0; i < dim; ++i) {
      auto k = static_cast<std::size_t>(i);
      if (p[k] < lo[k] || p[k] > hi[k]) return false;
    }
    return true;
  }
  bool contains(const Box& other) const {
    if (other.empty) return true;
    if (empty) return false;
    for (int i = 0; i < dim; ++i)
      if (other.lower(i) < lower(i) || other.upper(i) > upper(i)) return false;
    return true;
  }
  bool intersects(const Box& other) const {
    if (empty || other.empty) return false;
    for (int i = 0; i < dim; ++i)
      if (other.upper(i) < lower(i) || other.lower(i) > upper(i)) return false;
    return true;
  }

  Box intersection(const Box& other) const {
    if (!intersects(other)) return empty_box(dim);
    Point l{}, h{};
    for (int i = 0; i < dim; ++i) {
      auto k = static_cast<std::size_t>(i);
      l[k] = std::max(lo[k], other.lo[k]);
      h[k] = std::min(hi[k], other.hi[k]);
    }
    return Box(dim, l, h);
  }
  Box hull(const Box& other) const {
    if (empty) return other;
    if (other.empty) return *this;
    Point l{}, h{};
    for (int i = 0; i < dim; ++i) {
      auto k = static_cast<std::size_t>(i);
      l[k] = std::min(lo[k], other.lo[k]);
      h[k] = std::max(hi[k], other.hi[k]);
    }
    return Box(dim, l, h);
  }
  Box inflated(double r) const {
    if (empty) return *this;
    Point l = lo, h = hi;
    for (int i = 0; i < dim; ++i) {
      auto k = static_cast<std::size_t>(i);
      l[k] -= r;
      h[k] += r;
    }
    return Box(dim, l, h);
  }
};

}  // namespace gfspec
