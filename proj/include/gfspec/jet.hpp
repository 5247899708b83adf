#pragma once

// Truncated multivariate Taylor series ("jets").
//
// A Jet of dimension d and order N stores the Taylor coefficients
// c_α = ∂^α f(x0) / α! for all |α| ≤ N. Products are the Leibniz rule,
// composition with univariate functions is the Faà di Bruno formula, and
// both are exact up to roundoff. Nets evaluate to jets so every derivative up
// to the requested order comes out of one evaluation.

#include <array>
#include <cmath>
#include <span>

#include "gfspec/core.hpp"

namespace gfspec {

inline constexpr int kMaxOrder = 8;
inline constexpr int kMaxCoeffs = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

/// Univariate Taylor coefficients f^{(k)}(v)/k!, k = 0..order.
using Taylor1D = std::array<double, kMaxOrder + 1>;

class Jet {
 public:
  Jet() = default;
  Jet(int dim, int order, double value = 0.0) : dim_(dim), order_(order) {
    check_dim(dim);
    if (order < 0 || order > kMaxOrder)
      throw OrderExceeded("jet order " + std::to_string(order) + " outside 0.." +
                          std::to_string(kMaxOrder));
    c_[0] = value;
  }

  /// The coordinate function x_axis expanded at `value`.
  static Jet variable(int dim, int order, int axis, double value) {
    Jet j(dim, order, value);
    if (order >= 1) j.c_[static_cast<std::size_t>(index(dim, MultiIndex::unit(dim, axis)))] = 1.0;
    return j;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return size_for(dim_, order_); }
  double value() const { return c_[0]; }

  static int size_for(int dim, int order) {
    return dim == 1 ? order + 1 : (order + 1) * (order + 2) / 2;
  }
  static int degree_base(int dim, int n) { return dim == 1 ? n : n * (n + 1) / 2; }
  static int index(int dim, const MultiIndex& a) {
    if (dim == 1) return a[0];
    const int n = a[0] + a[1];
    return n * (n + 1) / 2 + a[1];
  }

  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

  double coeff(const MultiIndex& a) const {
    if (a.order() > order_) throw OrderExceeded("jet coefficient beyond truncation order");
    return c_[static_cast<std::size_t>(index(dim_, a))];
  }
  /// ∂^α f(x0).
  double derivative(const MultiIndex& a) const { return coeff(a) * a.factorial(); }

  /// Largest |∂^α f(x0)| over |α| == n.
  double max_abs_derivative_of_order(int n) const {
    double m = 0.0;
    if (dim_ == 1) return std::abs(c_[static_cast<std::size_t>(n)]) * factorial(n);
    for (int b = 0; b <= n; ++b) {
      const double v =
          std::abs(c_[static_cast<std::size_t>(degree_base(2, n) + b)]) * factorial(n - b) * factorial(b);
      m = std::max(m, v);
    }
    return m;
  }

  /// Jet of ∂^α f at the same point; its order drops by |α|.
  Jet shifted(const MultiIndex& alpha) const {
    const int k = alpha.order();
    if (k > order_) throw OrderExceeded("cannot differentiate jet beyond its order");
    Jet out(dim_, order_ - k);
    for (int n = 0; n <= out.order_; ++n) {
      for (int b = 0; b <= (dim_ == 1 ? 0 : n); ++b) {
        MultiIndex beta = dim_ == 1 ? MultiIndex(1, {n}) : MultiIndex(2, {n - b, b});
        MultiIndex full = beta + alpha;
        out.c_[static_cast<std::size_t>(index(dim_, beta))] =
            c_[static_cast<std::size_t>(index(dim_, full))] * full.factorial() / beta.factorial();
      }
    }
    return out;
  }

  Jet truncated(int order) const {
    if (order > order_) throw OrderExceeded("cannot raise jet order by truncation");
    Jet out(dim_, order);
    for (int i = 0; i < out.size(); ++i) out.c_[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(i)];
    return out;
  }

  Jet& operator+=(const Jet& o) {
    check_compatible(o);
    for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] += o.c_[static_cast<std::size_t>(i)];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_compatible(o);
    for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] -= o.c_[static_cast<std::size_t>(i)];
    return *this;
  }
  Jet& operator*=(double s) {
    for (int i = 0; i < size(); ++i) c_[static_cast<std::size_t>(i)] *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, Jet a) { return (a *= -1.0) += s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_compatible(b);
    Jet out(a.dim_, a.order_);
    const int N = a.order_;
    if (a.dim_ == 1) {
      for (int i = 0; i <= N; ++i) {
        const double ai = a.c_[static_cast<std::size_t>(i)];
        if (ai == 0.0) continue;
        for (int j = 0; i + j <= N; ++j)
          out.c_[static_cast<std::size_t>(i + j)] += ai * b.c_[static_cast<std::size_t>(j)];
      }
      return out;
    }
    for (int n1 = 0; n1 <= N; ++n1) {
      const int base1 = n1 * (n1 + 1) / 2;
      for (int b1 = 0; b1 <= n1; ++b1) {
        const double ai = a.c_[static_cast<std::size_t>(base1 + b1)];
        if (ai == 0.0) continue;
        for (int n2 = 0; n1 + n2 <= N; ++n2) {
          const int base2 = n2 * (n2 + 1) / 2;
          const int base = (n1 + n2) * (n1 + n2 + 1) / 2;
          for (int b2 = 0; b2 <= n2; ++b2)
            out.c_[static_cast<std::size_t>(base + b1 + b2)] += ai * b.c_[static_cast<std::size_t>(base2 + b2)];
        }
      }
    }
    return out;
  }

  /// f(J) given f's univariate Taylor coefficients at J.value().
  Jet compose(const Taylor1D& f) const {
    Jet d = *this;
    d.c_[0] = 0.0;
    Jet r(dim_, order_, f[static_cast<std::size_t>(order_)]);
    for (int k = order_ - 1; k >= 0; --k) {
      r = r * d;
      r.c_[0] += f[static_cast<std::size_t>(k)];
    }
    return r;
  }

  static double factorial(int n) {
    static constexpr std::array<double, kMaxOrder + 1> table = {1, 1, 2, 6, 24, 120, 720, 5040, 40320};
    return n <= kMaxOrder ? table[static_cast<std::size_t>(n)] : std::tgamma(n + 1.0);
  }

 private:
  void check_compatible(const Jet& o) const {
    if (o.dim_ != dim_ || o.order_ != order_) throw DimensionMismatch("jet shape mismatch");
  }

  int dim_ = 1;
  int order_ = 0;
  std::array<double, kMaxCoeffs> c_{};
};

// ---------------------------------------------------------------------------
// Univariate Taylor coefficients of elementary functions
// ---------------------------------------------------------------------------

namespace taylor {

inline Taylor1D exp(double v, int order) {
  Taylor1D t{};
  const double e = std::exp(v);
  for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = e / Jet::factorial(k);
  return t;
}

inline Taylor1D log(double v, int order) {
  if (!(v > 0.0)) throw DomainError("log of non-positive value");
  Taylor1D t{};
  t[0] = std::log(v);
  double p = 1.0;
  for (int k = 1; k <= order; ++k) {
    p /= v;
    t[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) * p / k;
  }
  return t;
}

/// (v + h)^p expanded in h; requires v > 0 unless p is a non-negative integer.
inline Taylor1D pow(double v, double p, int order) {
  Taylor1D t{};
  const bool integral = p >= 0.0 && std::floor(p) == p;
  if (!(v > 0.0) && !integral) throw DomainError("fractional power of non-positive value");
  if (integral) {
    // binomial expansion of (v+h)^p, exact for v == 0
    double binom = 1.0;
    for (int k = 0; k <= order; ++k) {
      if (k > p) break;
      t[static_cast<std::size_t>(k)] = binom * std::pow(v, p - k);
      binom *= (p - k) / (k + 1);
    }
    return t;
  }
  double binom = 1.0;
  const double vp = std::pow(v, p);
  double vk = 1.0;
  for (int k = 0; k <= order; ++k) {
    t[static_cast<std::size_t>(k)] = binom * vp / vk;
    binom *= (p - k) / (k + 1);
    vk *= v;
  }
  return t;
}

inline Taylor1D reciprocal(double v, int order) {
  if (v == 0.0) throw DomainError("reciprocal of zero");
  Taylor1D t{};
  double p = 1.0 / v;
  for (int k = 0; k <= order; ++k) {
    t[static_cast<std::size_t>(k)] = ((k % 2 == 0) ? 1.0 : -1.0) * p;
    p /= v;
  }
  return t;
}

inline Taylor1D sin(double v, int order) {
  Taylor1D t{};
  const double s = std::sin(v), c = std::cos(v);
  const double cyc[4] = {s, c, -s, -c};
  for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = cyc[k % 4] / Jet::factorial(k);
  return t;
}

inline Taylor1D cos(double v, int order) {
  Taylor1D t{};
  const double s = std::sin(v), c = std::cos(v);
  const double cyc[4] = {c, -s, -c, s};
  for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = cyc[k % 4] / Jet::factorial(k);
  return t;
}

inline Taylor1D sinh(double v, int order) {
  Taylor1D t{};
  const double s = std::sinh(v), c = std::cosh(v);
  for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = (k % 2 == 0 ? s : c) / Jet::factorial(k);
  return t;
}

inline Taylor1D cosh(double v, int order) {
  Taylor1D t{};
  const double s = std::sinh(v), c = std::cosh(v);
  for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = (k % 2 == 0 ? c : s) / Jet::factorial(k);
  return t;
}

/// Coefficients of a univariate function given its plain derivatives f^{(k)}(v).
inline Taylor1D from_derivatives(std::span<const double> derivs, int order) {
  Taylor1D t{};
  for (int k = 0; k <= order; ++k)
    t[static_cast<std::size_t>(k)] = derivs[static_cast<std::size_t>(k)] / Jet::factorial(k);
  return t;
}

}  // namespace taylor

inline Jet exp(const Jet& j) { return j.compose(taylor::exp(j.value(), j.order())); }
inline Jet log(const Jet& j) { return j.compose(taylor::log(j.value(), j.order())); }
inline Jet pow(const Jet& j, double p) { return j.compose(taylor::pow(j.value(), p, j.order())); }
inline Jet sqrt(const Jet& j) { return pow(j, 0.5); }
inline Jet reciprocal(const Jet& j) { return j.compose(taylor::reciprocal(j.value(), j.order())); }
inline Jet sin(const Jet& j) { return j.compose(taylor::sin(j.value(), j.order())); }
inline Jet cos(const Jet& j) { return j.compose(taylor::cos(j.value(), j.order())); }
inline Jet sinh(const Jet& j) { return j.compose(taylor::sinh(j.value(), j.order())); }
inline Jet cosh(const Jet& j) { return j.compose(taylor::cosh(j.value(), j.order())); }
inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

/// Integer power by repeated squaring; exact Leibniz expansion of u^p.
inline Jet ipow(Jet base, int p) {
  if (p < 0) throw DomainError("negative integer power");
  Jet result(base.dim(), base.order(), 1.0);
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

}  // namespace gfspec
