#pragma once

// ε-parameterized nets of smooth functions and their algebra.
//
// A net is an immutable closure (x, ε, order) -> Jet. Everything downstream
// (seminorms, pairings, fibers) only ever asks a net for jets, so sums,
// products, derivatives and scalings compose by jet arithmetic.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gfspec/core.hpp"
#include "gfspec/jet.hpp"

namespace gfspec {

inline constexpr int kDefaultMaxOrder = 6;

/// Geometric hint about where a net concentrates. Layers are bands
/// |n·x − b| ≤ c·ε^q (points in 1-D, lines in 2-D); oscillations have a
/// wavelength c·ε along n. Samplers and quadrature use them to avoid
/// stepping over structure thinner than a grid cell.
struct Feature {
  enum class Kind { layer, oscillation };
  Kind kind = Kind::layer;
  Point normal{1.0, 0.0};
  double offset = 0.0;
  double coeff = 1.0;
  double power = 1.0;

  static Feature layer(Point normal, double offset, double coeff, double power = 1.0) {
    return {Kind::layer, normal, offset, coeff, power};
  }
  static Feature oscillation(Point normal, double wavelength_coeff, double power = 1.0) {
    return {Kind::oscillation, normal, 0.0, wavelength_coeff, power};
  }
  double scale(double eps) const { return coeff * std::pow(eps, power); }

  friend bool operator==(const Feature& a, const Feature& b) {
    return a.kind == b.kind && a.normal == b.normal && a.offset == b.offset && a.coeff == b.coeff &&
           a.power == b.power;
  }
};

/// Support information. `box` (when set) is where the net may be nonzero for
/// ε ≤ eps0; `vanishes` (when set) certifies u_ε ≡ 0 on a box at a given ε.
struct Support {
  std::optional<Box> box;
  double eps0 = 1.0;
  std::function<bool(const Box&, double)> vanishes;

  bool vanishes_on(const Box& k, double eps) const {
    if (box && eps <= eps0 && !box->intersects(k)) return true;
    return vanishes ? vanishes(k, eps) : false;
  }
};

using JetRule = std::function<Jet(const Point& x, double eps, int order)>;
using ValueRule = std::function<double(const Point& x, double eps)>;

class Net {
 public:
  Net() = default;
  Net(int dim, int max_order, JetRule rule, Support support = {}, std::vector<Feature> features = {},
      std::string label = {}) {
    check_dim(dim);
    if (max_order < 0 || max_order > kMaxOrder)
      throw OrderExceeded("net derivative order must lie in 0.." + std::to_string(kMaxOrder));
    if (!rule) throw DomainError("net requires an evaluation rule");
    auto impl = std::make_shared<Impl>();
    impl->dim = dim;
    impl->max_order = max_order;
    impl->rule = std::move(rule);
    impl->support = std::move(support);
    impl->features = std::move(features);
    impl->label = std::move(label);
    impl_ = std::move(impl);
  }

  bool valid() const { return static_cast<bool>(impl_); }
  int dim() const { return impl_->dim; }
  int max_order() const { return impl_->max_order; }
  const Support& support() const { return impl_->support; }
  const std::vector<Feature>& features() const { return impl_->features; }
  const std::string& label() const { return impl_->label; }

  /// All derivatives up to `order` at x. Exactly zero outside the support box.
  Jet jet(const Point& x, double eps, int order) const {
    check_eps(eps);
    if (order > impl_->max_order)
      throw OrderExceeded("requested derivative order " + std::to_string(order) + " exceeds net order " +
                          std::to_string(impl_->max_order));
    const Support& s = impl_->support;
    if (s.box && eps <= s.eps0 && !s.box->contains(x)) return Jet(impl_->dim, order);
    return impl_->rule(x, eps, order);
  }

  double value(const Point& x, double eps) const {
    if (!impl_->value_rule) return jet(x, eps, 0).value();
    check_eps(eps);
    const Support& s = impl_->support;
    if (s.box && eps <= s.eps0 && !s.box->contains(x)) return 0.0;
    return impl_->value_rule(x, eps);
  }

  /// Copy of this net whose plain values come from a scalar rule that must
  /// agree with the order-0 jet.
  Net with_value_rule(ValueRule v) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->value_rule = std::move(v);
    Net out;
    out.impl_ = std::move(impl);
    return out;
  }

 private:
  struct Impl {
    int dim = 1;
    int max_order = kDefaultMaxOrder;
    JetRule rule;
    ValueRule value_rule;
    Support support;
    std::vector<Feature> features;
    std::string label;
  };
  std::shared_ptr<const Impl> impl_;
};

inline std::vector<Feature> merge_features(const std::vector<Feature>& a, const std::vector<Feature>& b) {
  std::vector<Feature> out = a;
  for (const auto& f : b)
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  return out;
}

/// ∂^α u_ε(x).
inline double evaluate(const Net& net, const MultiIndex& alpha, const Point& x, double eps) {
  if (alpha.dim != net.dim()) throw DimensionMismatch("multi-index dimension differs from net dimension");
  return net.jet(x, eps, alpha.order()).derivative(alpha);
}

inline Net differentiate(const Net& net, const MultiIndex& alpha) {
  if (alpha.dim != net.dim()) throw DimensionMismatch("multi-index dimension differs from net dimension");
  const int k = alpha.order();
  if (k > net.max_order()) throw OrderExceeded("cannot differentiate beyond the net's derivative order");
  JetRule rule = [net, alpha, k](const Point& x, double eps, int order) {
    return net.jet(x, eps, order + k).shifted(alpha);
  };
  return Net(net.dim(), net.max_order() - k, std::move(rule), net.support(), net.features(),
             "d(" + net.label() + ")");
}

// ---------------------------------------------------------------------------
// Algebra
// ---------------------------------------------------------------------------

enum class CombineMode { add, mul, scalar_mul, int_pow };

namespace detail {

inline void check_same_dim(const Net& a, const Net& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("cannot combine nets of dimension " + std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()));
}

}  // namespace detail

inline Net add(const Net& u, const Net& v) {
  detail::check_same_dim(u, v);
  Support s;
  if (u.support().box && v.support().box) {
    s.box = u.support().box->hull(*v.support().box);
    s.eps0 = std::min(u.support().eps0, v.support().eps0);
  }
  const Support su = u.support(), sv = v.support();
  s.vanishes = [su, sv](const Box& k, double eps) { return su.vanishes_on(k, eps) && sv.vanishes_on(k, eps); };
  return Net(u.dim(), std::min(u.max_order(), v.max_order()),
             [u, v](const Point& x, double eps, int order) { return u.jet(x, eps, order) + v.jet(x, eps, order); },
             std::move(s), merge_features(u.features(), v.features()), "(" + u.label() + "+" + v.label() + ")")
      .with_value_rule([u, v](const Point& x, double eps) { return u.value(x, eps) + v.value(x, eps); });
}

inline Net mul(const Net& u, const Net& v) {
  detail::check_same_dim(u, v);
  Support s;
  if (u.support().box && v.support().box) {
    s.box = u.support().box->intersection(*v.support().box);
    s.eps0 = std::min(u.support().eps0, v.support().eps0);
  } else if (u.support().box) {
    s.box = u.support().box;
    s.eps0 = u.support().eps0;
  } else if (v.support().box) {
    s.box = v.support().box;
    s.eps0 = v.support().eps0;
  }
  const Support su = u.support(), sv = v.support();
  s.vanishes = [su, sv](const Box& k, double eps) { return su.vanishes_on(k, eps) || sv.vanishes_on(k, eps); };
  return Net(u.dim(), std::min(u.max_order(), v.max_order()),
             [u, v](const Point& x, double eps, int order) { return u.jet(x, eps, order) * v.jet(x, eps, order); },
             std::move(s), merge_features(u.features(), v.features()), "(" + u.label() + "*" + v.label() + ")")
      .with_value_rule([u, v](const Point& x, double eps) { return u.value(x, eps) * v.value(x, eps); });
}

inline Net scalar_mul(double c, const Net& u) {
  Support s = u.support();
  if (c == 0.0) s.vanishes = [](const Box&, double) { return true; };
  return Net(u.dim(), u.max_order(),
             [c, u](const Point& x, double eps, int order) { return c * u.jet(x, eps, order); }, std::move(s),
             u.features(), std::to_string(c) + "*" + u.label())
      .with_value_rule([c, u](const Point& x, double eps) { return c * u.value(x, eps); });
}

inline Net int_pow(const Net& u, int p) {
  if (p < 1) throw DomainError("integer power must be at least 1");
  if (p == 1) return u;
  return Net(u.dim(), u.max_order(),
             [u, p](const Point& x, double eps, int order) { return ipow(u.jet(x, eps, order), p); }, u.support(),
             u.features(), u.label() + "^" + std::to_string(p))
      .with_value_rule([u, p](const Point& x, double eps) { return std::pow(u.value(x, eps), p); });
}

/// Dispatcher over the four algebra modes. add and mul fold over all operands.
inline Net combine(CombineMode mode, std::span<const Net> operands, double scalar = 1.0, int power = 1) {
  if (operands.empty()) throw DomainError("combine needs at least one operand");
  switch (mode) {
    case CombineMode::add: {
      Net r = operands[0];
      for (std::size_t i = 1; i < operands.size(); ++i) r = add(r, operands[i]);
      return r;
    }
    case CombineMode::mul: {
      Net r = operands[0];
      for (std::size_t i = 1; i < operands.size(); ++i) r = mul(r, operands[i]);
      return r;
    }
    case CombineMode::scalar_mul: return scalar_mul(scalar, operands[0]);
    case CombineMode::int_pow: return int_pow(operands[0], power);
  }
  throw DomainError("unknown combine mode");
}

// ---------------------------------------------------------------------------
// Scales
// ---------------------------------------------------------------------------

struct ScaleMap {
  std::string id = "power";
  std::function<double(double r, double eps)> rule = [](double r, double eps) { return std::pow(eps, r); };

  double operator()(double r, double eps) const { return rule(r, eps); }
  static ScaleMap power() { return {}; }
};

/// a_ε(r)·u_ε.
inline Net scale(const Net& net, const ScaleMap& a, double r) {
  if (r < 0.0) throw DomainError("scale exponent must be non-negative");
  return Net(net.dim(), net.max_order(),
             [net, a, r](const Point& x, double eps, int order) { return a(r, eps) * net.jet(x, eps, order); },
             net.support(), net.features(), net.label());
}

// ---------------------------------------------------------------------------
// ε-independent smooth functions and differential polynomials
// ---------------------------------------------------------------------------

struct SmoothFunction {
  int dim = 1;
  int max_order = kMaxOrder;
  std::function<Jet(const Point&, int)> rule;

  Jet jet(const Point& x, int order) const {
    if (order > max_order) throw OrderExceeded("smooth function derivative order exceeded");
    return rule(x, order);
  }
  double operator()(const Point& x) const { return jet(x, 0).value(); }

  static SmoothFunction constant(int dim, double c) {
    return {dim, kMaxOrder, [dim, c](const Point&, int order) { return Jet(dim, order, c); }};
  }
  static SmoothFunction coordinate(int dim, int axis) {
    return {dim, kMaxOrder, [dim, axis](const Point& x, int order) {
              return Jet::variable(dim, order, axis, x[static_cast<std::size_t>(axis)]);
            }};
  }
  /// Lifts a jet-valued expression of the coordinate jets.
  static SmoothFunction from_expression(int dim, std::function<Jet(const Jet&, const Jet&)> expr,
                                        int max_order = kMaxOrder) {
    return {dim, max_order, [dim, expr](const Point& x, int order) {
              const Jet x0 = Jet::variable(dim, order, 0, x[0]);
              const Jet x1 = dim == 2 ? Jet::variable(dim, order, 1, x[1]) : Jet(dim, order);
              return expr(x0, x1);
            }};
  }
};

struct DiffTerm {
  MultiIndex alpha;
  SmoothFunction coeff;
};

struct DiffPolynomial {
  std::vector<DiffTerm> terms;

  int order() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.alpha.order());
    return m;
  }
  DiffPolynomial& add(const MultiIndex& alpha, double c) {
    terms.push_back({alpha, SmoothFunction::constant(alpha.dim, c)});
    return *this;
  }
  DiffPolynomial& add(const MultiIndex& alpha, SmoothFunction c) {
    terms.push_back({alpha, std::move(c)});
    return *this;
  }
};

/// Σ C_α(x)·∂^α u_ε(x).
inline Net apply_diff_polynomial(const DiffPolynomial& P, const Net& net) {
  if (P.terms.empty()) throw DomainError("differential polynomial has no terms");
  const int k = P.order();
  if (k > net.max_order()) throw OrderExceeded("differential polynomial order exceeds net order");
  int out_order = net.max_order() - k;
  for (const auto& t : P.terms) {
    if (t.alpha.dim != net.dim() || t.coeff.dim != net.dim())
      throw DimensionMismatch("differential polynomial dimension differs from net dimension");
    out_order = std::min(out_order, t.coeff.max_order);
  }
  return Net(net.dim(), out_order,
             [P, net](const Point& x, double eps, int order) {
               Jet sum(net.dim(), order);
               for (const auto& t : P.terms)
                 sum += t.coeff.jet(x, order) * net.jet(x, eps, order + t.alpha.order()).shifted(t.alpha);
               return sum;
             },
             net.support(), net.features(), "P(d)" + net.label());
}

// ---------------------------------------------------------------------------
// Elementary nets
// ---------------------------------------------------------------------------

inline Net zero_net(int dim) {
  Support s;
  s.vanishes = [](const Box&, double) { return true; };
  return Net(dim, kMaxOrder, [dim](const Point&, double, int order) { return Jet(dim, order); }, std::move(s), {},
             "0");
}

inline Net constant_net(int dim, double c) {
  if (c == 0.0) return zero_net(dim);
  return Net(dim, kMaxOrder, [dim, c](const Point&, double, int order) { return Jet(dim, order, c); }, {}, {},
             std::to_string(c));
}

/// ε-independent embedding of a smooth function.
inline Net smooth_net(const SmoothFunction& f, std::string label = "f") {
  return Net(f.dim, std::min(f.max_order, kMaxOrder),
             [f](const Point& x, double, int order) { return f.jet(x, order); }, {}, {}, std::move(label));
}

/// ε^{-p}·|ln ε|^q·f(x).
inline Net eps_power_log_net(const SmoothFunction& f, double p, double q, std::string label = {}) {
  if (label.empty()) label = "eps^-" + std::to_string(p) + "|ln eps|^" + std::to_string(q) + " f";
  return Net(f.dim, std::min(f.max_order, kMaxOrder),
             [f, p, q](const Point& x, double eps, int order) {
               const double c = std::pow(eps, -p) * std::pow(std::abs(std::log(eps)), q);
               return c * f.jet(x, order);
             },
             {}, {}, std::move(label));
}

/// A·ε^a·sin(x/ε) in one dimension.
inline Net oscillatory_net(double amplitude = 1.0, double a = 1.0) {
  return Net(1, kDefaultMaxOrder,
             [amplitude, a](const Point& x, double eps, int order) {
               const Jet y = Jet::variable(1, order, 0, x[0]) * (1.0 / eps);
               return (amplitude * std::pow(eps, a)) * sin(y);
             },
             {}, {Feature::oscillation({1.0, 0.0}, 2.0 * std::acos(-1.0))}, "eps sin(x/eps)");
}

}  // namespace gfspec
