#pragma once

// Mollifiers and the mollifier embeddings of δ, ∂^kδ, δ^m, H and piecewise
// smooth functions.

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "gfspec/core.hpp"
#include "gfspec/jet.hpp"
#include "gfspec/net.hpp"
#include "gfspec/quadrature.hpp"

namespace gfspec {

enum class ProfileKind { standard_bump, custom };

/// Unnormalized 1-D profile supplied by the caller: Taylor coefficients at y
/// up to `max_order`, identically zero for |y| ≥ κ.
struct CustomProfile {
  std::function<Taylor1D(double y, int order)> taylor;
  int max_order = 0;
  bool nonnegative = false;
};

class Mollifier {
 public:
  int dim() const { return dim_; }
  double kappa() const { return kappa_; }
  double normalizer() const { return normalizer_; }
  bool nonnegative() const { return nonnegative_; }
  int max_order() const { return max_order_; }
  ProfileKind kind() const { return kind_; }

  /// Taylor coefficients of the normalized 1-D profile at y.
  Taylor1D taylor(double y, int order) const {
    if (order > max_order_) throw OrderExceeded("mollifier derivative budget exceeded");
    Taylor1D t{};
    if (std::abs(y) >= kappa_) return t;
    t = raw_taylor(y, order);
    for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] *= normalizer_;
    return t;
  }

  double operator()(double y) const {
    if (kind_ == ProfileKind::custom) return taylor(y, 0)[0];
    const double s = y / kappa_, q = 1.0 - s * s;
    if (q <= 1.0 / 700.0) return 0.0;
    return normalizer_ * std::exp(-1.0 / q);
  }

  /// φ(y) for a scalar jet argument (one-dimensional mollifier).
  Jet apply(const Jet& y) const {
    if (std::abs(y.value()) >= kappa_) return Jet(y.dim(), y.order());
    return y.compose(taylor(y.value(), y.order()));
  }

  /// Radial φ(|y|) for a two-dimensional mollifier; arguments are jets.
  Jet apply(const Jet& y0, const Jet& y1) const {
    if (dim_ != 2) throw DimensionMismatch("radial evaluation needs a two-dimensional mollifier");
    const double r2 = (y0.value() * y0.value() + y1.value() * y1.value()) / (kappa_ * kappa_);
    if (r2 >= 1.0 - 1.0 / 700.0) return Jet(y0.dim(), y0.order());
    const Jet q = 1.0 + (-1.0 / (kappa_ * kappa_)) * (y0 * y0 + y1 * y1);
    return normalizer_ * exp(-reciprocal(q));
  }

  /// Radial φ(|y|) at a plain point.
  double radial(double y0, double y1) const {
    const double r2 = (y0 * y0 + y1 * y1) / (kappa_ * kappa_);
    if (r2 >= 1.0 - 1.0 / 700.0) return 0.0;
    return normalizer_ * std::exp(-1.0 / (1.0 - r2));
  }

  /// ∫ φ^n over R^d at unit scale, by quadrature.
  double power_integral(int n) const {
    const GaussRule& rule = gauss_legendre(32);
    if (dim_ == 1) {
      return integrate_panels([&](double y) { return std::pow((*this)(y), n); }, {-kappa_, kappa_}, 64, rule);
    }
    return 2.0 * std::numbers::pi *
           integrate_panels(
               [&](double r) {
                 const Jet y0(1, 0, r), y1(1, 0, 0.0);
                 return r * std::pow(apply(y0, y1).value(), n);
               },
               {0.0, kappa_}, 64, rule);
  }

 private:
  friend Mollifier make_mollifier(ProfileKind, double, int, const CustomProfile&);

  Taylor1D raw_taylor(double y, int order) const {
    if (kind_ == ProfileKind::custom) return custom_.taylor(y, order);
    Taylor1D t{};
    const Jet s = Jet::variable(1, order, 0, y) * (1.0 / kappa_);
    const Jet q = 1.0 - s * s;
    if (q.value() <= 1.0 / 700.0) return t;  // exp(-700) underflows the relevant range
    const Jet g = exp(-reciprocal(q));
    for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = g[k];
    return t;
  }

  int dim_ = 1;
  double kappa_ = 1.0;
  double normalizer_ = 1.0;
  bool nonnegative_ = true;
  int max_order_ = kMaxOrder;
  ProfileKind kind_ = ProfileKind::standard_bump;
  CustomProfile custom_;
};

inline Mollifier make_mollifier(ProfileKind kind, double kappa, int dim, const CustomProfile& custom = {}) {
  check_dim(dim);
  if (!(kappa > 0.0)) throw DomainError("mollifier radius must be positive");
  Mollifier m;
  m.dim_ = dim;
  m.kappa_ = kappa;
  m.kind_ = kind;
  if (kind == ProfileKind::custom) {
    if (!custom.taylor || custom.max_order < 1)
      throw DomainError("custom mollifier profile must supply derivative rules");
    if (dim != 1) throw DimensionMismatch("custom profiles are one-dimensional");
    m.custom_ = custom;
    m.max_order_ = std::min(custom.max_order, kMaxOrder);
    m.nonnegative_ = custom.nonnegative;
  }
  m.normalizer_ = 1.0;
  const double mass = m.power_integral(1);
  if (!(std::abs(mass) > 0.0)) throw DomainError("mollifier profile has zero mass");
  m.normalizer_ = 1.0 / mass;
  return m;
}

/// The standard bump on [-1, 1].
inline const Mollifier& standard_mollifier() {
  static const Mollifier m = make_mollifier(ProfileKind::standard_bump, 1.0, 1);
  return m;
}

/// G_n(z) = ∫_{-κ}^{z} φ(y)^n dy, tabulated once with quintic Hermite
/// interpolation between knots; derivatives of G come from φ^n directly.
class CumulativeProfile {
 public:
  CumulativeProfile(const Mollifier& moll, int n, int cells = 1024) : moll_(moll), n_(n), cells_(cells) {
    if (moll.dim() != 1) throw DimensionMismatch("cumulative profile needs a one-dimensional mollifier");
    if (n < 1) throw DomainError("cumulative profile power must be at least 1");
    const double k = moll.kappa();
    h_ = 2.0 * k / cells;
    const auto nk = static_cast<std::size_t>(cells + 1);
    G_.resize(nk);
    g_.resize(nk);
    dg_.resize(nk);
    const GaussRule& rule = gauss_legendre(16);
    double acc = 0.0;
    for (int i = 0; i <= cells; ++i) {
      const double z = -k + i * h_;
      if (i > 0) {
        const double a = z - h_;
        acc += integrate_panels([&](double y) { return std::pow(moll(y), n); }, {a, z}, 1, rule);
      }
      const Taylor1D t = power_taylor(z, 1);
      G_[static_cast<std::size_t>(i)] = acc;
      g_[static_cast<std::size_t>(i)] = t[0];
      dg_[static_cast<std::size_t>(i)] = t[1];
    }
    total_ = acc;
    // upper tails accumulated from the right, accurate where G_n is close to its total
    tail_.assign(nk, 0.0);
    for (std::size_t i = nk - 1; i-- > 0;) tail_[i] = tail_[i + 1] + (G_[i + 1] - G_[i]);
  }

  int power() const { return n_; }
  const Mollifier& mollifier() const { return moll_; }
  double total() const { return total_; }

  double value(double z) const {
    const double k = moll_.kappa();
    if (z <= -k) return 0.0;
    if (z >= k) return total_;
    return hermite(G_, 1.0, z);
  }

  /// total − G_n(z), without cancellation for z near κ.
  double tail(double z) const {
    const double k = moll_.kappa();
    if (z <= -k) return total_;
    if (z >= k) return 0.0;
    return hermite(tail_, -1.0, z);
  }

  /// ∫_lo^hi φ^n, taken from the upper tails when both ends lie right of 0.
  double between(double lo, double hi) const {
    return std::min(lo, hi) >= 0.0 ? tail(lo) - tail(hi) : value(hi) - value(lo);
  }

  /// G_n(z) with z a jet.
  Jet apply(const Jet& z) const {
    const int order = z.order();
    Taylor1D t{};
    t[0] = value(z.value());
    if (order > 0) {
      const Taylor1D p = power_taylor(z.value(), order - 1);
      for (int k = 1; k <= order; ++k) t[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k - 1)] / k;
    }
    return z.compose(t);
  }

  Jet apply_tail(const Jet& z) const {
    const int order = z.order();
    Taylor1D t{};
    t[0] = tail(z.value());
    if (order > 0) {
      const Taylor1D p = power_taylor(z.value(), order - 1);
      for (int k = 1; k <= order; ++k) t[static_cast<std::size_t>(k)] = -p[static_cast<std::size_t>(k - 1)] / k;
    }
    return z.compose(t);
  }

  Jet between(const Jet& lo, const Jet& hi) const {
    return std::min(lo.value(), hi.value()) >= 0.0 ? apply_tail(lo) - apply_tail(hi) : apply(hi) - apply(lo);
  }

 private:
  // quintic Hermite on the knot table; sign flips the stored derivatives for the tail table
  double hermite(const std::vector<double>& table, double sign, double z) const {
    const double k = moll_.kappa();
    double u = (z + k) / h_;
    int i = static_cast<int>(u);
    if (i >= cells_) i = cells_ - 1;
    const double t = u - i;
    const auto a = static_cast<std::size_t>(i), b = a + 1;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
    const double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    const double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    const double h3 = 0.5 * (t3 - 2 * t4 + t5);
    const double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    const double h5 = 10 * t3 - 15 * t4 + 6 * t5;
    return table[a] * h0 + table[b] * h5 +
           sign * (h_ * g_[a] * h1 + h_ * h_ * dg_[a] * h2 + h_ * h_ * dg_[b] * h3 + h_ * g_[b] * h4);
  }

  Taylor1D power_taylor(double z, int order) const {
    const Jet y = Jet::variable(1, order, 0, z);
    const Jet p = ipow(moll_.apply(y), n_);
    Taylor1D t{};
    for (int k = 0; k <= order; ++k) t[static_cast<std::size_t>(k)] = p[k];
    return t;
  }

  Mollifier moll_;
  int n_;
  int cells_;
  double h_ = 0.0;
  double total_ = 0.0;
  std::vector<double> G_, g_, dg_, tail_;
};

namespace detail {

/// Support data shared by nets concentrated in |x_i| ≤ κε.
inline Support centered_support(int dim, double kappa) {
  Support s;
  s.box = Box::around(dim, Point{0.0, 0.0}, Point{kappa, kappa});
  s.vanishes = [dim, kappa](const Box& k, double eps) {
    const double w = kappa * eps;
    return !Box::around(dim, Point{0.0, 0.0}, Point{w, w}).intersects(k);
  };
  return s;
}

inline std::vector<Feature> centered_features(int dim, double kappa) {
  std::vector<Feature> f{Feature::layer({1.0, 0.0}, 0.0, kappa)};
  if (dim == 2) f.push_back(Feature::layer({0.0, 1.0}, 0.0, kappa));
  return f;
}

}  // namespace detail

/// (x, ε) ↦ ε^{-md} φ^m(x/ε).
inline Net delta_power_net(int m, const Mollifier& moll = standard_mollifier(), int max_order = kDefaultMaxOrder) {
  if (m < 1) throw DomainError("delta power must be at least 1");
  const int d = moll.dim();
  const int order = std::min(max_order, moll.max_order());
  std::string label = m == 1 ? "delta" : "delta^" + std::to_string(m);
  if (!moll.nonnegative() && m % 2 == 0) label += " (signed mollifier)";
  return Net(d, order,
             [moll, m, d](const Point& x, double eps, int ord) {
               const double inv = 1.0 / eps;
               const Jet y0 = Jet::variable(d, ord, 0, x[0]) * inv;
               Jet phi = d == 1 ? moll.apply(y0) : moll.apply(y0, Jet::variable(d, ord, 1, x[1]) * inv);
               return std::pow(eps, -static_cast<double>(m * d)) * ipow(phi, m);
             },
             detail::centered_support(d, moll.kappa()), detail::centered_features(d, moll.kappa()), label)
      .with_value_rule([moll, m, d](const Point& x, double eps) {
        const double inv = 1.0 / eps;
        const double phi = d == 1 ? moll(x[0] * inv) : moll.radial(x[0] * inv, x[1] * inv);
        return std::pow(eps, -static_cast<double>(m * d)) * std::pow(phi, m);
      });
}

inline Net delta_net(const Mollifier& moll = standard_mollifier()) { return delta_power_net(1, moll); }

/// (x, ε) ↦ ε^{-1-k} φ^{(k)}(x/ε), i.e. the embedding of ∂^kδ.
inline Net delta_derivative_net(int k, const Mollifier& moll = standard_mollifier()) {
  if (k < 0) throw DomainError("derivative order must be non-negative");
  if (moll.dim() != 1) throw DimensionMismatch("delta derivative nets are one-dimensional");
  const int budget = moll.max_order() - k;
  if (budget < 0) throw OrderExceeded("delta derivative exceeds the mollifier derivative budget");
  return Net(1, std::min(kDefaultMaxOrder, budget),
             [moll, k](const Point& x, double eps, int ord) {
               const double y = x[0] / eps;
               const Taylor1D t = moll.taylor(y, k + ord);
               Taylor1D d{};
               for (int j = 0; j <= ord; ++j)
                 d[static_cast<std::size_t>(j)] =
                     t[static_cast<std::size_t>(k + j)] * Jet::factorial(k + j) / Jet::factorial(j);
               const Jet yj = Jet::variable(1, ord, 0, x[0]) * (1.0 / eps);
               return std::pow(eps, -1.0 - k) * yj.compose(d);
             },
             detail::centered_support(1, moll.kappa()), detail::centered_features(1, moll.kappa()),
             k == 0 ? "delta" : "d^" + std::to_string(k) + " delta");
}

/// Embedding of the Heaviside function, H_ε(x) = ∫_{-κ}^{x/ε} φ.
inline Net heaviside_net(const Mollifier& moll = standard_mollifier()) {
  auto G = std::make_shared<const CumulativeProfile>(moll, 1);
  Support s;
  s.vanishes = [kappa = moll.kappa()](const Box& k, double eps) { return k.upper(0) < -kappa * eps; };
  return Net(1, std::min(kDefaultMaxOrder, moll.max_order() + 1),
             [G, kappa = moll.kappa()](const Point& x, double eps, int ord) {
               if (x[0] >= kappa * eps) return Jet(1, ord, 1.0);
               return G->apply(Jet::variable(1, ord, 0, x[0]) * (1.0 / eps)) * (1.0 / G->total());
             },
             std::move(s), {Feature::layer({1.0, 0.0}, 0.0, moll.kappa())}, "H");
}

/// A function smooth on (-∞, x0] and on [x0, ∞).
struct PiecewiseSpec {
  double x0 = 0.0;
  std::function<double(double)> left;
  std::function<double(double)> right;
};

/// (f∗φ_ε)(x) = ∫ f(x − εz) φ(z) dz; the α-th derivative is
/// ε^{-α} ∫ f(x − εz) φ^{(α)}(z) dz. Adaptive quadrature, with the image of the
/// breakpoint as a panel edge.
inline Net embed_piecewise(const PiecewiseSpec& f, const Mollifier& moll = standard_mollifier()) {
  if (!f.left || !f.right) throw DomainError("piecewise function needs both pieces");
  if (moll.dim() != 1) throw DimensionMismatch("piecewise embeddings are one-dimensional");
  const double kappa = moll.kappa();
  return Net(1, std::min(kDefaultMaxOrder, moll.max_order()),
             [f, moll, kappa](const Point& x, double eps, int ord) {
               const double zb = (x[0] - f.x0) / eps;  // x − εz = x0
               std::vector<double> edges{-kappa};
               if (zb > -kappa && zb < kappa) edges.push_back(zb);
               edges.push_back(kappa);
               const double inv = 1.0 / eps;
               auto integrand = [&](double z, double* v, double* a) {
                 const double xs = x[0] - eps * z;
                 const double fv = xs < f.x0 ? f.left(xs) : f.right(xs);
                 const Taylor1D t = moll.taylor(z, ord);
                 double sc = 1.0;
                 for (int k = 0; k <= ord; ++k) {
                   v[k] = fv * t[static_cast<std::size_t>(k)] * sc;
                   a[k] = std::abs(v[k]);
                   sc *= inv;
                 }
               };
               const VectorIntegral r = integrate_adaptive(integrand, ord + 1, edges, QuadratureOptions{1e-13, 30});
               Jet out(1, ord);
               for (int k = 0; k <= ord; ++k) out[k] = r.value[static_cast<std::size_t>(k)];
               return out;
             },
             {}, {Feature::layer({1.0, 0.0}, f.x0, kappa)}, "f*phi");
}

}  // namespace gfspec
