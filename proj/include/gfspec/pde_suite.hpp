#pragma once

// Solution nets of the linear and semilinear model problems: the 1-D wave
// equation, three semilinear transport equations in closed form, the
// truncated blow-up problem and the Rauch–Reed interaction term.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "gfspec/asymptotics.hpp"
#include "gfspec/core.hpp"
#include "gfspec/jet.hpp"
#include "gfspec/mollify.hpp"
#include "gfspec/net.hpp"
#include "gfspec/quadrature.hpp"

namespace gfspec {

namespace detail {

/// A jet in x alone, viewed as a jet in (x, t).
inline Jet lift_x(const Jet& j) {
  Jet out(2, j.order());
  for (int a = 0; a <= j.order(); ++a) out[Jet::index(2, MultiIndex(2, {a, 0}))] = j[a];
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Wave equation
// ---------------------------------------------------------------------------

struct WaveData1D {
  double c0 = 1.0;
  double c1 = 0.0;
  int m = 1;
  int n = 1;

  void validate() const {
    if (c0 == 0.0 && c1 == 0.0) throw DomainError("wave data needs c0 or c1 nonzero");
    if (m < 1 || n < 1) throw DomainError("delta powers of wave data must be at least 1");
  }
};

/// u_ε(x,t) = (c0/2)(φ_ε^m(x−t) + φ_ε^m(x+t)) + (c1/2)∫_{x−t}^{x+t} φ_ε^n,
/// the integral being ε^{1−n}(G_n((x+t)/ε) − G_n((x−t)/ε)).
inline Net dalembert_wave(const WaveData1D& data, const Mollifier& moll = standard_mollifier()) {
  data.validate();
  if (moll.dim() != 1) throw DimensionMismatch("wave data uses a one-dimensional mollifier");
  std::shared_ptr<const CumulativeProfile> G;
  if (data.c1 != 0.0) G = std::make_shared<const CumulativeProfile>(moll, data.n);
  const double kappa = moll.kappa();
  Support s;
  s.vanishes = [data, kappa](const Box& K, double eps) {
    const double w = kappa * eps;
    bool zero = true;
    if (data.c0 != 0.0) {
      const bool hits_minus = K.lower(0) - K.upper(1) <= w && K.upper(0) - K.lower(1) >= -w;
      const bool hits_plus = K.lower(0) + K.lower(1) <= w && K.upper(0) + K.upper(1) >= -w;
      zero = !hits_minus && !hits_plus;
    }
    if (zero && data.c1 != 0.0) {
      const double tmax = std::max(std::abs(K.lower(1)), std::abs(K.upper(1)));
      zero = K.lower(0) - tmax >= w || K.upper(0) + tmax <= -w;
    }
    return zero;
  };
  return Net(2, std::min(kDefaultMaxOrder, moll.max_order()),
             [data, moll, G](const Point& p, double eps, int ord) {
               const double inv = 1.0 / eps;
               const Jet X = Jet::variable(2, ord, 0, p[0]);
               const Jet T = Jet::variable(2, ord, 1, p[1]);
               const Jet zm = (X - T) * inv, zp = (X + T) * inv;
               Jet u(2, ord);
               if (data.c0 != 0.0) {
                 const double c = 0.5 * data.c0 * std::pow(eps, -static_cast<double>(data.m));
                 u += c * (ipow(moll.apply(zm), data.m) + ipow(moll.apply(zp), data.m));
               }
               if (data.c1 != 0.0) {
                 const double c = 0.5 * data.c1 * std::pow(eps, 1.0 - data.n);
                 u += c * G->between(zm, zp);
               }
               return u;
             },
             std::move(s), {Feature::layer({1.0, -1.0}, 0.0, kappa), Feature::layer({1.0, 1.0}, 0.0, kappa)},
             "wave")
      .with_value_rule([data, moll, G](const Point& p, double eps) {
        const double inv = 1.0 / eps;
        const double zm = (p[0] - p[1]) * inv, zp = (p[0] + p[1]) * inv;
        double u = 0.0;
        if (data.c0 != 0.0)
          u += 0.5 * data.c0 * std::pow(eps, -static_cast<double>(data.m)) *
               (std::pow(moll(zm), data.m) + std::pow(moll(zp), data.m));
        if (data.c1 != 0.0) u += 0.5 * data.c1 * std::pow(eps, 1.0 - data.n) * G->between(zm, zp);
        return u;
      });
}

// ---------------------------------------------------------------------------
// Semilinear transport (λ ≡ 0 after the characteristic change of variables)
// ---------------------------------------------------------------------------

enum class SemilinearTag { dissipative_cubic, sqrt_growth, log_growth };

struct SemilinearKind {
  enum class Initial { delta_power, delta_derivative };
  SemilinearTag tag = SemilinearTag::dissipative_cubic;
  Initial initial = Initial::delta_power;
  int order = 1;  // m for δ^m, k for ∂^kδ
};

/// The right-hand side F of ∂_t u = F(u).
inline double semilinear_rhs(SemilinearTag tag, double u) {
  switch (tag) {
    case SemilinearTag::dissipative_cubic: return -u * u * u;
    case SemilinearTag::sqrt_growth: return std::sqrt(1.0 + u * u);
    case SemilinearTag::log_growth:
      if (!(u > -1.0)) throw DomainError("log growth requires u > -1");
      return (u + 1.0) * std::log(u + 1.0);
  }
  return 0.0;
}

/// Closed-form solution for initial data given by a one-dimensional net.
inline Net semilinear_solution(SemilinearTag tag, const Net& u0) {
  if (u0.dim() != 1) throw DimensionMismatch("semilinear initial data must be one-dimensional");
  Support s;
  if (tag != SemilinearTag::sqrt_growth) {
    // F(0) = 0, so the solution vanishes wherever the data do
    const Support s0 = u0.support();
    s.vanishes = [s0](const Box& K, double eps) { return s0.vanishes_on(Box::interval(K.lower(0), K.upper(0)), eps); };
  }
  std::vector<Feature> features;
  for (const auto& f : u0.features())
    if (f.kind == Feature::Kind::layer) features.push_back(Feature::layer({f.normal[0], 0.0}, f.offset, f.coeff, f.power));
  const char* names[] = {"dissipative", "sqrt", "log"};
  return Net(2, std::min(u0.max_order(), kDefaultMaxOrder),
             [tag, u0](const Point& p, double eps, int ord) {
               if (p[1] < 0.0 && tag == SemilinearTag::dissipative_cubic) {
                 // the closed form needs 2t·u0² + 1 > 0
                 const double v = u0.value(Point{p[0], 0.0}, eps);
                 if (2.0 * p[1] * v * v + 1.0 <= 0.0)
                   throw NumericalFailure("dissipative closed form undefined", p, eps);
               }
               const Jet U = detail::lift_x(u0.jet(Point{p[0], 0.0}, eps, ord));
               const Jet T = Jet::variable(2, ord, 1, p[1]);
               switch (tag) {
                 case SemilinearTag::dissipative_cubic: return U / sqrt(2.0 * (T * U * U) + 1.0);
                 case SemilinearTag::sqrt_growth: return U * cosh(T) + sqrt(U * U + 1.0) * sinh(T);
                 case SemilinearTag::log_growth:
                   if (!(U.value() > -1.0)) throw DomainError("log growth requires initial data above -1");
                   return exp(exp(T) * log(U + 1.0)) - 1.0;
               }
               return Jet(2, ord);
             },
             std::move(s), std::move(features), std::string("semilinear:") + names[static_cast<int>(tag)])
      .with_value_rule([tag, u0](const Point& p, double eps) {
        const double U = u0.value(Point{p[0], 0.0}, eps), T = p[1];
        switch (tag) {
          case SemilinearTag::dissipative_cubic: {
            const double q = 2.0 * T * U * U + 1.0;
            if (q <= 0.0) throw NumericalFailure("dissipative closed form undefined", p, eps);
            return U / std::sqrt(q);
          }
          case SemilinearTag::sqrt_growth: return U * std::cosh(T) + std::sqrt(1.0 + U * U) * std::sinh(T);
          case SemilinearTag::log_growth:
            if (!(U > -1.0)) throw DomainError("log growth requires initial data above -1");
            return std::expm1(std::exp(T) * std::log1p(U));
        }
        return 0.0;
      });
}

inline Net semilinear_solution(const SemilinearKind& kind, const Mollifier& moll = standard_mollifier()) {
  if (kind.order < 0 || (kind.initial == SemilinearKind::Initial::delta_power && kind.order < 1))
    throw DomainError("invalid order for semilinear initial data");
  const Net u0 = kind.initial == SemilinearKind::Initial::delta_power ? delta_power_net(kind.order, moll)
                                                                     : delta_derivative_net(kind.order, moll);
  return semilinear_solution(kind.tag, u0);
}

// ---------------------------------------------------------------------------
// Truncated blow-up: ∂_t u = χ_ε(u)u², u(x,0) = H_ε(x)
// ---------------------------------------------------------------------------

struct BlowupConfig {
  double s = 1.0;
  double t_max = 2.0;
  double rel_tol = 1e-8;
  double min_step = 1e-6;  // relative to the window time scale ε^{2s}
  double initial_step = 1e-3;

  void validate() const {
    if (!(s > 0.0)) throw DomainError("cutoff exponent s must be positive");
    if (!(t_max > 1.0)) throw DomainError("t_max must exceed 1 to expose the blow-up");
    if (!(rel_tol > 0.0) || !(min_step > 0.0) || !(initial_step > 0.0))
      throw DomainError("step control parameters must be positive");
  }
};

namespace detail {

/// χ_ε(z) = 1 for |z| ≤ E, 0 for |z| ≥ E+1, and 1 − G(2(|z|−E)−1) between,
/// where G is the normalized integrated bump and E = ε^{-s}.
class Cutoff {
 public:
  Cutoff(std::shared_ptr<const CumulativeProfile> G, double kappa) : G_(std::move(G)), kappa_(kappa) {}

  double value(double z, double E) const {
    const double a = std::abs(z);
    if (a <= E) return 1.0;
    if (a >= E + 1.0) return 0.0;
    return G_->tail(kappa_ * (2.0 * (a - E) - 1.0)) / G_->total();
  }
  double derivative(double z, double E) const {
    const double a = std::abs(z);
    if (a <= E || a >= E + 1.0) return 0.0;
    const double g = G_->mollifier()(kappa_ * (2.0 * (a - E) - 1.0));
    return -(z < 0 ? -1.0 : 1.0) * 2.0 * kappa_ * g / G_->total();
  }

 private:
  std::shared_ptr<const CumulativeProfile> G_;
  double kappa_;
};

/// One trajectory (u, v = ∂u/∂u0) from u(0) = u0, extended on demand. Once u
/// approaches the cutoff window the clock restarts at a local origin, so the
/// window's time scale ε^{2s} stays resolvable next to t ≈ 1.
class Trajectory {
 public:
  Trajectory(double u0, double eps, const BlowupConfig& cfg, const Cutoff& chi)
      : eps_(eps),
        E_(std::pow(eps, -cfg.s)),
        window_step_(std::pow(eps, cfg.s) / 8.0),
        min_step_(cfg.min_step * std::pow(eps, 2.0 * cfg.s)),
        cfg_(cfg),
        chi_(chi) {
    ts_.push_back(0.0);
    us_.push_back(u0);
    vs_.push_back(1.0);
    next_h_ = cfg.initial_step;
  }

  std::size_t size() const { return ts_.size(); }

  /// (u, v) at time t.
  std::pair<double, double> at(double t, double x) {
    while (absolute(ts_.size() - 1) < t) advance(x);
    std::size_t lo = 0, hi = ts_.size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (absolute(mid) <= t ? lo : hi) = mid;
    }
    const double dt = lo >= switch_index_ ? (t - origin_) - ts_[lo] : t - ts_[lo];
    if (dt <= 0.0) return {us_[lo], vs_[lo]};
    double u = us_[lo], v = vs_[lo];
    rk4(u, v, dt);
    return {u, v};
  }

 private:
  double absolute(std::size_t i) const { return i >= switch_index_ ? origin_ + ts_[i] : ts_[i]; }

  void deriv(double u, double v, double& du, double& dv) const {
    const double c = chi_.value(u, E_);
    du = c * u * u;
    dv = (chi_.derivative(u, E_) * u * u + 2.0 * c * u) * v;
  }

  void rk4(double& u, double& v, double h) const {
    double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
    deriv(u, v, k1u, k1v);
    deriv(u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
    deriv(u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
    deriv(u + h * k3u, v + h * k3v, k4u, k4v);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }

  /// One accepted step with step-doubling error control.
  void advance(double x) {
    const double u = us_.back(), v = vs_.back();
    const bool near_window = u >= 0.5 * E_;
    if (near_window && switch_index_ == kNoSwitch) {
      switch_index_ = ts_.size() - 1;
      origin_ = ts_.back();
      ts_.back() = 0.0;
    }
    const double t = ts_.back();
    double h = next_h_;
    // the cap applies while the ramp is still being crossed
    if (near_window && chi_.value(u, E_) * u * u >= 1.0) h = std::min(h, window_step_);
    for (;;) {
      if (h < min_step_) throw NumericalFailure("blow-up integration step size underflow", Point{x, absolute(ts_.size() - 1)}, eps_);
      double ub = u, vb = v;
      rk4(ub, vb, h);
      double us = u, vs = v;
      rk4(us, vs, 0.5 * h);
      rk4(us, vs, 0.5 * h);
      if (!std::isfinite(us) || !std::isfinite(vs)) {
        h *= 0.25;
        continue;
      }
      const double err = std::max(std::abs(us - ub) / (1.0 + std::abs(us)), std::abs(vs - vb) / (1.0 + std::abs(vs)));
      if (err <= cfg_.rel_tol) {
        ts_.push_back(t + h);
        // Richardson-corrected small-step value
        us_.push_back(us + (us - ub) / 15.0);
        vs_.push_back(vs + (vs - vb) / 15.0);
        const double grow = err > 0.0 ? 0.9 * std::pow(cfg_.rel_tol / err, 0.2) : 2.0;
        next_h_ = h * std::clamp(grow, 0.2, 2.0);
        return;
      }
      h *= std::clamp(0.9 * std::pow(cfg_.rel_tol / err, 0.2), 0.1, 0.5);
    }
  }

  static constexpr std::size_t kNoSwitch = std::numeric_limits<std::size_t>::max();

  double eps_, E_, window_step_, min_step_;
  BlowupConfig cfg_;
  Cutoff chi_;
  std::vector<double> ts_, us_, vs_;
  std::size_t switch_index_ = kNoSwitch;
  double origin_ = 0.0;
  double next_h_ = 1e-3;
};

/// Compute-once trajectory store keyed by (u0, ε), safe for concurrent use.
class TrajectoryCache {
 public:
  TrajectoryCache(const BlowupConfig& cfg, Cutoff chi) : cfg_(cfg), chi_(std::move(chi)) {}

  std::pair<double, double> query(double u0, double eps, double t, double x) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(u0, eps);
    auto it = store_.find(key);
    if (it == store_.end()) {
      if (stored_points_ > kMaxStoredPoints) {
        store_.clear();
        stored_points_ = 0;
      }
      it = store_.emplace(key, Trajectory(u0, eps, cfg_, chi_)).first;
    }
    const std::size_t before = it->second.size();
    auto r = it->second.at(t, x);
    stored_points_ += it->second.size() - before;
    return r;
  }

  double rhs(double u, double eps) const { return chi_.value(u, std::pow(eps, -cfg_.s)) * u * u; }

 private:
  static constexpr std::size_t kMaxStoredPoints = 4'000'000;
  BlowupConfig cfg_;
  Cutoff chi_;
  std::mutex mutex_;
  std::map<std::pair<double, double>, Trajectory> store_;
  std::size_t stored_points_ = 0;
};

}  // namespace detail

/// Net of the truncated blow-up problem, integrated by adaptive RK4. The
/// x-derivative comes from the sensitivity v = ∂u/∂u0 via ∂_x u = v·φ_ε(x);
/// derivatives are available to first order.
inline Net blowup_truncated(const BlowupConfig& cfg, const Mollifier& moll = standard_mollifier()) {
  cfg.validate();
  if (moll.dim() != 1) throw DimensionMismatch("blow-up data use a one-dimensional mollifier");
  auto H = std::make_shared<const CumulativeProfile>(moll, 1);
  auto cache = std::make_shared<detail::TrajectoryCache>(cfg, detail::Cutoff(H, moll.kappa()));
  const double kappa = moll.kappa();
  Support s;
  s.vanishes = [kappa](const Box& K, double eps) { return K.upper(0) < -kappa * eps; };
  return Net(2, 1,
             [H, cache, moll](const Point& p, double eps, int ord) {
               if (p[1] < 0.0) throw DomainError("blow-up net is defined for t >= 0");
               const double inv = 1.0 / eps;
               const double u0 = H->value(p[0] * inv) / H->total();
               Jet out(2, ord);
               if (u0 == 0.0) return out;
               const auto [u, v] = cache->query(u0, eps, p[1], p[0]);
               if (!std::isfinite(u)) throw NumericalFailure("non-finite blow-up solution", p, eps);
               out[0] = u;
               if (ord >= 1) {
                 out[1] = v * inv * moll(p[0] * inv) / H->total();
                 out[2] = cache->rhs(u, eps);
               }
               return out;
             },
             std::move(s),
             {Feature::layer({1.0, 0.0}, 0.0, kappa), Feature::layer({0.0, 1.0}, 1.0, 1.0, cfg.s)}, "blowup");
}

// ---------------------------------------------------------------------------
// Rauch–Reed interaction term
// ---------------------------------------------------------------------------

/// w_ε(x,t) = ∫_0^t φ_ε^m(x+1−s) φ_ε^n(x−1+s) ds. The s-integral runs over the
/// support overlap; ∂_t^b w (b ≥ 1) comes from the integrand at s = t.
inline Net rauch_reed_w(int m, int n, const Mollifier& moll = standard_mollifier()) {
  if (m < 1 || n < 1) throw DomainError("Rauch-Reed powers must be at least 1");
  if (moll.dim() != 1) throw DimensionMismatch("Rauch-Reed uses a one-dimensional mollifier");
  const double kappa = moll.kappa();
  Support s;
  s.box = Box(2, Point{-kappa, 1.0 - kappa}, Point{kappa, std::numeric_limits<double>::max()});
  s.vanishes = [kappa](const Box& K, double eps) {
    const double w = kappa * eps;
    return K.upper(0) < -w || K.lower(0) > w || K.upper(1) < 1.0 - w;
  };
  return Net(2, std::min(kDefaultMaxOrder, moll.max_order() - 1),
             [m, n, moll, kappa](const Point& p, double eps, int ord) {
               const double inv = 1.0 / eps;
               const double scale = std::pow(eps, -static_cast<double>(m + n));
               const double x = p[0], t = p[1];
               Jet out(2, ord);
               const double w = kappa * eps;
               const double lo = std::max(0.0, 1.0 + std::abs(x) - w), hi = std::min(t, 1.0 - std::abs(x) + w);
               if (hi > lo) {
                 const GaussRule& rule = gauss_legendre(32);
                 const double mid_s = 0.5 * (lo + hi);
                 for (int panel = 0; panel < 2; ++panel) {
                   const double a = panel == 0 ? lo : mid_s, b = panel == 0 ? mid_s : hi;
                   const double half = 0.5 * (b - a), mid = a + half;
                   for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                     const double sv = mid + half * rule.nodes[i];
                     const Jet X = Jet::variable(1, ord, 0, x);
                     const Jet h = ipow(moll.apply((X + (1.0 - sv)) * inv), m) * ipow(moll.apply((X + (sv - 1.0)) * inv), n);
                     for (int a2 = 0; a2 <= ord; ++a2)
                       out[Jet::index(2, MultiIndex(2, {a2, 0}))] += rule.weights[i] * half * scale * h[a2];
                   }
                 }
               }
               if (ord >= 1) {
                 const Jet X = Jet::variable(2, ord - 1, 0, x), T = Jet::variable(2, ord - 1, 1, t);
                 const Jet h = scale * (ipow(moll.apply((X - T + 1.0) * inv), m) * ipow(moll.apply((X + T - 1.0) * inv), n));
                 for (int k = 0; k <= ord - 1; ++k)
                   for (int b = 0; b <= k; ++b) {
                     const int a2 = k - b;
                     out[Jet::index(2, MultiIndex(2, {a2, b + 1}))] =
                         h[Jet::index(2, MultiIndex(2, {a2, b}))] / (b + 1);
                   }
               }
               return out;
             },
             std::move(s), {Feature::layer({1.0, 0.0}, 0.0, kappa), Feature::layer({0.0, 1.0}, 1.0, kappa)},
             "rauch_reed");
}

// ---------------------------------------------------------------------------
// Strength of singularities
// ---------------------------------------------------------------------------

/// −round(R) for a C^1 fiber; std::nullopt means no singularity (empty fiber).
inline std::optional<int> strength_from_fiber(const SigmaFiber& fiber) {
  if (fiber.endpoint == Endpoint::empty) return std::nullopt;
  if (!std::isfinite(fiber.R)) throw DomainError("fiber has no finite endpoint");
  const double r = std::round(fiber.R);
  if (fiber.endpoint == Endpoint::inconclusive && std::abs(fiber.R - r) > 0.25)
    throw DomainError("inconclusive fiber endpoint too far from an integer");
  return -static_cast<int>(r);
}

}  // namespace gfspec
