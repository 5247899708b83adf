#pragma once

// Order fitting against ε, valuations, point fibers of the singular spectrum,
// singular supports and the G^∞ / slow-scale classifiers.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gfspec/core.hpp"
#include "gfspec/net.hpp"
#include "gfspec/seminorms.hpp"

namespace gfspec {

inline constexpr double kFitTol = 0.05;
inline constexpr double kZeroSlope = -1e9;

// ---------------------------------------------------------------------------
// ε schedules
// ---------------------------------------------------------------------------

struct EpsilonSchedule {
  double eps_max = 0.1;
  double rho = 0.6;
  int n = 24;

  void validate() const {
    if (!(eps_max > 0.0 && eps_max <= 1.0)) throw DomainError("eps_max must lie in (0,1]");
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("schedule ratio must lie in (0,1)");
    if (n < 8) throw DomainError("schedule needs at least 8 samples");
    if (!(eps_max * std::pow(rho, n - 1) > 1e-12)) throw DomainError("smallest epsilon must exceed 1e-12");
  }

  std::vector<double> values() const {
    validate();
    std::vector<double> v(static_cast<std::size_t>(n));
    double e = eps_max;
    for (int k = 0; k < n; ++k) {
      v[static_cast<std::size_t>(k)] = e;
      e *= rho;
    }
    return v;
  }

  /// FNV-1a over the bit patterns of the schedule.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (double e : values()) {
      const auto bits = std::bit_cast<std::uint64_t>(e);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffU;
        h *= 1099511628211ULL;
      }
    }
    return h;
  }
};

// ---------------------------------------------------------------------------
// Order fits
// ---------------------------------------------------------------------------

enum class Convergence { converges_to_zero, converges_nonzero, diverges, inconclusive };

inline std::string to_string(Convergence c) {
  switch (c) {
    case Convergence::converges_to_zero: return "converges_to_zero";
    case Convergence::converges_nonzero: return "converges_nonzero";
    case Convergence::diverges: return "diverges";
    case Convergence::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct OrderFit {
  double slope = 0.0;  // d log value / d log(1/ε) over the tail half
  double intercept = 0.0;
  double residual = 0.0;
  Convergence classification = Convergence::inconclusive;
  std::optional<double> tail_limit;
  // power-law exponent after separating a |ln ε|^β factor, when one is detected
  double power_slope = 0.0;
  double log_exponent = 0.0;
};

namespace detail {

struct LineFit {
  double slope = 0.0, intercept = 0.0, residual = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i)
    f.residual = std::max(f.residual, std::abs(y[i] - f.intercept - f.slope * x[i]));
  return f;
}

/// y ≈ c + s·L + β·log L, solved on centered data.
inline void log_augmented_fit(const std::vector<double>& L, const std::vector<double>& y, double& s, double& beta,
                              double& residual) {
  const std::size_t n = L.size();
  std::vector<double> g(n);
  double mL = 0.0, mg = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::log(L[i]);
    mL += L[i];
    mg += g[i];
    my += y[i];
  }
  mL /= static_cast<double>(n);
  mg /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = L[i] - mL, v = g[i] - mg, w = y[i] - my;
    a11 += u * u;
    a12 += u * v;
    a22 += v * v;
    b1 += u * w;
    b2 += v * w;
  }
  const double det = a11 * a22 - a12 * a12;
  if (!(std::abs(det) > 1e-300)) {
    s = a11 > 0 ? b1 / a11 : 0.0;
    beta = 0.0;
  } else {
    s = (b1 * a22 - b2 * a12) / det;
    beta = (a11 * b2 - a12 * b1) / det;
  }
  residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = my + s * (L[i] - mL) + beta * (g[i] - mg);
    residual = std::max(residual, std::abs(y[i] - pred));
  }
}

}  // namespace detail

/// Least-squares slope of log(value) against log(1/ε) over the tail half of
/// the samples, with the convergence classification described in the README.
inline OrderFit fit_order(const std::vector<double>& eps, const std::vector<double>& values, double tol = kFitTol) {
  if (eps.size() != values.size()) throw FitError("epsilon and value sample counts differ");
  if (eps.size() < 8) throw FitError("order fit needs at least 8 samples");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!std::isfinite(values[i]) || !std::isfinite(eps[i])) throw FitError("non-finite sample in order fit");
    if (values[i] < 0.0) throw FitError("order fit expects non-negative values");
    if (!(eps[i] > 0.0)) throw FitError("epsilon samples must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw FitError("epsilon samples must be strictly decreasing");
  }
  const std::size_t start = eps.size() / 2;
  OrderFit fit;
  if (values.back() == 0.0) {
    fit.slope = fit.power_slope = kZeroSlope;
    fit.classification = Convergence::converges_to_zero;
    fit.tail_limit = 0.0;
    return fit;
  }
  std::vector<double> L, Y, tail;
  for (std::size_t i = start; i < eps.size(); ++i) {
    if (values[i] <= 0.0) continue;
    L.push_back(-std::log(eps[i]));
    Y.push_back(std::log(values[i]));
    tail.push_back(values[i]);
  }
  if (L.size() < 4) throw FitError("too few nonzero samples in the tail");
  const auto line = detail::least_squares(L, Y);
  fit.slope = line.slope;
  fit.intercept = line.intercept;
  fit.residual = line.residual;
  fit.power_slope = line.slope;

  const bool positive_L = std::all_of(L.begin(), L.end(), [](double v) { return v > 0.0; });
  if (positive_L && line.residual > 1e-3) {
    double s = 0.0, beta = 0.0, res = 0.0;
    detail::log_augmented_fit(L, Y, s, beta, res);
    if (res < 0.1 * line.residual) {
      fit.power_slope = s;
      fit.log_exponent = beta;
    }
  }

  bool cauchy = true, increasing = true;
  for (std::size_t i = 1; i < tail.size(); ++i) {
    if (std::abs(tail[i] - tail[i - 1]) >= 1e-3 * std::abs(tail[i - 1])) cauchy = false;
    if (!(tail[i] > tail[i - 1])) increasing = false;
  }
  if (fit.slope <= -tol) {
    fit.classification = Convergence::converges_to_zero;
    fit.tail_limit = 0.0;
  } else if (fit.slope >= tol) {
    fit.classification = Convergence::diverges;
  } else if (cauchy) {
    fit.classification = Convergence::converges_nonzero;
    fit.tail_limit = tail.back();
  } else if (increasing) {
    fit.classification = Convergence::diverges;
  } else {
    fit.classification = Convergence::inconclusive;
  }
  return fit;
}

inline OrderFit valuation_fit(const Net& net, const CompactRegion& K, int l, const EpsilonSchedule& sched) {
  const auto eps = sched.values();
  std::vector<double> v;
  v.reserve(eps.size());
  for (double e : eps) v.push_back(cp_seminorm(net, K, l, e));
  return fit_order(eps, v);
}

/// v_{K,l}(u): the fitted growth order of p_{K,l}(u_ε).
inline double valuation(const Net& net, const CompactRegion& K, int l, const EpsilonSchedule& sched) {
  return valuation_fit(net, K, l, sched).slope;
}

/// ν_{K,l}(u) = max(v_{K,l}(u), 0).
inline double clamped_valuation(const Net& net, const CompactRegion& K, int l, const EpsilonSchedule& sched) {
  return std::max(0.0, valuation(net, K, l, sched));
}

// ---------------------------------------------------------------------------
// Fibers
// ---------------------------------------------------------------------------

struct Target {
  enum class Kind { cp, dprime };
  Kind kind = Kind::cp;
  int p = 0;

  static Target cp_order(int p) { return {Kind::cp, p}; }
  static Target dprime() { return {Kind::dprime, 0}; }
  std::string name() const { return kind == Kind::dprime ? "Dprime" : "C" + std::to_string(p); }
};

enum class Endpoint { empty, closed_at_R, open_at_R, all_of_Rplus, inconclusive };

inline std::string to_string(Endpoint e) {
  switch (e) {
    case Endpoint::empty: return "empty";
    case Endpoint::closed_at_R: return "closed_at_R";
    case Endpoint::open_at_R: return "open_at_R";
    case Endpoint::all_of_Rplus: return "all_of_Rplus";
    case Endpoint::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

/// Σ_x summarized by R_x = inf N_x and whether N_x contains R_x. The endpoint
/// flag describes N_x: closed_at_R means ε^R·u_ε converges (N_x = [R,∞),
/// fiber [0,R)), open_at_R means it does not (N_x = (R,∞), fiber [0,R]).
struct SigmaFiber {
  double R = 0.0;
  Endpoint endpoint = Endpoint::empty;
  std::vector<std::pair<int, double>> per_order_slopes;
  Convergence classification = Convergence::converges_to_zero;
  double residual = 0.0;
  double log_exponent = 0.0;
  double shape_defect = 0.0;
  double radius = 0.0;

  bool nonempty() const { return endpoint != Endpoint::empty; }
};

struct FiberOptions {
  int base_points = 9;
  double quad_tol = 1e-5;
  bool refine = true;
  double tol = kFitTol;
  int shape_pairs = 5;
};

enum class Verdict { converges, diverges, inconclusive };

namespace detail {

struct Measurement {
  std::vector<double> eps;
  std::vector<std::vector<double>> data;  // cumulative seminorms or pairings, per ε
  std::vector<double> magnitude;
  bool all_vanish = true;
  bool finite = true;
};

inline Box neighborhood(int dim, const Point& x, const Point& radius) { return Box::around(dim, x, radius); }

class FiberProbe {
 public:
  FiberProbe(const Net& net, const Box& K, const Target& target, const std::vector<double>& eps,
             const FiberOptions& opt)
      : net_(net), K_(K), target_(target), eps_(eps), opt_(opt), region_(K, opt.base_points) {
    if (target.kind == Target::Kind::dprime) dict_ = make_test_dictionary(region_);
    if (target.kind == Target::Kind::cp && target.p > net.max_order())
      throw OrderExceeded("target order exceeds the net's derivative order");
    if (net.dim() != K.dim) throw DimensionMismatch("net and neighborhood dimensions differ");
  }

  Measurement measure() const {
    Measurement m;
    m.eps = eps_;
    for (double e : eps_) {
      std::vector<double> row;
      const bool vanish = net_.support().vanishes_on(K_, e);
      if (target_.kind == Target::Kind::cp) {
        row = vanish ? std::vector<double>(static_cast<std::size_t>(target_.p + 1), 0.0)
                     : cp_seminorms(net_, region_, target_.p, e);
      } else {
        QuadratureOptions q;
        q.rel_tol = opt_.quad_tol;
        row = vanish ? std::vector<double>(dict_.size(), 0.0) : dprime_pairings(net_, dict_, e, q);
      }
      double mag = 0.0;
      for (double v : row) {
        if (!std::isfinite(v)) m.finite = false;
        mag = std::max(mag, std::abs(v));
      }
      if (mag != 0.0) m.all_vanish = false;
      m.magnitude.push_back(mag);
      m.data.push_back(std::move(row));
    }
    return m;
  }

  /// max over the union of both sample sets (or over the probe vector) of the
  /// difference between the normalized shapes u/S at ε_a and ε_b.
  double shape_defect(const Measurement& m, std::size_t a, std::size_t b) const {
    const double Sa = m.magnitude[a], Sb = m.magnitude[b];
    if (Sa == 0.0 && Sb == 0.0) return 0.0;
    if (Sa == 0.0 || Sb == 0.0) return 1.0;
    double D = 0.0;
    if (target_.kind == Target::Kind::dprime) {
      for (std::size_t j = 0; j < m.data[a].size(); ++j)
        D = std::max(D, std::abs(m.data[a][j] / Sa - m.data[b][j] / Sb));
      return D;
    }
    std::vector<Point> pts = sample_points(net_, region_, m.eps[a]);
    for (const auto& f : net_.features()) feature_samples_into(f, m.eps[b], pts);
    const auto alphas = multi_indices_up_to(net_.dim(), target_.p);
    for (const auto& x : pts) {
      const Jet ja = net_.jet(x, m.eps[a], target_.p);
      const Jet jb = net_.jet(x, m.eps[b], target_.p);
      for (const auto& al : alphas) D = std::max(D, std::abs(ja.derivative(al) / Sa - jb.derivative(al) / Sb));
    }
    return D;
  }

  std::vector<double> shape_defects(const Measurement& m) const {
    std::vector<double> Ds;
    const std::size_t n = m.eps.size();
    const std::size_t pairs = std::min<std::size_t>(static_cast<std::size_t>(opt_.shape_pairs), n - 1);
    for (std::size_t k = n - 1 - pairs; k + 1 < n; ++k) Ds.push_back(shape_defect(m, k, k + 1));
    return Ds;
  }

  const Target& target() const { return target_; }

 private:
  void feature_samples_into(const Feature& f, double eps, std::vector<Point>& pts) const {
    detail::feature_samples(f, K_, eps, 9, pts);
  }

  Net net_;
  Box K_;
  Target target_;
  std::vector<double> eps_;
  FiberOptions opt_;
  CompactRegion region_;
  TestDictionary dict_;
};

inline Verdict shape_verdict(const std::vector<double>& Ds) {
  if (Ds.empty()) return Verdict::inconclusive;
  const double Dmax = *std::max_element(Ds.begin(), Ds.end());
  if (Dmax < 0.02) return Verdict::converges;
  if (Ds.back() > 0.1) return Verdict::diverges;
  bool geometric = true;
  for (std::size_t i = 1; i < Ds.size(); ++i)
    if (!(Ds[i] <= 0.8 * Ds[i - 1])) geometric = false;
  return geometric ? Verdict::converges : Verdict::inconclusive;
}

/// Everything about one neighborhood: growth order R, the endpoint probe at R
/// and the convergence of the unscaled net.
inline SigmaFiber fiber_on(const Net& net, const Box& K, const Target& target, const std::vector<double>& eps,
                           const FiberOptions& opt) {
  SigmaFiber fib;
  fib.radius = K.half_width(0);
  bool vanish_everywhere = true;
  for (double e : eps) vanish_everywhere = vanish_everywhere && net.support().vanishes_on(K, e);
  const int orders = target.kind == Target::Kind::cp ? target.p + 1 : 0;
  if (vanish_everywhere) {
    fib.endpoint = Endpoint::empty;
    fib.classification = Convergence::converges_to_zero;
    const std::size_t count = target.kind == Target::Kind::cp
                                  ? static_cast<std::size_t>(orders)
                                  : make_test_dictionary(CompactRegion(K, opt.base_points)).size();
    for (std::size_t l = 0; l < count; ++l) fib.per_order_slopes.push_back({static_cast<int>(l), kZeroSlope});
    return fib;
  }

  FiberProbe probe(net, K, target, eps, opt);
  const Measurement m = probe.measure();
  if (!m.finite) {
    fib.R = std::numeric_limits<double>::infinity();
    fib.endpoint = Endpoint::all_of_Rplus;
    fib.classification = Convergence::diverges;
    return fib;
  }
  if (m.all_vanish) {
    fib.endpoint = Endpoint::empty;
    fib.classification = Convergence::converges_to_zero;
    const std::size_t count = m.data.front().size();
    for (std::size_t l = 0; l < count; ++l) fib.per_order_slopes.push_back({static_cast<int>(l), kZeroSlope});
    return fib;
  }

  const std::size_t comps = m.data.front().size();
  for (std::size_t j = 0; j < comps; ++j) {
    std::vector<double> series;
    for (const auto& row : m.data) series.push_back(std::abs(row[j]));
    fib.per_order_slopes.push_back({static_cast<int>(j), fit_order(eps, series, opt.tol).slope});
  }
  const OrderFit top = fit_order(eps, m.magnitude, opt.tol);
  fib.classification = top.classification;
  fib.residual = top.residual;
  fib.log_exponent = top.log_exponent;

  // growth that keeps accelerating is not a power law
  {
    const std::size_t half = eps.size() / 2;
    std::vector<double> he(eps.begin(), eps.begin() + static_cast<long>(half) + 1);
    std::vector<double> hv(m.magnitude.begin(), m.magnitude.begin() + static_cast<long>(half) + 1);
    if (he.size() >= 8 && std::all_of(hv.begin(), hv.end(), [](double v) { return v > 0.0; })) {
      std::vector<double> L, Y;
      for (std::size_t i = 0; i < he.size(); ++i) {
        L.push_back(-std::log(he[i]));
        Y.push_back(std::log(hv[i]));
      }
      const double head = detail::least_squares(L, Y).slope;
      if (top.power_slope > 2.0 && top.power_slope > head + 1.5) {
        fib.R = std::numeric_limits<double>::infinity();
        fib.endpoint = Endpoint::all_of_Rplus;
        return fib;
      }
    }
  }

  double R = top.power_slope;
  if (R < opt.tol) R = 0.0;
  fib.R = R;

  Verdict v = Verdict::inconclusive;
  if (R > 0.0) {
    if (top.log_exponent < -0.5) v = Verdict::converges;
    else if (top.log_exponent > 0.5) v = Verdict::diverges;
  } else {
    if (top.classification == Convergence::converges_to_zero) v = Verdict::converges;
    else if (top.classification == Convergence::diverges) v = Verdict::diverges;
  }
  if (v == Verdict::inconclusive) {
    const auto Ds = probe.shape_defects(m);
    fib.shape_defect = Ds.empty() ? 0.0 : Ds.back();
    v = shape_verdict(Ds);
  }

  if (R == 0.0) {
    fib.endpoint = v == Verdict::converges   ? Endpoint::empty
                   : v == Verdict::diverges ? Endpoint::open_at_R
                                            : Endpoint::inconclusive;
  } else {
    fib.endpoint = v == Verdict::converges   ? Endpoint::closed_at_R
                   : v == Verdict::diverges ? Endpoint::open_at_R
                                            : Endpoint::inconclusive;
  }
  return fib;
}

}  // namespace detail

/// Σ_x for the neighborhood box of half-width `radius` around x. When the
/// fiber is nonempty the computation is repeated on half the radius and the
/// smaller neighborhood's verdict is kept.
inline SigmaFiber sigma_fiber(const Net& net, const Point& x, const Target& target, const EpsilonSchedule& sched,
                              const Point& radius, const FiberOptions& opt = {}) {
  for (int i = 0; i < net.dim(); ++i) {
    const double r = radius[static_cast<std::size_t>(i)];
    if (!(r > 0.0)) throw DomainError("neighborhood radius must be positive");
    if (r < 1e-9 * (1.0 + std::abs(x[static_cast<std::size_t>(i)])))
      throw DomainError("neighborhood radius too small to resolve");
  }
  const auto eps = sched.values();
  SigmaFiber fib = detail::fiber_on(net, detail::neighborhood(net.dim(), x, radius), target, eps, opt);
  if (opt.refine && fib.nonempty()) {
    const Point half{0.5 * radius[0], 0.5 * radius[1]};
    fib = detail::fiber_on(net, detail::neighborhood(net.dim(), x, half), target, eps, opt);
  }
  return fib;
}

inline SigmaFiber sigma_fiber(const Net& net, const Point& x, const Target& target, const EpsilonSchedule& sched,
                              double radius, const FiberOptions& opt = {}) {
  return sigma_fiber(net, x, target, sched, Point{radius, radius}, opt);
}

// ---------------------------------------------------------------------------
// Parallel map over grid points
// ---------------------------------------------------------------------------

/// Worker count: GFSPEC_WORKERS if set, otherwise the hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GFSPEC_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
  }
  return hw;
}

/// Calls fn(i) for i in [0, n); results must be written to slot i so the
/// gather order never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Singular supports and spectra
// ---------------------------------------------------------------------------

inline Point neighborhood_radius(const CompactRegion& region) {
  Point r{};
  for (int i = 0; i < region.dim(); ++i) r[static_cast<std::size_t>(i)] = 2.0 * region.spacing(i);
  return r;
}

struct SupportSet {
  std::vector<std::size_t> indices;  // into region.grid()
  std::vector<Point> points;
  bool nested_checked = false;
  bool nested_ok = true;  // S^{C^{p-1}} ⊂ S^{C^p}
};

namespace detail {

/// Is u_ε convergent in F on the neighborhood (no rescaling)?
inline bool singular_at(const Net& net, const Box& K, const Target& target, const std::vector<double>& eps,
                        const FiberOptions& opt) {
  bool vanish = true;
  for (double e : eps) vanish = vanish && net.support().vanishes_on(K, e);
  if (vanish) return false;
  FiberProbe probe(net, K, target, eps, opt);
  const Measurement m = probe.measure();
  if (!m.finite) return true;
  if (m.all_vanish) return false;
  const OrderFit fit = fit_order(eps, m.magnitude, opt.tol);
  if (fit.classification == Convergence::converges_to_zero) return false;
  if (fit.power_slope >= opt.tol || fit.classification == Convergence::diverges) return true;
  return shape_verdict(probe.shape_defects(m)) != Verdict::converges;
}

inline SupportSet support_scan(const Net& net, const CompactRegion& region, const Target& target,
                               const EpsilonSchedule& sched, const FiberOptions& opt) {
  const auto grid = region.grid();
  const auto eps = sched.values();
  const Point r = neighborhood_radius(region);
  std::vector<char> flag(grid.size(), 0);
  parallel_for(grid.size(), [&](std::size_t i) {
    bool s = singular_at(net, neighborhood(net.dim(), grid[i], r), target, eps, opt);
    if (s && opt.refine) {
      const Point half{0.5 * r[0], 0.5 * r[1]};
      s = singular_at(net, neighborhood(net.dim(), grid[i], half), target, eps, opt);
    }
    flag[i] = s ? 1 : 0;
  });
  SupportSet out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (flag[i]) {
      out.indices.push_back(i);
      out.points.push_back(grid[i]);
    }
  return out;
}

}  // namespace detail

/// Grid points with no neighborhood on which u converges in F.
inline SupportSet singular_support(const Net& net, const CompactRegion& region, const Target& target,
                                   const EpsilonSchedule& sched, const FiberOptions& opt = {}) {
  SupportSet s = detail::support_scan(net, region, target, sched, opt);
  if (target.kind == Target::Kind::cp && target.p > 0) {
    const SupportSet lower = detail::support_scan(net, region, Target::cp_order(target.p - 1), sched, opt);
    s.nested_checked = true;
    s.nested_ok = std::includes(s.indices.begin(), s.indices.end(), lower.indices.begin(), lower.indices.end());
  }
  return s;
}

struct Spectrum {
  Target target;
  std::string scale_id = "power";
  CompactRegion region;
  std::vector<Point> points;
  std::vector<SigmaFiber> fibers;

  /// Grid indices of nonempty fibers (the projection onto x-space).
  std::vector<std::size_t> projection() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fibers.size(); ++i)
      if (fibers[i].nonempty()) out.push_back(i);
    return out;
  }
  double max_R() const {
    double r = 0.0;
    for (const auto& f : fibers)
      if (f.nonempty()) r = std::max(r, f.R);
    return r;
  }
};

inline Spectrum singular_spectrum(const Net& net, const CompactRegion& region, const Target& target,
                                  const EpsilonSchedule& sched, const FiberOptions& opt = {},
                                  const ScaleMap& scale = ScaleMap::power()) {
  if (net.dim() != region.dim()) throw DimensionMismatch("region and net dimensions differ");
  Spectrum sp;
  sp.target = target;
  sp.scale_id = scale.id;
  sp.region = region;
  sp.points = region.grid();
  sp.fibers.resize(sp.points.size());
  const Point r = neighborhood_radius(region);
  parallel_for(sp.points.size(),
               [&](std::size_t i) { sp.fibers[i] = sigma_fiber(net, sp.points[i], target, sched, r, opt); });
  return sp;
}

// ---------------------------------------------------------------------------
// Regularity classifiers
// ---------------------------------------------------------------------------

enum class Regularity { g_infinity_with_m, total_slow_scale, neither };

inline std::string to_string(Regularity r) {
  switch (r) {
    case Regularity::g_infinity_with_m: return "g_infinity_with_m";
    case Regularity::total_slow_scale: return "total_slow_scale";
    case Regularity::neither: return "neither";
  }
  return "neither";
}

struct RegularityResult {
  Regularity kind = Regularity::neither;
  int m = 0;
  std::vector<double> slopes;  // σ_l, l = 0..L_max
};

/// C^∞ approximated by orders 0..L_max.
inline RegularityResult classify_regularity(const Net& net, const CompactRegion& K, const EpsilonSchedule& sched,
                                            int L_max = 4, double tol = kFitTol) {
  if (L_max < 2) throw DomainError("regularity classification needs L_max >= 2");
  if (L_max > net.max_order()) throw OrderExceeded("L_max exceeds the net's derivative order");
  const auto eps = sched.values();
  std::vector<std::vector<double>> series(static_cast<std::size_t>(L_max + 1));
  for (double e : eps) {
    const auto p = cp_seminorms(net, K, L_max, e);
    for (int l = 0; l <= L_max; ++l) series[static_cast<std::size_t>(l)].push_back(p[static_cast<std::size_t>(l)]);
  }
  RegularityResult res;
  for (const auto& s : series) {
    const OrderFit f = fit_order(eps, s, tol);
    res.slopes.push_back(f.power_slope);
  }
  const double top = res.slopes.back(), below = res.slopes[static_cast<std::size_t>(L_max - 2)];
  const double sup = *std::max_element(res.slopes.begin(), res.slopes.end());
  if (top - below > 0.5) {
    res.kind = Regularity::neither;
  } else if (sup <= tol) {
    res.kind = Regularity::total_slow_scale;
  } else {
    res.kind = Regularity::g_infinity_with_m;
    res.m = static_cast<int>(std::ceil(sup - tol));
  }
  return res;
}

}  // namespace gfspec
