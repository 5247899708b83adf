// Acceptance run: one PASS/FAIL line per criterion, followed by the measured
// values it was judged on. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gfspec/gfspec.hpp"
#include "support.hpp"

using namespace gfspec;

namespace {

struct Log {
  bool ok = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    if (!cond) ok = false;
    detail << "    " << (cond ? "ok   " : "FAIL ") << what << "\n";
  }
};

std::string fmt(double v, int prec = 3) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string sci(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

std::string describe(const SigmaFiber& f) {
  if (!f.nonempty()) return "empty";
  return "R=" + fmt(f.R) + " " + to_string(f.endpoint);
}

std::string at(const Point& p, int dim) {
  return dim == 1 ? "x=" + fmt(p[0], 2) : "(x,t)=(" + fmt(p[0], 2) + "," + fmt(p[1], 2) + ")";
}

const EpsilonSchedule kSched{};
constexpr double kRadius = 0.05;

// singular support and spectrum projection agree
void check_projection(Log& log, const Net& net, const CompactRegion& K, const Target& t, const Spectrum& sp,
                      const std::string& name) {
  const SupportSet s = singular_support(net, K, t, kSched);
  log.check(s.indices == sp.projection(), "projection property for " + name + " (" +
                                              std::to_string(s.indices.size()) + " singular points)");
}

void criterion1(Log& log) {
  const CompactRegion K = CompactRegion::interval(-1.0, 1.0, 41);
  for (int m = 1; m <= 3; ++m)
    for (int k = 0; k <= 2; ++k) {
      const Net u = delta_power_net(m);
      const Spectrum sp = singular_spectrum(u, K, Target::cp_order(k), kSched);
      for (std::size_t i = 0; i < sp.points.size(); ++i) {
        const double x = sp.points[i][0];
        const SigmaFiber& f = sp.fibers[i];
        if (x == 0.0)
          log.check(f.nonempty() && std::abs(f.R - (m + k)) <= 0.15,
                    "delta^" + std::to_string(m) + " C" + std::to_string(k) + " at 0: " + describe(f) +
                        " (expect " + std::to_string(m + k) + ")");
        if (std::abs(x) >= 0.25 && f.nonempty())
          log.check(false, "delta^" + std::to_string(m) + " C" + std::to_string(k) + " nonempty at " + at(sp.points[i], 1));
      }
      if (k == 0) check_projection(log, u, K, Target::cp_order(k), sp, "delta^" + std::to_string(m) + " C0");
    }
  log.check(log.ok, "all fibers with |x| >= 0.25 empty");
}

void criterion2(Log& log) {
  const CompactRegion K = CompactRegion::interval(-1.0, 1.0, 21);
  const Spectrum s1 = singular_spectrum(delta_net(), K, Target::dprime(), kSched);
  log.check(s1.projection().empty(), "delta D' spectrum empty on [-1,1] (" +
                                         std::to_string(s1.projection().size()) + " nonempty fibers)");
  for (int m = 2; m <= 3; ++m) {
    const SigmaFiber f = sigma_fiber(delta_power_net(m), Point{}, Target::dprime(), kSched, kRadius);
    log.check(f.nonempty() && std::abs(f.R - (m - 1)) <= 0.15,
              "delta^" + std::to_string(m) + " D' at 0: R=" + fmt(f.R) + " (expect " + std::to_string(m - 1) + ")");
    log.check(f.endpoint == Endpoint::open_at_R,
              "delta^" + std::to_string(m) + " D' endpoint " + to_string(f.endpoint) + " (expect open_at_R)");
  }
}

void criterion3(Log& log) {
  const CompactRegion K = CompactRegion::interval(-1.0, 1.0, 41);
  const Net u = oscillatory_net();
  const SupportSet c0 = singular_support(u, K, Target::cp_order(0), kSched);
  log.check(c0.indices.empty(), "C0 singular support empty (" + std::to_string(c0.indices.size()) + " points)");
  const Spectrum sp = singular_spectrum(u, K, Target::cp_order(1), kSched);
  std::size_t good = 0;
  for (const auto& f : sp.fibers)
    if (f.nonempty() && f.R == 0.0 && f.endpoint == Endpoint::open_at_R) ++good;
  log.check(good == sp.points.size(), "C1 fibers with R=0 open_at_R: " + std::to_string(good) + " of " +
                                          std::to_string(sp.points.size()));
  check_projection(log, u, K, Target::cp_order(1), sp, "oscillation C1");
}

void criterion4(Log& log) {
  const SmoothFunction one = SmoothFunction::constant(1, 1.0);
  const SigmaFiber u = sigma_fiber(eps_power_log_net(one, 1.0, 0.0), Point{}, Target::cp_order(0), kSched, kRadius);
  const SigmaFiber v = sigma_fiber(eps_power_log_net(one, 1.0, 1.0), Point{}, Target::cp_order(0), kSched, kRadius);
  log.check(std::abs(u.R - 1.0) <= 0.1 && u.endpoint == Endpoint::closed_at_R,
            "eps^-1: " + describe(u) + " (expect R=1 closed_at_R)");
  log.check(std::abs(v.R - 1.0) <= 0.1 && v.endpoint == Endpoint::open_at_R,
            "eps^-1 |ln eps|: " + describe(v) + " (expect R=1 open_at_R)");
}

CompactRegion wave_region() { return CompactRegion(Box::rect(-1.6, 1.6, 0.6, 1.4), 17, 9); }

void criterion5(Log& log) {
  const CompactRegion K = wave_region();
  const double h = std::max(K.spacing(0), K.spacing(1));
  {
    const Net u = dalembert_wave({1.0, 0.0, 2, 1});
    const Spectrum sp = singular_spectrum(u, K, Target::dprime(), kSched);
    int off = 0, bad_r = 0, on = 0, cone = 0;
    for (std::size_t i = 0; i < sp.points.size(); ++i) {
      const Point& p = sp.points[i];
      const double gap = std::abs(std::abs(p[0]) - std::abs(p[1]));
      const SigmaFiber& f = sp.fibers[i];
      if (gap < 1e-9) {
        ++cone;
        if (f.nonempty()) ++on;
      }
      if (!f.nonempty()) continue;
      if (gap > 2.0 * h + 1e-9) ++off;
      if (std::abs(f.R - 1.0) > 0.2) ++bad_r;
    }
    log.check(off == 0, "c0 m=2 D': nonempty fibers farther than 2 spacings from the cone: " + std::to_string(off));
    log.check(on == cone, "c0 m=2 D': cone points with nonempty fibers: " + std::to_string(on) + " of " +
                              std::to_string(cone));
    log.check(bad_r == 0, "c0 m=2 D': nonempty fibers with |R-1| > 0.2: " + std::to_string(bad_r) + " of " +
                              std::to_string(sp.projection().size()));
    check_projection(log, u, K, Target::dprime(), sp, "wave c0 D'");

    const Spectrum c0 = singular_spectrum(u, K, Target::cp_order(0), kSched);
    int cone_bad = 0;
    for (std::size_t i = 0; i < c0.points.size(); ++i) {
      const Point& p = c0.points[i];
      if (std::abs(std::abs(p[0]) - std::abs(p[1])) > 1e-9) continue;
      const SigmaFiber& f = c0.fibers[i];
      if (!f.nonempty() || std::abs(f.R - 2.0) > 0.2) {
        ++cone_bad;
        log.check(false, "c0 m=2 C0 at " + at(p, 2) + ": " + describe(f));
      }
    }
    log.check(cone_bad == 0, "c0 m=2 C0: cone fibers with R=2 +- 0.2 (" + std::to_string(cone) + " cone points)");
  }
  {
    const Net u = dalembert_wave({0.0, 1.0, 1, 2});
    const Spectrum sp = singular_spectrum(u, K, Target::dprime(), kSched);
    int inside = 0, inside_ok = 0, outside_bad = 0;
    for (std::size_t i = 0; i < sp.points.size(); ++i) {
      const Point& p = sp.points[i];
      const SigmaFiber& f = sp.fibers[i];
      if (std::abs(p[0]) <= std::abs(p[1]) + 1e-9) {
        ++inside;
        if (f.nonempty() && std::abs(f.R - 1.0) <= 0.2) ++inside_ok;
        else log.check(false, "c1 n=2 D' at " + at(p, 2) + ": " + describe(f));
      } else if (std::abs(p[0]) > std::abs(p[1]) + 2.0 * h + 1e-9 && f.nonempty()) {
        ++outside_bad;
      }
    }
    log.check(inside_ok == inside, "c1 n=2 D': fibers with R=1 +- 0.2 in |x| <= |t|: " + std::to_string(inside_ok) +
                                       " of " + std::to_string(inside));
    log.check(outside_bad == 0, "c1 n=2 D': nonempty fibers beyond the cone: " + std::to_string(outside_bad));
  }
}

void criterion6(Log& log) {
  const SigmaFiber f0 = sigma_fiber(delta_power_net(2), Point{}, Target::dprime(), kSched, kRadius);
  log.check(f0.nonempty() && std::abs(f0.R - 1.0) <= 0.15, "initial delta^2 D' at 0: " + describe(f0));
  const Net u = semilinear_solution({SemilinearTag::dissipative_cubic, SemilinearKind::Initial::delta_power, 2});
  const CompactRegion K(Box::rect(-1.0, 1.0, 0.5, 2.0), 9, 9);
  const Spectrum sp = singular_spectrum(u, K, Target::dprime(), kSched);
  log.check(sp.projection().empty(), "dissipative D' spectrum on [-1,1]x[0.5,2]: " +
                                         std::to_string(sp.projection().size()) + " nonempty of " +
                                         std::to_string(sp.points.size()));
}

void criterion7(Log& log) {
  const Net u = semilinear_solution({SemilinearTag::log_growth, SemilinearKind::Initial::delta_power, 1});
  for (double t : {0.25, 0.5, 1.0}) {
    const SigmaFiber f = sigma_fiber(u, Point{0.0, t}, Target::dprime(), kSched, kRadius);
    const double expect = std::exp(t) - 1.0;
    log.check(f.nonempty() && std::abs(f.R - expect) <= 0.2,
              "t=" + fmt(t, 2) + ": R=" + fmt(f.R) + " (expect " + fmt(expect) + ")");
    log.check(f.endpoint == Endpoint::open_at_R, "t=" + fmt(t, 2) + ": endpoint " + to_string(f.endpoint) +
                                                     " (expect open_at_R)");
  }
}

void criterion8(Log& log) {
  const Net u = blowup_truncated(BlowupConfig{});
  const Target c0 = Target::cp_order(0);
  for (double t : {0.25, 0.5}) {
    const SigmaFiber f = sigma_fiber(u, Point{0.0, t}, c0, kSched, kRadius);
    log.check(f.nonempty() && f.R == 0.0, at(Point{0.0, t}, 2) + ": " + describe(f) + " (expect R=0 nonempty)");
  }
  for (double x : {0.0, 0.5})
    for (double t : {1.25, 1.75}) {
      const SigmaFiber f = sigma_fiber(u, Point{x, t}, c0, kSched, kRadius);
      log.check(f.nonempty() && std::abs(f.R - 1.0) <= 0.15, at(Point{x, t}, 2) + ": " + describe(f) + " (expect R=1)");
    }
  for (double t : {0.25, 0.5, 1.25, 1.75}) {
    const SigmaFiber f = sigma_fiber(u, Point{-0.5, t}, c0, kSched, kRadius);
    log.check(!f.nonempty(), at(Point{-0.5, t}, 2) + ": " + describe(f) + " (expect empty)");
  }
}

void criterion9(Log& log) {
  const Target c1 = Target::cp_order(1);
  for (auto [m, n] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 2}}) {
    const SigmaFiber w = sigma_fiber(rauch_reed_w(m, n), Point{0.0, 1.5}, c1, kSched, kRadius);
    const std::string tag = "(m,n)=(" + std::to_string(m) + "," + std::to_string(n) + ")";
    log.check(w.nonempty() && std::abs(w.R - (m + n)) <= 0.2, tag + " w at (0,1.5): " + describe(w));
    const auto sw = strength_from_fiber(w);
    const auto sm = strength_from_fiber(sigma_fiber(delta_power_net(m), Point{}, c1, kSched, kRadius));
    const auto sn = strength_from_fiber(sigma_fiber(delta_power_net(n), Point{}, c1, kSched, kRadius));
    const bool have = sw && sm && sn;
    log.check(have && *sw == -(m + n) && *sw == *sm + *sn + 2,
              tag + " strengths w=" + (sw ? std::to_string(*sw) : "none") + " data " +
                  (sm ? std::to_string(*sm) : "none") + ", " + (sn ? std::to_string(*sn) : "none"));
  }
}

void criterion10(Log& log) {
  const CompactRegion K = CompactRegion::interval(-0.5, 0.5, 33);
  const SmoothFunction one = SmoothFunction::constant(1, 1.0);
  const RegularityResult a = classify_regularity(eps_power_log_net(one, 1.0, 0.0), K, kSched);
  log.check(a.kind == Regularity::g_infinity_with_m && a.m == 1,
            "eps^-1: " + to_string(a.kind) + " m=" + std::to_string(a.m));
  const RegularityResult b = classify_regularity(eps_power_log_net(one, 0.0, 1.0), K, kSched);
  log.check(b.kind == Regularity::total_slow_scale, "|ln eps|: " + to_string(b.kind));
  const RegularityResult c = classify_regularity(heaviside_net(), K, kSched);
  log.check(c.kind == Regularity::neither, "H: " + to_string(c.kind));
  const RegularityResult d = classify_regularity(delta_net(), K, kSched);
  log.check(d.kind == Regularity::neither, "delta: " + to_string(d.kind));
}

// random nets whose sup seminorms have clean power laws near 0
Net random_net(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_real_distribution<double> coef(0.5, 3.0), p(-1.0, 3.0);
  std::uniform_int_distribution<int> small(1, 3);
  const double c = coef(rng);
  switch (kind(rng)) {
    case 0: {
      const double a = coef(rng), w = coef(rng);
      const SmoothFunction f = SmoothFunction::from_expression(
          1, [a, w](const Jet& x, const Jet&) { return cos(x * w) + a; });
      return eps_power_log_net(f, p(rng), small(rng) - 1.0);
    }
    case 1: return scalar_mul(c, delta_power_net(small(rng)));
    case 2: return scalar_mul(c, delta_derivative_net(small(rng) - 1));
    default: return scalar_mul(c, heaviside_net());
  }
}

void criterion11(Log& log) {
  std::mt19937_64 rng(20240611);
  const CompactRegion K = CompactRegion::interval(-0.5, 0.5, 33);
  std::uniform_real_distribution<double> r(0.0, 2.0);
  std::uniform_int_distribution<int> order(0, 2);
  int scaling_bad = 0, ultra_bad = 0, sum_bad = 0;
  for (int i = 0; i < 20; ++i) {
    const Net u = random_net(rng), v = random_net(rng);
    const int l = order(rng);
    const double nu = valuation(u, K, l, kSched), nv = valuation(v, K, l, kSched);
    const double rr = r(rng);
    const double scaled = valuation(scale(u, ScaleMap::power(), rr), K, l, kSched);
    const double multiple = valuation(scalar_mul(-2.5, u), K, l, kSched);
    if (std::abs(scaled - (nu - rr)) > 1e-6 || std::abs(multiple - nu) > 1e-6) ++scaling_bad;
    const double nuv = valuation(add(u, v), K, l, kSched);
    if (nuv > std::max(nu, nv) + kFitTol) {
      ++ultra_bad;
      log.check(false, "pair " + std::to_string(i) + ": nu(u+v)=" + fmt(nuv) + " > max(" + fmt(nu) + "," + fmt(nv) + ")");
    }
    const SigmaFiber fu = sigma_fiber(u, Point{}, Target::cp_order(0), kSched, kRadius);
    const SigmaFiber fv = sigma_fiber(v, Point{}, Target::cp_order(0), kSched, kRadius);
    const SigmaFiber fs = sigma_fiber(add(u, v), Point{}, Target::cp_order(0), kSched, kRadius);
    const double Ru = fu.nonempty() ? fu.R : 0.0, Rv = fv.nonempty() ? fv.R : 0.0;
    if (fs.nonempty() && fs.R > std::max(Ru, Rv) + kFitTol) {
      ++sum_bad;
      log.check(false, "pair " + std::to_string(i) + ": R(u+v)=" + fmt(fs.R) + " > max(" + fmt(Ru) + "," + fmt(Rv) + ")");
    }
  }
  log.check(scaling_bad == 0, "valuation scaling invariance on 20 pairs: " + std::to_string(scaling_bad) + " violations");
  log.check(ultra_bad == 0, "ultrametric inequality on 20 pairs: " + std::to_string(ultra_bad) + " violations");
  log.check(sum_bad == 0, "sum bound on 20 pairs: " + std::to_string(sum_bad) + " violations");

  const Target c0 = Target::cp_order(0);
  for (auto [m, n] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{2, 2}}) {
    const SigmaFiber f = sigma_fiber(mul(delta_power_net(m), delta_power_net(n)), Point{}, c0, kSched, kRadius);
    log.check(std::abs(f.R - (m + n)) <= 0.2, "R(delta^" + std::to_string(m) + " delta^" + std::to_string(n) +
                                                  ")=" + fmt(f.R) + " (expect " + std::to_string(m + n) + ")");
  }
  for (auto [m, p] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 2}}) {
    const SigmaFiber f = sigma_fiber(int_pow(delta_power_net(m), p), Point{}, c0, kSched, kRadius);
    log.check(std::abs(f.R - p * m) <= 0.2, "R((delta^" + std::to_string(m) + ")^" + std::to_string(p) + ")=" +
                                                fmt(f.R) + " (expect " + std::to_string(p * m) + ")");
  }

  const CompactRegion line = CompactRegion::interval(-1.0, 1.0, 21);
  for (const auto& [name, net] : {std::pair<std::string, Net>{"H", heaviside_net()},
                                  std::pair<std::string, Net>{"delta", delta_net()},
                                  std::pair<std::string, Net>{"oscillation", oscillatory_net()}}) {
    for (int p = 1; p <= 3; ++p) {
      const SupportSet s = singular_support(net, line, Target::cp_order(p), kSched);
      log.check(s.nested_checked && s.nested_ok, name + ": C" + std::to_string(p - 1) + " support inside C" +
                                                     std::to_string(p) + " support");
    }
  }
}

void criterion12(Log& log) {
  int fd_bad = 0, checked = 0;
  for (const auto& ln : testsupport::library_nets()) {
    for (int axis = 0; axis < ln.net.dim(); ++axis) {
      const auto c = testsupport::fd_ratio(ln.net, ln.x, ln.eps, axis, ln.h);
      ++checked;
      if (!testsupport::fd_ok(c)) {
        ++fd_bad;
        log.check(false, ln.name + " axis " + std::to_string(axis) + ": ratio " + fmt(c.ratio));
      }
    }
  }
  log.check(fd_bad == 0, "finite-difference O(h^2) ratio on " + std::to_string(checked) + " net/axis pairs");

  const double eps = 1e-2;
  const MultiIndex dt(2, {0, 1}), dtt(2, {0, 2}), dxx(2, {2, 0});
  double wave_worst = 0.0;
  for (const WaveData1D& d : {WaveData1D{1.0, 0.0, 2, 1}, WaveData1D{0.0, 1.0, 1, 2}, WaveData1D{1.0, 1.0, 1, 1}})
    for (double x : {0.995, 1.0, 1.004, -0.997})
      for (double t : {0.8, 1.0}) {
        const Jet j = dalembert_wave(d).jet(Point{x * t, t}, eps, 2);
        const double scale = std::max(std::abs(j.derivative(dtt)), std::abs(j.derivative(dxx)));
        if (scale > 0.0) wave_worst = std::max(wave_worst, std::abs(j.derivative(dtt) - j.derivative(dxx)) / scale);
      }
  log.check(wave_worst < 1e-6, "d'Alembert residual, worst relative " + sci(wave_worst));

  double semi_worst = 0.0;
  for (SemilinearTag tag : {SemilinearTag::dissipative_cubic, SemilinearTag::sqrt_growth, SemilinearTag::log_growth}) {
    const Net u = semilinear_solution({tag, SemilinearKind::Initial::delta_power, 1});
    for (double x : {0.0, 0.003, -0.006})
      for (double t : {0.25, 0.5, 1.0}) {
        const Jet j = u.jet(Point{x, t}, eps, 1);
        const double f = semilinear_rhs(tag, j.value());
        semi_worst = std::max(semi_worst, std::abs(j.derivative(dt) - f) / std::abs(f));
      }
  }
  log.check(semi_worst < 1e-6, "semilinear residuals, worst relative " + sci(semi_worst));
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Log&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "delta powers in C^k", criterion1},
      {2, "delta powers in D'", criterion2},
      {3, "oscillation eps sin(x/eps)", criterion3},
      {4, "endpoint discrimination", criterion4},
      {5, "wave equation", criterion5},
      {6, "semilinear dissipative", criterion6},
      {7, "semilinear log growth", criterion7},
      {8, "truncated blow-up", criterion8},
      {9, "sum law of strengths", criterion9},
      {10, "regularity classifiers", criterion10},
      {11, "valuation and spectrum properties", criterion11},
      {12, "numerical self-consistency", criterion12},
  };
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& c : criteria) {
    Log log;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(log);
    } catch (const std::exception& e) {
      log.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!log.ok) ++failed;
    std::printf("criterion %2d: %s  %s (%.1f s)\n%s", c.id, log.ok ? "PASS" : "FAIL", c.title, secs,
                log.detail.str().c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed (%.1f s)\n", static_cast<int>(criteria.size()) - failed, criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
