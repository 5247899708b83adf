#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gfspec/gfspec.hpp"

namespace testsupport {

using gfspec::Net;
using gfspec::Point;

struct FdCheck {
  double analytic = 0.0;
  double err_h = 0.0;
  double err_h2 = 0.0;
  double ratio = 0.0;
  bool exact = false;  // both errors at roundoff level
};

/// Central differences at steps h and h/2 against the analytic first
/// derivative along `axis`. A second-order scheme shrinks the error by ~4.
inline FdCheck fd_ratio(const Net& net, Point x, double eps, int axis, double h) {
  const auto k = static_cast<std::size_t>(axis);
  auto central = [&](double step) {
    Point a = x, b = x;
    a[k] += step;
    b[k] -= step;
    return (net.jet(a, eps, 0).value() - net.jet(b, eps, 0).value()) / (2.0 * step);
  };
  FdCheck c;
  c.analytic = gfspec::evaluate(net, gfspec::MultiIndex::unit(net.dim(), axis), x, eps);
  c.err_h = std::abs(central(h) - c.analytic);
  c.err_h2 = std::abs(central(0.5 * h) - c.analytic);
  const double floor = 1e-9 * (1.0 + std::abs(c.analytic));
  c.exact = c.err_h < floor && c.err_h2 < floor;
  c.ratio = c.err_h2 > 0.0 ? c.err_h / c.err_h2 : 0.0;
  return c;
}

inline bool fd_ok(const FdCheck& c) { return c.exact || (c.ratio > 3.5 && c.ratio < 4.5); }

struct LibraryNet {
  std::string name;
  Net net;
  Point x;
  double eps;
  double h;
};

/// Every net family of the library with a probe point inside its layer.
inline std::vector<LibraryNet> library_nets() {
  using namespace gfspec;
  const SmoothFunction g = SmoothFunction::from_expression(
      1, [](const Jet& x, const Jet&) { return sin(x) + 2.0; });
  PiecewiseSpec kink{0.0, [](double x) { return -x; }, [](double x) { return x; }};
  BlowupConfig bc;
  std::vector<LibraryNet> v;
  v.push_back({"delta", delta_net(), {0.03, 0.0}, 0.1, 2e-3});
  v.push_back({"delta^2", delta_power_net(2), {0.03, 0.0}, 0.1, 2e-3});
  v.push_back({"delta^3", delta_power_net(3), {-0.04, 0.0}, 0.1, 2e-3});
  v.push_back({"delta'", delta_derivative_net(1), {0.03, 0.0}, 0.1, 2e-3});
  v.push_back({"heaviside", heaviside_net(), {0.02, 0.0}, 0.1, 2e-3});
  v.push_back({"oscillation", oscillatory_net(), {0.3, 0.0}, 0.1, 5e-3});
  v.push_back({"eps_power_log", eps_power_log_net(g, 1.0, 1.0), {0.4, 0.0}, 0.05, 2e-2});
  v.push_back({"smooth", smooth_net(g), {0.4, 0.0}, 0.5, 2e-2});
  v.push_back({"embed |x|", embed_piecewise(kink), {0.03, 0.0}, 0.1, 2e-3});
  v.push_back({"wave c0", dalembert_wave({1.0, 0.0, 2, 1}), {1.02, 1.0}, 0.1, 2e-3});
  v.push_back({"wave c1", dalembert_wave({0.0, 1.0, 1, 2}), {0.97, 1.0}, 0.1, 2e-3});
  v.push_back({"semilinear dissipative", semilinear_solution({SemilinearTag::dissipative_cubic}), {0.03, 0.7}, 0.1,
               2e-3});
  v.push_back({"semilinear sqrt", semilinear_solution({SemilinearTag::sqrt_growth}), {0.03, 0.7}, 0.1, 2e-3});
  v.push_back({"semilinear log", semilinear_solution({SemilinearTag::log_growth}), {0.03, 0.3}, 0.1, 2e-3});
  v.push_back({"blowup", blowup_truncated(bc), {0.02, 0.5}, 0.1, 2e-3});
  v.push_back({"rauch_reed", rauch_reed_w(1, 1), {0.02, 1.01}, 0.1, 2e-3});
  return v;
}

}  // namespace testsupport
