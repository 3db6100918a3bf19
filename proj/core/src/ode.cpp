#include "krein/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "krein/errors.hpp"

namespace krein {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b*, the fifth minus the embedded fourth order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

State2 axpy(const State2& y, double h, std::initializer_list<std::pair<double, const State2*>> terms) {
  State2 out = y;
  for (const auto& [w, k] : terms) {
    out[0] += h * w * (*k)[0];
    out[1] += h * w * (*k)[1];
  }
  return out;
}

struct Forced {
  double x;
  bool output;
  std::size_t slot;
};

}  // namespace

OdeTrajectory integrate_dp5(const Rhs2& rhs, double x0, double x1, State2 y0, const OdeOptions& options,
                            std::span<const double> outputs, std::span<const double> breakpoints) {
  if (!(options.rtol > 0.0) || !(options.atol > 0.0) || !(options.max_step > 0.0))
    fail(ErrorKind::InvalidArgument, "integrate_dp5: tolerances and max_step must be positive");
  if (!std::isfinite(x0) || !std::isfinite(x1)) fail(ErrorKind::InvalidArgument, "integrate_dp5: bad range");
  for (const Complex& v : y0)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(ErrorKind::InvalidArgument, "integrate_dp5: initial data must be finite");

  const double dir = x1 >= x0 ? 1.0 : -1.0;
  const double lo = std::min(x0, x1), hi = std::max(x0, x1);
  std::vector<Forced> forced;
  forced.reserve(outputs.size() + breakpoints.size() + 1);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    if (!(outputs[i] >= lo && outputs[i] <= hi))
      fail(ErrorKind::InvalidArgument, "integrate_dp5: output point outside the integration range");
    forced.push_back({outputs[i], true, i});
  }
  for (const double b : breakpoints)
    if (b > lo && b < hi) forced.push_back({b, false, 0});
  forced.push_back({x1, false, 0});
  std::stable_sort(forced.begin(), forced.end(),
                   [dir](const Forced& a, const Forced& b) { return dir * a.x < dir * b.x; });

  OdeTrajectory out;
  out.samples.assign(outputs.size(), State2{});
  double x = x0;
  State2 y = y0;
  double h = std::min(options.max_step, hi - lo);
  std::size_t next = 0;

  // points sitting on the start need no step
  while (next < forced.size() && forced[next].x == x0) {
    if (forced[next].output) out.samples[forced[next].slot] = y;
    ++next;
  }

  while (next < forced.size()) {
    const double target = forced[next].x;
    const double remaining = std::abs(target - x);
    const bool hit = h >= remaining;
    const double step = hit ? remaining : h;
    const double hs = dir * step;

    const State2 k1 = rhs(x, y);
    const State2 k2 = rhs(x + c2 * hs, axpy(y, hs, {{a21, &k1}}));
    const State2 k3 = rhs(x + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State2 k4 = rhs(x + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State2 k5 = rhs(x + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State2 k6 = rhs(x + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const State2 y_new = axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State2 k7 = rhs(x + hs, y_new);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const Complex e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale = options.atol + options.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      ++out.steps;
      y = y_new;
      const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      if (hit) {
        x = target;
        // a step clipped to an event should not shrink the next one
        h = std::max(h, grow * step);
        while (next < forced.size() && forced[next].x == target) {
          if (forced[next].output) out.samples[forced[next].slot] = y;
          ++next;
        }
      } else {
        x += hs;
        h = grow * step;
      }
      h = std::min(h, options.max_step);
    } else {
      ++out.rejected;
      h = step * std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < 1e-14 * std::max(1.0, std::abs(x))) {
        std::ostringstream os;
        os << "step size underflow at x = " << x;
        fail(ErrorKind::StepSizeUnderflow, os.str());
      }
    }
  }
  out.end = y;
  return out;
}

}  // namespace krein
