#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "krein/numerics.hpp"

namespace krein {

using State2 = std::array<Complex, 2>;

/// y' = F(x, y) for a complex 2-vector.
using Rhs2 = std::function<State2(double, const State2&)>;

struct OdeOptions {
  double rtol = 1e-11;
  double atol = 1e-12;
  /// Largest step allowed anywhere on the path.
  double max_step = 0.05;
};

struct OdeTrajectory {
  /// Values at the requested output points, in the order they were given.
  std::vector<State2> samples;
  State2 end{};
  long steps = 0;
  long rejected = 0;
};

/// Dormand-Prince 5(4) with standard error control
///   err = max_i |e_i| / (atol + rtol max(|y_i|, |y_new_i|)).
///
/// Every output point and breakpoint is hit exactly by a step endpoint;
/// breakpoints are places where F jumps. Both lists must lie in the
/// integration range; their order does not matter. Throws
/// StepSizeUnderflow when the accepted step would drop below
/// 1e-14 max(1, |x|).
OdeTrajectory integrate_dp5(const Rhs2& rhs, double x0, double x1, State2 y0, const OdeOptions& options,
                            std::span<const double> outputs = {}, std::span<const double> breakpoints = {});

}  // namespace krein
