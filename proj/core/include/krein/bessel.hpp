#pragma once

#include "krein/numerics.hpp"

namespace krein {

/// A modified Bessel function and its derivative, both multiplied by the same
/// scale factor (1 for the unscaled entry points).
struct BesselPair {
  Complex value;
  Complex derivative;
};

struct BesselEval {
  int order = 0;
  Complex argument;
  Complex value_I, value_Iprime, value_K, value_Kprime;
};

/// I_k(z), I_k'(z). Throws OverflowGuard for |z| > 700.
BesselPair bessel_i(int k, Complex z);

/// K_k(z), K_k'(z) for Re z > 0. Throws OverflowGuard for |z| > 700.
BesselPair bessel_k(int k, Complex z);

/// exp(-z) I_k(z) and exp(-z) I_k'(z) for Re z >= 0; exp(z) times the same
/// for Re z < 0. No range limit.
BesselPair bessel_i_scaled(int k, Complex z);

/// exp(z) K_k(z) and exp(z) K_k'(z), Re z > 0. No range limit.
BesselPair bessel_k_scaled(int k, Complex z);

/// Both kinds at once, unscaled.
BesselEval bessel_eval(int k, Complex z);

/// Ordinary Bessel J_k(x) and J_k'(x) for real x from I_k(ix) = i^k J_k(x).
std::pair<double, double> bessel_j(int k, double x);

}  // namespace krein
