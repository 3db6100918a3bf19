#include "krein/bessel.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "krein/errors.hpp"

namespace krein {

namespace {

constexpr double kEuler = 0.57721566490153286060651209008240243;
constexpr double kOverflowArg = 700.0;

void check_finite(Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail(ErrorKind::InvalidArgument, "Bessel argument must be finite");
}

// exp(-z) I_n(z), n = 0..nmax, by the ascending series.
std::vector<Complex> i_series(int nmax, Complex z) {
  std::vector<Complex> out(static_cast<std::size_t>(nmax + 1));
  const Complex q = 0.25 * z * z;
  Complex lead = 1.0;  // (z/2)^n / n!
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) lead *= 0.5 * z / static_cast<double>(n);
    Complex term = lead, sum = 0.0;
    for (int j = 0; j < 200; ++j) {
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
      term *= q / ((j + 1.0) * (n + j + 1.0));
    }
    out[static_cast<std::size_t>(n)] = sum * std::exp(-z);
  }
  return out;
}

// Hankel expansion of exp(-z) I_n(z), Re z large enough that the
// exp(-2z) connection term is below rounding.
std::vector<Complex> i_asymptotic(int nmax, Complex z) {
  std::vector<Complex> out(static_cast<std::size_t>(nmax + 1));
  const Complex pre = 1.0 / std::sqrt(2.0 * std::numbers::pi * z);
  for (int n = 0; n <= nmax; ++n) {
    const double mu = 4.0 * n * n;
    Complex term = 1.0, sum = 1.0;
    double last = INFINITY;
    for (int j = 1; j < 200; ++j) {
      term *= -(mu - (2.0 * j - 1.0) * (2.0 * j - 1.0)) / (8.0 * j * z);
      const double size = std::abs(term);
      if (size > last) break;
      sum += term;
      last = size;
      if (size <= 1e-17 * std::abs(sum)) break;
    }
    out[static_cast<std::size_t>(n)] = pre * sum;
  }
  return out;
}

// Miller's backward recurrence I_{n-1} = (2n/z) I_n + I_{n+1}, normalised by
// I_0 + 2 sum_{n>=1} I_n = exp(z), which yields exp(-z) I_n directly.
std::vector<Complex> i_miller(int nmax, Complex z) {
  const double az = std::abs(z);
  const int start = std::max(nmax + 1, static_cast<int>(az)) + 30 + static_cast<int>(10.0 * std::sqrt(az));
  std::vector<Complex> out(static_cast<std::size_t>(nmax + 1));
  Complex above = 0.0, cur = 1e-30, sum = 0.0;
  for (int n = start; n >= 1; --n) {
    if (n <= nmax) out[static_cast<std::size_t>(n)] = cur;
    sum += 2.0 * cur;
    const Complex below = (2.0 * n / z) * cur + above;
    above = cur;
    cur = below;
    if (std::abs(cur) > 1e250) {
      const double r = 1e-250;
      cur *= r;
      above *= r;
      sum *= r;
      for (int m = n; m <= nmax; ++m) out[static_cast<std::size_t>(m)] *= r;
    }
  }
  out[0] = cur;
  sum += cur;
  for (Complex& v : out) v /= sum;
  return out;
}

// exp(-z) I_n(z) for n = 0..nmax, Re z >= 0.
std::vector<Complex> i_scaled_orders(int nmax, Complex z) {
  const double az = std::abs(z);
  if (az <= 2.0) return i_series(nmax, z);
  const double big = std::max(30.0, static_cast<double>(nmax) * nmax);
  if (z.real() > 18.5 && az > big) return i_asymptotic(nmax, z);
  return i_miller(nmax, z);
}

// exp(z) K_0(z), exp(z) K_1(z), Re z > 0.
std::pair<Complex, Complex> k01_scaled(Complex z) {
  const double az = std::abs(z);
  if (az <= 2.0) {
    const Complex q = 0.25 * z * z;
    const Complex log_half = std::log(0.5 * z);
    const std::vector<Complex> iv = i_series(1, z);
    const Complex ez = std::exp(z);
    // K_0 = -log(z/2) I_0 + sum psi(j+1) q^j / (j!)^2
    Complex term = 1.0, s0 = 0.0;
    double psi = -kEuler;
    for (int j = 0; j < 100; ++j) {
      const Complex add = psi * term;
      s0 += add;
      if (j > 2 && std::abs(add) <= 1e-17 * std::abs(s0)) break;
      term *= q / ((j + 1.0) * (j + 1.0));
      psi += 1.0 / (j + 1.0);
    }
    // K_1 = 1/z + log(z/2) I_1 - (z/4) sum (psi(j+1) + psi(j+2)) q^j / (j! (j+1)!)
    Complex term1 = 1.0, s1 = 0.0;
    double psi_a = -kEuler, psi_b = 1.0 - kEuler;
    for (int j = 0; j < 100; ++j) {
      const Complex add = (psi_a + psi_b) * term1;
      s1 += add;
      if (j > 2 && std::abs(add) <= 1e-17 * std::abs(s1)) break;
      term1 *= q / ((j + 1.0) * (j + 2.0));
      psi_a += 1.0 / (j + 1.0);
      psi_b += 1.0 / (j + 2.0);
    }
    const Complex k0 = -log_half * iv[0] * ez + s0;
    const Complex k1 = 1.0 / z + log_half * iv[1] * ez - 0.25 * z * s1;
    return {k0 * ez, k1 * ez};
  }
  if (az > 30.0) {
    const Complex pre = std::sqrt(std::numbers::pi / (2.0 * z));
    Complex out[2];
    for (int n = 0; n <= 1; ++n) {
      const double mu = 4.0 * n * n;
      Complex term = 1.0, sum = 1.0;
      for (int j = 1; j < 200; ++j) {
        term *= (mu - (2.0 * j - 1.0) * (2.0 * j - 1.0)) / (8.0 * j * z);
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
      }
      out[n] = pre * sum;
    }
    return {out[0], out[1]};
  }
  // Steed's continued fraction CF2 with Temme's normalisation, order 0.
  Complex b = 2.0 * (1.0 + z);
  Complex d = 1.0 / b;
  Complex h = d, delh = d;
  Complex q1 = 0.0, q2 = 1.0;
  const double a1 = 0.25;
  Complex q = a1, c = a1;
  double a = -a1;
  Complex s = 1.0 + q * delh;
  for (int i = 1; i < 100000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const Complex qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const Complex dels = q * delh;
    s += dels;
    if (std::abs(dels) <= 1e-17 * std::abs(s)) break;
  }
  h = a1 * h;
  const Complex k0 = std::sqrt(std::numbers::pi / (2.0 * z)) / s;
  const Complex k1 = k0 * (z + 0.5 - h) / z;
  return {k0, k1};
}

}  // namespace

BesselPair bessel_i_scaled(int k, Complex z) {
  check_finite(z);
  k = std::abs(k);
  const bool reflect = z.real() < 0.0;
  const Complex w = reflect ? -z : z;
  const std::vector<Complex> v = i_scaled_orders(k + 1, w);
  const Complex value = v[static_cast<std::size_t>(k)];
  const Complex deriv = k == 0 ? v[1] : 0.5 * (v[static_cast<std::size_t>(k - 1)] + v[static_cast<std::size_t>(k + 1)]);
  if (!reflect) return {value, deriv};
  // I_k(-w) = (-1)^k I_k(w), I_k'(-w) = (-1)^(k+1) I_k'(w)
  const double sign = k % 2 == 0 ? 1.0 : -1.0;
  return {sign * value, -sign * deriv};
}

BesselPair bessel_k_scaled(int k, Complex z) {
  check_finite(z);
  if (!(z.real() > 0.0)) fail(ErrorKind::InvalidArgument, "bessel_k needs Re z > 0");
  k = std::abs(k);
  auto [km, kc] = k01_scaled(z);
  // forward recurrence K_{n+1} = K_{n-1} + (2n/z) K_n is stable for K
  Complex prev = km;
  for (int n = 1; n <= k; ++n) {
    const Complex next = prev + (2.0 * n / z) * kc;
    prev = kc;
    kc = next;
  }
  // now prev = K_k, kc = K_{k+1}
  if (k == 0) return {prev, -kc};
  Complex below = km;
  if (k >= 2) {
    // K_{k-1} from the downward relation K_{k-1} = K_{k+1} - (2k/z) K_k
    below = kc - (2.0 * k / z) * prev;
  }
  return {prev, -0.5 * (below + kc)};
}

BesselPair bessel_i(int k, Complex z) {
  check_finite(z);
  if (std::abs(z) > kOverflowArg) fail(ErrorKind::OverflowGuard, "bessel_i: |z| > 700, use the scaled form");
  const BesselPair s = bessel_i_scaled(k, z);
  const Complex factor = z.real() < 0.0 ? std::exp(-z) : std::exp(z);
  return {s.value * factor, s.derivative * factor};
}

BesselPair bessel_k(int k, Complex z) {
  check_finite(z);
  if (std::abs(z) > kOverflowArg) fail(ErrorKind::OverflowGuard, "bessel_k: |z| > 700, use the scaled form");
  const BesselPair s = bessel_k_scaled(k, z);
  const Complex factor = std::exp(-z);
  return {s.value * factor, s.derivative * factor};
}

BesselEval bessel_eval(int k, Complex z) {
  const BesselPair i = bessel_i(k, z);
  const BesselPair kk = bessel_k(k, z);
  return {k, z, i.value, i.derivative, kk.value, kk.derivative};
}

std::pair<double, double> bessel_j(int k, double x) {
  const Complex iu(0.0, 1.0);
  const BesselPair p = bessel_i(k, iu * x);
  const Complex phase = std::pow(iu, -std::abs(k));
  return {(phase * p.value).real(), (phase * iu * p.derivative).real()};
}

}  // namespace krein
