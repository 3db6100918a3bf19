#include "krein/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "krein/errors.hpp"

namespace krein {

namespace {

// P_n(x) and P_{n-1}(x) by the three-term recurrence.
std::pair<double, double> legendre(Index n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (Index k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * static_cast<double>(k) - 1.0) * x * p1 - (static_cast<double>(k) - 1.0) * p0) /
                      static_cast<double>(k);
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

QuadratureRule gauss_legendre(Index m) {
  if (m < 1) fail(ErrorKind::InvalidArgument, "gauss_legendre needs m >= 1");
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  const double dm = static_cast<double>(m);
  for (Index i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dm + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const auto [p, pm1] = legendre(m, x);
      dp = dm * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    const auto [p, pm1] = legendre(m, x);
    dp = dm * (x * p - pm1) / (x * x - 1.0);
    rule.nodes(m - 1 - i) = x;
    rule.weights(m - 1 - i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule gauss_lobatto(Index n) {
  if (n < 2) fail(ErrorKind::InvalidArgument, "gauss_lobatto needs n >= 2");
  const Index big_n = n - 1;
  const double dn = static_cast<double>(big_n);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Index i = 0; i < n; ++i) {
    // Chebyshev-Lobatto start, Newton on (1 - x^2) P_N'(x)
    double x = -std::cos(std::numbers::pi * static_cast<double>(i) / dn);
    if (i > 0 && i < big_n) {
      for (int it = 0; it < 100; ++it) {
        const auto [p, pm1] = legendre(big_n, x);
        const double dx = (x * p - pm1) / ((dn + 1.0) * p);
        x -= dx;
        if (std::abs(dx) <= 1e-16) break;
      }
    }
    const double p = legendre(big_n, x).first;
    rule.nodes(i) = x;
    rule.weights(i) = 2.0 / (dn * (dn + 1.0) * p * p);
  }
  return rule;
}

Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& nodes) {
  const Index n = nodes.size();
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k)
      if (k != j) w(j) *= nodes(j) - nodes(k);
    w(j) = 1.0 / w(j);
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (w(j) / w(i)) / (nodes(i) - nodes(j));
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

QuadratureRule map_rule(const QuadratureRule& rule, double a, double b) {
  QuadratureRule out;
  const double half = 0.5 * (b - a);
  out.nodes = (rule.nodes.array() + 1.0) * half + a;
  out.weights = rule.weights * half;
  return out;
}

}  // namespace krein
