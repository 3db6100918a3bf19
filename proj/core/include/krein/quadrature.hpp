#pragma once

#include "krein/numerics.hpp"

namespace krein {

struct QuadratureRule {
  Eigen::VectorXd nodes;  // ascending
  Eigen::VectorXd weights;
};

/// m-point Gauss-Legendre rule on (-1, 1), exact to degree 2m - 1.
QuadratureRule gauss_legendre(Index m);

/// n-point Gauss-Lobatto rule on [-1, 1] (both ends included), exact to
/// degree 2n - 3. n >= 2.
QuadratureRule gauss_lobatto(Index n);

/// Differentiation matrix of the polynomial interpolant through `nodes`,
/// from barycentric weights; diagonal by the negative row sum.
Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& nodes);

/// Affine map of a rule from [-1, 1] onto [a, b].
QuadratureRule map_rule(const QuadratureRule& rule, double a, double b);

}  // namespace krein
