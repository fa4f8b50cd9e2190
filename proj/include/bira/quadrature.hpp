#pragma once

#include <array>
#include <vector>

#include "bira/types.hpp"

namespace bira {

/// Symmetric Gauss rule on the reference triangle, stored as barycentric
/// abscissae with weights summing to the reference-triangle area 1/2, so
/// that  integral over T f dGamma = 2 * area(T) * sum_i w_i f(x_i).
struct TriangleRule {
  int degree = 0;
  std::vector<std::array<double, 3>> barycentric;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }

  /// Degree-6 rule, 12 points, all weights positive (the default).
  static const TriangleRule& degree6();
  /// Degree-10 rule, 25 points, all weights positive (convergence checks).
  static const TriangleRule& degree10();
  static const TriangleRule& of_degree(int degree);
};

/// Gauss-Legendre nodes and weights on [0, 1] (Newton iteration on the
/// Legendre polynomial; exact for polynomials of degree 2n-1).
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
};

/// Quadrature configuration for operator assembly.
///  - `gauss_degree`: triangle rule for the regular single and double
///    integrals (6 or 10).
///  - `near_field_threshold`: centroid distance / max element diameter below
///    which the outer element is subdivided once into 4 children.
///  - `self_radial` x `self_angular`: Gauss-Legendre counts of the polar
///    (Duffy) transform used for the weakly singular self-term.
struct QuadratureSpec {
  int gauss_degree = 6;
  double near_field_threshold = 2.0;
  int self_radial = 16;
  int self_angular = 16;

  const TriangleRule& rule() const { return TriangleRule::of_degree(gauss_degree); }
};

}  // namespace bira
