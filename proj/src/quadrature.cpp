#include "bira/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace bira {

namespace {

// Dunavant symmetric rules. Orbits are given as (multiplicity, weight,
// generator); weights are in the sum-to-one barycentric convention and
// halved on expansion so the stored weights sum to the reference area 1/2.

struct Orbit {
  int type;  // 1: centroid, 3: (a,b,b), 6: (a,b,c)
  double w;
  double a;
  double b;
};

TriangleRule expand(int degree, std::initializer_list<Orbit> orbits) {
  TriangleRule r;
  r.degree = degree;
  for (const Orbit& o : orbits) {
    const double w = 0.5 * o.w;
    switch (o.type) {
      case 1:
        r.barycentric.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
        r.weights.push_back(w);
        break;
      case 3: {
        const double a = o.a, b = o.b;
        r.barycentric.push_back({a, b, b});
        r.barycentric.push_back({b, a, b});
        r.barycentric.push_back({b, b, a});
        for (int k = 0; k < 3; ++k) r.weights.push_back(w);
        break;
      }
      case 6: {
        const double a = o.a, b = o.b, c = 1.0 - o.a - o.b;
        r.barycentric.push_back({a, b, c});
        r.barycentric.push_back({a, c, b});
        r.barycentric.push_back({b, a, c});
        r.barycentric.push_back({b, c, a});
        r.barycentric.push_back({c, a, b});
        r.barycentric.push_back({c, b, a});
        for (int k = 0; k < 6; ++k) r.weights.push_back(w);
        break;
      }
    }
  }
  return r;
}

}  // namespace

const TriangleRule& TriangleRule::degree6() {
  static const TriangleRule rule = expand(
      6, {{3, 0.050844906370207, 0.873821971016996, 0.063089014491502},
          {3, 0.116786275726379, 0.501426509658179, 0.249286745170910},
          {6, 0.082851075618374, 0.636502499121399, 0.310352451033785}});
  return rule;
}

const TriangleRule& TriangleRule::degree10() {
  static const TriangleRule rule = expand(
      10, {{1, 0.090817990382754, 0.0, 0.0},
           {3, 0.036725957756467, 0.028844733232685, 0.485577633383657},
           {3, 0.045321059435528, 0.781036849029926, 0.109481575485037},
           {6, 0.072757916845420, 0.141707219414880, 0.307939838764121},
           {6, 0.028327242531057, 0.025003534762686, 0.246672560639903},
           {6, 0.009421666963733, 0.009540815400299, 0.066803251012200}});
  return rule;
}

const TriangleRule& TriangleRule::of_degree(int degree) {
  switch (degree) {
    case 6:
      return degree6();
    case 10:
      return degree10();
    default:
      throw std::invalid_argument("TriangleRule: supported degrees are 6 and 10, got " +
                                  std::to_string(degree));
  }
}

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw std::invalid_argument("GaussLegendre: n must be >= 1");
  nodes.resize(n);
  weights.resize(n);
  // Roots of P_n on [-1,1] by Newton from the Chebyshev initial guess,
  // then mapped to [0,1].
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (1.0 - x);
    nodes[n - 1 - i] = 0.5 * (1.0 + x);
    weights[i] = 0.5 * w;
    weights[n - 1 - i] = 0.5 * w;
  }
}

}  // namespace bira
