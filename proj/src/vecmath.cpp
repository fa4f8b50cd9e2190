// Compiled with -ffast-math -fopenmp-simd (see CMakeLists) so the loop
// vectorizes through libmvec. Inputs are finite phases; only sin/cos of a
// plain buffer happen here, so the relaxed FP mode cannot leak elsewhere.

#include "bira/vecmath.hpp"

#include <cmath>

namespace bira {

void sincos_array(const double* theta, double* s, double* c, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::sin(theta[i]);
    c[i] = std::cos(theta[i]);
  }
}

}  // namespace bira
