#pragma once

#include <cstddef>

namespace bira {

/// sin and cos of each entry, written to `s` and `c`. Compiled in a
/// translation unit with vector-math flags so the loop maps to SIMD libm
/// calls; bit-exact odd/even symmetry in theta is preserved.
void sincos_array(const double* theta, double* s, double* c, std::size_t n);

}  // namespace bira
