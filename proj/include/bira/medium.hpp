#pragma once

#include <cmath>
#include <limits>

#include "bira/errors.hpp"

namespace bira {

/// Homogeneous propagation medium. Fixes every propagation constant in the
/// model: delays scale with 1/c, the surface admittance term with rho.
struct Medium {
  double sound_speed;  // m/s
  double density;      // kg/m^3

  Medium(double c, double rho) : sound_speed(c), density(rho) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw ValidationError("Medium: sound speed must be positive and finite");
    if (!(rho > 0.0) || !std::isfinite(rho))
      throw ValidationError("Medium: density must be positive and finite");
  }
};

/// Specific acoustic impedance of a locally reacting surface, Pa·s/m.
/// A rigid surface is represented exactly (not as a large float) so the
/// admittance term of the kernels vanishes without cancellation.
class Impedance {
 public:
  explicit Impedance(double z) : z_(z) {
    if (std::isnan(z) || z <= 0.0)
      throw ValidationError("Impedance: value must be positive or infinite (rigid)");
  }

  static Impedance rigid() { return Impedance(std::numeric_limits<double>::infinity()); }

  bool is_rigid() const { return std::isinf(z_); }
  double value() const { return z_; }

  /// rho / (R * Z); exactly zero for rigid surfaces.
  double admittance_term(double density, double distance) const {
    if (is_rigid()) return 0.0;
    return density / (distance * z_);
  }

  bool operator==(const Impedance& o) const { return z_ == o.z_; }

 private:
  double z_;
};

}  // namespace bira
