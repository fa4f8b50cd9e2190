#pragma once

#include <cmath>

#include "bira/errors.hpp"
#include "bira/medium.hpp"
#include "bira/types.hpp"

namespace bira {

/// A point s = sigma + j*omega in the Laplace domain. The engine operates
/// on the imaginary axis (sigma = 0, frequency-domain evaluation); sigma is
/// kept general because it costs nothing in the kernels.
struct LaplacePoint {
  double sigma = 0.0;  // 1/s
  double omega = 0.0;  // rad/s

  static LaplacePoint from_frequency(double f_hz) { return {0.0, two_pi * f_hz}; }
  LaplacePoint conjugate() const { return {sigma, -omega}; }
  Complex value() const { return {sigma, omega}; }
  bool is_imaginary_axis() const { return sigma == 0.0; }
};

/// The pair of real coefficients (g, h) weighting the time-derivative and
/// the value of the boundary pressure in the interior boundary-integral
/// relation,
///
///   g = (1/w) * ( cos(theta) / (c R) - rho / (R Z) ),
///   h =  cos(theta) / (w R^2),
///
/// with cos(theta) = (r - beta)^T n / R, n the unit boundary normal pointing
/// into the domain, w the solid-angle weight of the observation point (4*pi
/// interior, 2*pi on the smooth boundary). The signs follow from the chain
/// rule for the Green's function: the directional derivative of R(r, beta)
/// along the inward normal at beta is -cos(theta), and the inward-normal
/// impedance condition is dq/dn = +(rho/Z) dq/dt.
struct KernelPair {
  double g;  // s/m^2 scale (multiplies s)
  double h;  // 1/m^2 scale
};

/// Euclidean distance ||a - b||.
inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Cosine of the angle between (obs - src) and the unit normal at src.
/// Clamped to [-1, 1]; coincident points are a singular configuration and
/// must be routed to the dedicated singular-integration path by callers.
inline double cos_theta(const Vec3& obs, const Vec3& src_on_boundary, const Vec3& normal) {
  const Vec3 d = obs - src_on_boundary;
  const double r = d.norm();
  if (r == 0.0)
    throw SingularEvaluation("cos_theta: observation point coincides with boundary point");
  const double c = d.dot(normal) / r;
  return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
}

/// Kernel coefficients for observation point `obs`, boundary integration
/// point `beta` carrying `normal` and `impedance`, with solid-angle weight
/// `w` (two_pi for boundary observation, four_pi for interior observation).
inline KernelPair gh_coefficients(const Vec3& obs, const Vec3& beta, const Vec3& normal,
                                  const Impedance& impedance, const Medium& medium, double w) {
  const Vec3 d = obs - beta;
  const double r = d.norm();
  if (r == 0.0) throw SingularEvaluation("gh_coefficients: R = 0");
  const double ct = d.dot(normal) / r;
  const double g = (ct / (medium.sound_speed * r) - impedance.admittance_term(medium.density, r)) / w;
  const double h = ct / (w * r * r);
  return {g, h};
}

/// Propagation factor e^{-sR/c}; unit modulus on the imaginary axis.
inline Complex propagation(const LaplacePoint& s, double r, const Medium& medium) {
  const double delay = r / medium.sound_speed;
  const double mag = (s.sigma == 0.0) ? 1.0 : std::exp(-s.sigma * delay);
  const double phase = s.omega * delay;
  return {mag * std::cos(phase), -mag * std::sin(phase)};
}

/// Incident field on the boundary: (2/R) e^{-sR/c} for a unit excitation.
inline Complex incident_boundary(const Vec3& b, const Vec3& source, const LaplacePoint& s,
                                 const Medium& medium) {
  const double r = distance(b, source);
  if (r == 0.0) throw SingularEvaluation("incident_boundary: boundary point coincides with source");
  return (2.0 / r) * propagation(s, r, medium);
}

/// Incident field at an interior receiver: (1/R) e^{-sR/c}.
inline Complex incident_receiver(const Vec3& r_pos, const Vec3& source, const LaplacePoint& s,
                                 const Medium& medium) {
  const double r = distance(r_pos, source);
  if (r == 0.0) throw SingularEvaluation("incident_receiver: receiver coincides with source");
  return (1.0 / r) * propagation(s, r, medium);
}

}  // namespace bira
