#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bira/kernels.hpp"
#include "bira/mesh.hpp"
#include "bira/response.hpp"
#include "bira/types.hpp"

namespace bira {

/// Axis-aligned mirror plane {x : x[axis] = value}.
struct AxisPlane {
  int axis = 0;
  double value = 0.0;
};

Vec3 mirror_point(const Vec3& p, const AxisPlane& plane);

/// One image of the source in the rectangular-room lattice.
struct ImageSource {
  Vec3 position;
  double gain;  // product of per-bounce reflection coefficients
  int order;    // total number of reflections
};

/// Image lattice of a shoebox [0,Lx]x[0,Ly]x[0,Lz] up to `max_order` total
/// reflections. Per-face frequency-independent real reflection coefficients
/// in the face order (x=0, x=Lx, y=0, y=Ly, z=0, z=Lz). Order 0 is the
/// source itself with gain 1.
std::vector<ImageSource> ism_images(const Vec3& lengths, const Vec3& source, int max_order,
                                    const std::array<double, 6>& reflection);

/// Image-source frequency response on an inverse-DFT grid, one row per
/// receiver: each image contributes gain * e^{-j omega R / c} / R. Feeds the
/// shared to_impulse_response path; tagged method = "ism".
TransferFunction ism_shoebox(const Vec3& lengths, const Vec3& source,
                             const std::vector<Vec3>& receivers, int max_order,
                             const std::array<double, 6>& reflection, const Medium& medium,
                             const FrequencyGrid& grid);

/// Same response on an arbitrary frequency list.
CMatrix ism_response(const Vec3& lengths, const Vec3& source, const std::vector<Vec3>& receivers,
                     int max_order, const std::array<double, 6>& reflection, const Medium& medium,
                     const std::vector<double>& frequencies);

struct BoxMode {
  int nx, ny, nz;
  double frequency;
};

/// Rigid-box eigenfrequencies (c/2) sqrt((nx/Lx)^2 + (ny/Ly)^2 + (nz/Lz)^2)
/// up to f_max, excluding (0,0,0), sorted ascending.
std::vector<BoxMode> rigid_box_modes(const Vec3& lengths, const Medium& medium, double f_max);

struct MonteCarloEstimate {
  Complex mean;          // estimate of the assembled entry
  double se_re, se_im;   // standard errors per component
  long samples;
};

/// Brute-force Monte-Carlo estimate of an off-diagonal state-transition
/// entry (boundary observation weights), with the same basis normalization
/// as the assembled matrix. Uniform triangle sampling by the square-root
/// barycentric map; fixed-seed blocked accumulation, deterministic for any
/// thread count. The kernel arithmetic here is written out independently of
/// the assembly path. Self-pairs are refused (singular kernel).
MonteCarloEstimate monte_carlo_pair_entry(const BoundaryMesh& mesh, std::size_t row,
                                          std::size_t col, const Medium& medium,
                                          const LaplacePoint& s, long samples,
                                          std::uint64_t seed);

/// Monte-Carlo estimate of a receiver-row entry (interior observation
/// weights).
MonteCarloEstimate monte_carlo_receiver_entry(const BoundaryMesh& mesh, std::size_t element,
                                              const Vec3& receiver, const Medium& medium,
                                              const LaplacePoint& s, long samples,
                                              std::uint64_t seed);

/// Reference first-order reflection off an infinite rigid plane: the
/// mirrored-source contribution e^{-j omega R'/c} / R'. Source and receiver
/// must lie on the same side of the plane.
Complex plate_first_order(const Vec3& source, const Vec3& receiver, const AxisPlane& plane,
                          double omega, const Medium& medium);

/// Flags geometries outside the asymptotic regime of the specular
/// equivalence (grazing propagation paths close to the plane).
bool plate_setup_is_grazing(const Vec3& source, const Vec3& receiver, const AxisPlane& plane,
                            double min_elevation_rad = 0.17);

}  // namespace bira
