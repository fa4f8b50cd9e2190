#pragma once

#include <memory>
#include <vector>

#include "bira/kernels.hpp"
#include "bira/mesh.hpp"
#include "bira/quadrature.hpp"
#include "bira/scene.hpp"
#include "bira/types.hpp"

namespace bira {

/// The discrete operator 4-tuple at one Laplace point: state transition A
/// (N x N), source-to-boundary B (N), boundary-to-receiver C (M x N) and
/// direct path D (M), for the orthonormal piecewise-constant basis
/// phi_n = |Gamma_n|^{-1/2} on element n.
struct OperatorSet {
  LaplacePoint s;
  CMatrix A;
  CVector B;
  CMatrix C;
  CVector D;

  Eigen::Index state_size() const { return A.rows(); }
  Eigen::Index receiver_count() const { return C.rows(); }
};

struct AssemblyOptions {
  QuadratureSpec quadrature;
  int workers = 1;
  double min_clearance = 1e-3;  // receiver-to-element hard limit for C
};

/// Geometry-only factors reused across Laplace points: mapped quadrature
/// points, point weights (including the 2*area Jacobian), the one-level
/// 4-way subdivision used for near pairs, and basis norms. Rebuilding the
/// cache and assembling through it is bit-identical to cache-free assembly.
class GeometryCache {
 public:
  struct ElementData {
    std::vector<Vec3> points;
    std::vector<double> weights;      // sums to the element area
    std::vector<Vec3> sub_points;     // 4-way subdivided outer rule
    std::vector<double> sub_weights;  // sums to the element area
    double sqrt_area;
  };

  GeometryCache(const BoundaryMesh& mesh, const QuadratureSpec& spec);

  const ElementData& element(std::size_t i) const { return data_[i]; }
  const QuadratureSpec& spec() const { return spec_; }

 private:
  QuadratureSpec spec_;
  std::vector<ElementData> data_;
};

/// State-transition matrix; boundary observation weights (w = 2*pi).
/// Off-diagonal entries use tensor-product Gauss rules, with the outer
/// element subdivided once when the pair is closer than the near-field
/// threshold; the diagonal keeps only the weakly singular admittance term
/// (cos(theta) vanishes identically on a flat element), integrated by a
/// polar transform about each outer quadrature point. Every entry is
/// accumulated in a fixed loop order, so the result is bit-identical for
/// any worker count.
CMatrix assemble_A(const BoundaryMesh& mesh, const Medium& medium, const LaplacePoint& s,
                   const AssemblyOptions& options = {}, const GeometryCache* cache = nullptr);

/// Source-to-boundary column, entry n = |Gamma_n|^{-1/2} * integral of
/// (2/R) e^{-sR/c} over element n.
CVector assemble_B(const BoundaryMesh& mesh, const Vec3& source, const LaplacePoint& s,
                   const Medium& medium, const AssemblyOptions& options = {},
                   const GeometryCache* cache = nullptr);

/// Receiver rows; interior observation weights (w = 4*pi). Elements closer
/// to a receiver than the near-field threshold are subdivided once; closer
/// than `options.min_clearance` is an error.
CMatrix assemble_C(const BoundaryMesh& mesh, const std::vector<Vec3>& receivers,
                   const Medium& medium, const LaplacePoint& s,
                   const AssemblyOptions& options = {}, const GeometryCache* cache = nullptr);

/// Direct source-to-receiver column, entry m = (1/R_m) e^{-s R_m / c}.
CVector assemble_D(const std::vector<Vec3>& receivers, const Vec3& source, const LaplacePoint& s,
                   const Medium& medium);

OperatorSet assemble_operator_set(const Scene& scene, const LaplacePoint& s,
                                  const AssemblyOptions& options = {},
                                  const GeometryCache* cache = nullptr);

}  // namespace bira
