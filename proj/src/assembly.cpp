#include "bira/assembly.hpp"

#include <cmath>

#include "bira/errors.hpp"
#include "bira/parallel.hpp"
#include "bira/vecmath.hpp"

namespace bira {

namespace {

// Scratch buffers for one (outer points, inner element) pair. thread_local:
// assembly hands whole entries to a single worker, and every entry is
// accumulated in a fixed i-major/j-minor order, so results are bit-identical
// for any worker count.
struct Scratch {
  std::vector<double> w, delay, theta, sn, cs, ct_fwd, ct_bwd, inv_r, adm_fwd, adm_bwd;
  void resize(std::size_t n) {
    w.resize(n);
    delay.resize(n);
    theta.resize(n);
    sn.resize(n);
    cs.resize(n);
    ct_fwd.resize(n);
    ct_bwd.resize(n);
    inv_r.resize(n);
    adm_fwd.resize(n);
    adm_bwd.resize(n);
  }
};
thread_local Scratch scratch;

bool pair_is_near(const TriangleElement& a, const TriangleElement& b, double threshold) {
  const double d = (a.centroid - b.centroid).norm();
  return d < threshold * std::max(a.diameter, b.diameter);
}

// Geometric buffers for all (outer i, inner j) point pairs plus the
// vectorized sin/cos of omega*R/c. Returns the pair count.
std::size_t fill_pair(const std::vector<Vec3>& outer_pts, const std::vector<double>& outer_w,
                      const std::vector<Vec3>& inner_pts, const std::vector<double>& inner_w,
                      const Vec3& outer_normal, const Vec3& inner_normal, double inv_c,
                      double omega) {
  const std::size_t no = outer_pts.size(), ni = inner_pts.size(), n = no * ni;
  Scratch& s = scratch;
  s.resize(n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < no; ++i) {
    const Vec3& b = outer_pts[i];
    const double wi = outer_w[i];
    for (std::size_t j = 0; j < ni; ++j, ++k) {
      const Vec3 d = b - inner_pts[j];
      const double r = std::sqrt(d.squaredNorm());
      const double inv_r = 1.0 / r;
      s.inv_r[k] = inv_r;
      s.ct_fwd[k] = d.dot(inner_normal) * inv_r;
      s.ct_bwd[k] = -d.dot(outer_normal) * inv_r;
      s.w[k] = wi * inner_w[j];
      s.delay[k] = r * inv_c;
      s.theta[k] = omega * s.delay[k];
    }
  }
  sincos_array(s.theta.data(), s.sn.data(), s.cs.data(), n);
  return n;
}

void fill_admittance(std::size_t n, const Impedance& inner_z, const Impedance& outer_z,
                     double density, Scratch& s) {
  if (inner_z.is_rigid()) {
    std::fill(s.adm_fwd.begin(), s.adm_fwd.begin() + n, 0.0);
  } else {
    const double rz = density / inner_z.value();
    for (std::size_t k = 0; k < n; ++k) s.adm_fwd[k] = rz * s.inv_r[k];
  }
  if (outer_z.is_rigid()) {
    std::fill(s.adm_bwd.begin(), s.adm_bwd.begin() + n, 0.0);
  } else {
    const double rz = density / outer_z.value();
    for (std::size_t k = 0; k < n; ++k) s.adm_bwd[k] = rz * s.inv_r[k];
  }
}

// sum_k w_k (s g_k + h_k) e^{-s R_k / c} over the filled buffers. On the
// imaginary axis the combination reduces to
//   re = h cos + omega g sin,   im = omega g cos - h sin,
// which together with the exactly odd/even sin/cos makes conjugate symmetry
// across +-omega structural.
Complex combine_kernel(const Scratch& s, std::size_t n, const LaplacePoint& lp, double inv_c,
                       double inv_w_solid, bool forward) {
  const double omega = lp.omega;
  const double* ct = forward ? s.ct_fwd.data() : s.ct_bwd.data();
  const double* adm = forward ? s.adm_fwd.data() : s.adm_bwd.data();
  double re = 0.0, im = 0.0;
  if (lp.sigma == 0.0) {
    for (std::size_t k = 0; k < n; ++k) {
      const double g = (ct[k] * s.inv_r[k] * inv_c - adm[k]) * inv_w_solid;
      const double h = ct[k] * s.inv_r[k] * s.inv_r[k] * inv_w_solid;
      re += s.w[k] * (h * s.cs[k] + omega * g * s.sn[k]);
      im += s.w[k] * (omega * g * s.cs[k] - h * s.sn[k]);
    }
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      const double g = (ct[k] * s.inv_r[k] * inv_c - adm[k]) * inv_w_solid;
      const double h = ct[k] * s.inv_r[k] * s.inv_r[k] * inv_w_solid;
      const Complex phase = std::exp(-lp.sigma * s.delay[k]) * Complex(s.cs[k], -s.sn[k]);
      const Complex val = (lp.value() * g + h) * phase;
      re += s.w[k] * val.real();
      im += s.w[k] * val.imag();
    }
  }
  return {re, im};
}

/// Weakly singular integral of e^{-sR/c}/R over a triangle, R = |beta - p|,
/// with p inside the triangle plane: split at p into three sub-triangles and
/// map each from the unit square with Jacobian u |a x b|, which cancels the
/// 1/R singularity analytically in the radial variable.
Complex polar_inverse_distance_integral(const Vec3& p, const Vec3& v0, const Vec3& v1,
                                        const Vec3& v2, const LaplacePoint& s, double sound_speed,
                                        const GaussLegendre& radial, const GaussLegendre& angular) {
  const Vec3 corner[3] = {v0, v1, v2};
  Complex total(0.0, 0.0);
  for (int e = 0; e < 3; ++e) {
    const Vec3 a = corner[e] - p;
    const Vec3 b = corner[(e + 1) % 3] - p;
    const double cross = a.cross(b).norm();
    if (cross == 0.0) continue;
    for (std::size_t iq = 0; iq < angular.nodes.size(); ++iq) {
      const double xi = angular.nodes[iq];
      const Vec3 m = (1.0 - xi) * a + xi * b;
      const double len = m.norm();
      Complex radial_sum(0.0, 0.0);
      for (std::size_t ir = 0; ir < radial.nodes.size(); ++ir) {
        const double delay = radial.nodes[ir] * len / sound_speed;
        Complex ph(std::cos(s.omega * delay), -std::sin(s.omega * delay));
        if (s.sigma != 0.0) ph *= std::exp(-s.sigma * delay);
        radial_sum += radial.weights[ir] * ph;
      }
      total += (cross / len) * angular.weights[iq] * radial_sum;
    }
  }
  return total;
}

}  // namespace

GeometryCache::GeometryCache(const BoundaryMesh& mesh, const QuadratureSpec& spec) : spec_(spec) {
  const TriangleRule& rule = spec.rule();
  const std::size_t q = rule.size();
  data_.resize(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const TriangleElement& e = mesh.element(i);
    const Vec3 v0 = mesh.vertex_of(e, 0), v1 = mesh.vertex_of(e, 1), v2 = mesh.vertex_of(e, 2);
    ElementData& d = data_[i];
    d.sqrt_area = std::sqrt(e.area);
    d.points.resize(q);
    d.weights.resize(q);
    // Map through edge differences: coordinates shared by all vertices stay
    // exact, so cos(theta) is an exact zero on coplanar axis-aligned pairs.
    auto map_point = [](const Vec3& a, const Vec3& b, const Vec3& c,
                        const std::array<double, 3>& bary) {
      return Vec3(a + bary[1] * (b - a) + bary[2] * (c - a));
    };
    for (std::size_t k = 0; k < q; ++k) {
      d.points[k] = map_point(v0, v1, v2, rule.barycentric[k]);
      d.weights[k] = 2.0 * e.area * rule.weights[k];
    }
    const Vec3 m01 = 0.5 * (v0 + v1), m12 = 0.5 * (v1 + v2), m20 = 0.5 * (v2 + v0);
    const Vec3 children[4][3] = {{v0, m01, m20}, {m01, v1, m12}, {m20, m12, v2}, {m01, m12, m20}};
    d.sub_points.resize(4 * q);
    d.sub_weights.resize(4 * q);
    for (int c = 0; c < 4; ++c) {
      for (std::size_t k = 0; k < q; ++k) {
        d.sub_points[c * q + k] =
            map_point(children[c][0], children[c][1], children[c][2], rule.barycentric[k]);
        d.sub_weights[c * q + k] = 0.5 * e.area * rule.weights[k];
      }
    }
  }
}

CMatrix assemble_A(const BoundaryMesh& mesh, const Medium& medium, const LaplacePoint& s,
                   const AssemblyOptions& options, const GeometryCache* cache) {
  std::unique_ptr<GeometryCache> local;
  if (!cache) {
    local = std::make_unique<GeometryCache>(mesh, options.quadrature);
    cache = local.get();
  }
  const auto n = static_cast<Eigen::Index>(mesh.size());
  CMatrix A(n, n);
  const double inv_c = 1.0 / medium.sound_speed;
  const double inv_two_pi = 1.0 / two_pi;
  const GaussLegendre radial(options.quadrature.self_radial);
  const GaussLegendre angular(options.quadrature.self_angular);

  parallel_for(0, n, options.workers, [&](long row) {
    const auto nn = static_cast<std::size_t>(row);
    const TriangleElement& en = mesh.element(nn);
    const GeometryCache::ElementData& dn = cache->element(nn);

    // Diagonal: cos(theta) vanishes identically on a flat element, so only
    // the admittance part of g survives; exactly zero for rigid elements.
    if (en.impedance.is_rigid()) {
      A(row, row) = Complex(0.0, 0.0);
    } else {
      const Vec3 v0 = mesh.vertex_of(en, 0), v1 = mesh.vertex_of(en, 1), v2 = mesh.vertex_of(en, 2);
      Complex outer_sum(0.0, 0.0);
      for (std::size_t i = 0; i < dn.points.size(); ++i)
        outer_sum += dn.weights[i] * polar_inverse_distance_integral(dn.points[i], v0, v1, v2, s,
                                                                     medium.sound_speed, radial,
                                                                     angular);
      const Complex sg = -s.value() * medium.density / (two_pi * en.impedance.value());
      A(row, row) = sg * outer_sum / en.area;
    }

    for (std::size_t nu = nn + 1; nu < mesh.size(); ++nu) {
      const auto col = static_cast<Eigen::Index>(nu);
      const TriangleElement& ev = mesh.element(nu);
      const GeometryCache::ElementData& dv = cache->element(nu);
      const double norm = 1.0 / (dn.sqrt_area * dv.sqrt_area);
      if (pair_is_near(en, ev, options.quadrature.near_field_threshold)) {
        // Each direction gets its own subdivided outer rule.
        std::size_t cnt = fill_pair(dn.sub_points, dn.sub_weights, dv.points, dv.weights,
                                    en.normal, ev.normal, inv_c, s.omega);
        fill_admittance(cnt, ev.impedance, en.impedance, medium.density, scratch);
        A(row, col) = norm * combine_kernel(scratch, cnt, s, inv_c, inv_two_pi, true);

        cnt = fill_pair(dv.sub_points, dv.sub_weights, dn.points, dn.weights, ev.normal, en.normal,
                        inv_c, s.omega);
        fill_admittance(cnt, en.impedance, ev.impedance, medium.density, scratch);
        A(col, row) = norm * combine_kernel(scratch, cnt, s, inv_c, inv_two_pi, true);
      } else {
        // Far pair: one geometric pass serves both entry directions.
        const std::size_t cnt = fill_pair(dn.points, dn.weights, dv.points, dv.weights, en.normal,
                                          ev.normal, inv_c, s.omega);
        fill_admittance(cnt, ev.impedance, en.impedance, medium.density, scratch);
        A(row, col) = norm * combine_kernel(scratch, cnt, s, inv_c, inv_two_pi, true);
        A(col, row) = norm * combine_kernel(scratch, cnt, s, inv_c, inv_two_pi, false);
      }
    }
  });
  return A;
}

CVector assemble_B(const BoundaryMesh& mesh, const Vec3& source, const LaplacePoint& s,
                   const Medium& medium, const AssemblyOptions& options,
                   const GeometryCache* cache) {
  std::unique_ptr<GeometryCache> local;
  if (!cache) {
    local = std::make_unique<GeometryCache>(mesh, options.quadrature);
    cache = local.get();
  }
  const auto n = static_cast<Eigen::Index>(mesh.size());
  CVector B(n);
  parallel_for(0, n, options.workers, [&](long row) {
    const GeometryCache::ElementData& d = cache->element(static_cast<std::size_t>(row));
    Complex sum(0.0, 0.0);
    for (std::size_t i = 0; i < d.points.size(); ++i)
      sum += d.weights[i] * incident_boundary(d.points[i], source, s, medium);
    B(row) = sum / d.sqrt_area;
  });
  return B;
}

CMatrix assemble_C(const BoundaryMesh& mesh, const std::vector<Vec3>& receivers,
                   const Medium& medium, const LaplacePoint& s, const AssemblyOptions& options,
                   const GeometryCache* cache) {
  std::unique_ptr<GeometryCache> local;
  if (!cache) {
    local = std::make_unique<GeometryCache>(mesh, options.quadrature);
    cache = local.get();
  }
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const auto m = static_cast<Eigen::Index>(receivers.size());
  CMatrix C(m, n);
  const double inv_c = 1.0 / medium.sound_speed;
  const double inv_four_pi = 1.0 / four_pi;
  const std::vector<double> unit_weight{1.0};

  parallel_for(0, n, options.workers, [&](long col) {
    const auto nu = static_cast<std::size_t>(col);
    const TriangleElement& ev = mesh.element(nu);
    const GeometryCache::ElementData& dv = cache->element(nu);
    std::vector<Vec3> obs(1);
    for (Eigen::Index rm = 0; rm < m; ++rm) {
      obs[0] = receivers[static_cast<std::size_t>(rm)];
      const double dist = (obs[0] - ev.centroid).norm();
      const bool near = dist < options.quadrature.near_field_threshold * ev.diameter;
      if (near && mesh.distance_to_element(obs[0], nu) < options.min_clearance)
        throw ValidationError("assemble_C: receiver " + std::to_string(rm) +
                              " is closer than the minimum clearance " +
                              std::to_string(options.min_clearance) + " m to element " +
                              std::to_string(nu));
      const auto& pts = near ? dv.sub_points : dv.points;
      const auto& wts = near ? dv.sub_weights : dv.weights;
      const std::size_t cnt =
          fill_pair(obs, unit_weight, pts, wts, ev.normal, ev.normal, inv_c, s.omega);
      fill_admittance(cnt, ev.impedance, ev.impedance, medium.density, scratch);
      C(rm, col) = combine_kernel(scratch, cnt, s, inv_c, inv_four_pi, true) / dv.sqrt_area;
    }
  });
  return C;
}

CVector assemble_D(const std::vector<Vec3>& receivers, const Vec3& source, const LaplacePoint& s,
                   const Medium& medium) {
  CVector D(static_cast<Eigen::Index>(receivers.size()));
  for (std::size_t i = 0; i < receivers.size(); ++i)
    D(static_cast<Eigen::Index>(i)) = incident_receiver(receivers[i], source, s, medium);
  return D;
}

OperatorSet assemble_operator_set(const Scene& scene, const LaplacePoint& s,
                                  const AssemblyOptions& options, const GeometryCache* cache) {
  std::unique_ptr<GeometryCache> local;
  if (!cache) {
    local = std::make_unique<GeometryCache>(scene.mesh, options.quadrature);
    cache = local.get();
  }
  OperatorSet ops;
  ops.s = s;
  ops.A = assemble_A(scene.mesh, scene.medium, s, options, cache);
  ops.B = assemble_B(scene.mesh, scene.source, s, scene.medium, options, cache);
  ops.C = assemble_C(scene.mesh, scene.receivers, scene.medium, s, options, cache);
  ops.D = assemble_D(scene.receivers, scene.source, s, scene.medium);
  return ops;
}

}  // namespace bira
