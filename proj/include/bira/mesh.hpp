#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bira/medium.hpp"
#include "bira/types.hpp"

namespace bira {

/// Flat triangular boundary element with precomputed geometry. The normal is
/// the winding normal (v1-v0) x (v2-v0), normalized; it must point into the
/// interior domain.
struct TriangleElement {
  std::array<std::uint32_t, 3> vertex;
  Vec3 centroid;
  double area;
  Vec3 normal;
  double diameter;  // longest edge
  Impedance impedance;
  std::string group;
};

enum class PointClass { Interior, Exterior, OnBoundary };

struct PointClassification {
  PointClass cls;
  double solid_angle;  // four_pi interior, two_pi on boundary, 0 exterior
};

/// Triangulated boundary of the acoustic domain.
///
/// Immutable after construction; all queries are const and safe to call
/// concurrently. Construction validates index ranges and rejects degenerate
/// (collinear) triangles; orientation is checked separately and never
/// silently repaired.
class BoundaryMesh {
 public:
  struct Face {
    std::array<std::uint32_t, 3> vertex;  // counter-clockwise seen from the interior
    std::string group;
  };

  BoundaryMesh(std::vector<Vec3> vertices, const std::vector<Face>& faces,
               const std::vector<Impedance>& impedances);

  std::size_t size() const { return elements_.size(); }
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<TriangleElement>& elements() const { return elements_; }
  const TriangleElement& element(std::size_t i) const { return elements_[i]; }
  Vec3 vertex_of(const TriangleElement& e, int corner) const { return vertices_[e.vertex[corner]]; }

  /// True when every edge is shared by exactly two triangles.
  bool is_closed() const { return closed_; }

  double total_area() const { return total_area_; }
  double median_longest_edge() const { return median_longest_edge_; }
  double max_diameter() const { return max_diameter_; }

  /// Divergence-theorem volume computed from the winding normals; negative
  /// for a closed mesh with inward orientation.
  double signed_volume() const;

  /// Index of the first element whose normal does not point into the
  /// interior, or nullopt when the orientation is consistent. Requires a
  /// closed mesh.
  std::optional<std::size_t> first_misoriented_element() const;

  /// Ray-parity classification with the solid-angle weight. Points closer
  /// than `boundary_tolerance` to the surface classify as OnBoundary.
  /// Requires a closed mesh; grazing ray hits are retried with a fresh
  /// direction so the result is deterministic.
  PointClassification classify(const Vec3& point, double boundary_tolerance = 1e-9) const;

  /// Distance from `point` to the nearest triangle.
  double distance_to(const Vec3& point) const;

  /// Distance from `point` to one element's triangle.
  double distance_to_element(const Vec3& point, std::size_t element) const;

  /// FNV-1a hash of the full geometric and material content.
  std::uint64_t content_hash() const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<TriangleElement> elements_;
  bool closed_ = false;
  double total_area_ = 0.0;
  double median_longest_edge_ = 0.0;
  double max_diameter_ = 0.0;
};

/// Impedance assignment for a mesh file: by face group, or one entry per
/// element. Exactly one of the two forms may be non-empty.
struct ImpedanceMap {
  std::map<std::string, Impedance> groups;
  std::vector<Impedance> per_element;
};

/// Closed axis-aligned box [0,Lx]x[0,Ly]x[0,Lz] with inward normals. Each
/// face is tiled with ceil(L/target_edge) quads per axis, each split into
/// two triangles. Face order (and group names): x=0 "xmin", x=Lx "xmax",
/// y=0 "ymin", y=Ly "ymax", z=0 "zmin", z=Lz "zmax".
BoundaryMesh make_shoebox(const Vec3& lengths, double target_edge,
                          const std::array<Impedance, 6>& face_impedances);

inline BoundaryMesh make_shoebox(const Vec3& lengths, double target_edge, const Impedance& z) {
  return make_shoebox(lengths, target_edge, {z, z, z, z, z, z});
}

/// Parses the text mesh format (`v x y z` and `f i j k group` lines, 1-based
/// indices, `#` comments), assigns impedances, and verifies orientation on
/// closed meshes. Misoriented normals are an error naming the first
/// offending element; they are never flipped here.
BoundaryMesh load_mesh(const std::filesystem::path& file, const ImpedanceMap& impedances);

void save_mesh(const std::filesystem::path& file, const BoundaryMesh& mesh);

}  // namespace bira
