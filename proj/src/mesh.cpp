#include "bira/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "bira/errors.hpp"

namespace bira {

namespace {

double longest_edge(const Vec3& a, const Vec3& b, const Vec3& c) {
  return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

/// Closest point on triangle (a,b,c) to p; Ericson's region decomposition.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

struct RayHit {
  bool hit = false;
  bool grazing = false;  // too close to an edge/vertex or to the ray origin to trust
};

RayHit ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                    const Vec3& c, double scale) {
  // Moller-Trumbore with conservative grazing detection.
  constexpr double kBaryEps = 1e-10;
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  const double det_eps = 1e-12 * scale * scale;
  RayHit out;
  if (std::abs(det) < det_eps) {
    // Parallel ray: a miss unless the plane passes very near the origin.
    const Vec3 n = e1.cross(e2);
    const double nn = n.norm();
    if (nn > 0.0 && std::abs(n.dot(origin - a)) / nn < 1e-9 * scale) out.grazing = true;
    return out;
  }
  const double inv_det = 1.0 / det;
  const Vec3 tv = origin - a;
  const double u = tv.dot(pv) * inv_det;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv_det;
  const double t = e2.dot(qv) * inv_det;
  if (u > kBaryEps && v > kBaryEps && (u + v) < 1.0 - kBaryEps) {
    if (t > 1e-12 * scale) out.hit = true;
    else if (t > -1e-12 * scale) out.grazing = true;
    return out;
  }
  // Near an edge or vertex of the candidate triangle: only suspicious if the
  // ray actually passes through the neighbourhood of the triangle plane.
  if (u > -kBaryEps && v > -kBaryEps && (u + v) < 1.0 + kBaryEps && t > -1e-12 * scale)
    out.grazing = true;
  return out;
}

}  // namespace

BoundaryMesh::BoundaryMesh(std::vector<Vec3> vertices, const std::vector<Face>& faces,
                           const std::vector<Impedance>& impedances) {
  if (faces.size() != impedances.size())
    throw GeometryError("BoundaryMesh: impedance count does not match element count");
  if (faces.empty()) throw GeometryError("BoundaryMesh: empty element list");
  vertices_ = std::move(vertices);

  elements_.reserve(faces.size());
  std::vector<double> longest;
  longest.reserve(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const auto& f = faces[i];
    for (int k = 0; k < 3; ++k)
      if (f.vertex[k] >= vertices_.size())
        throw GeometryError("BoundaryMesh: element " + std::to_string(i) +
                            " references vertex index out of range");
    const Vec3 a = vertices_[f.vertex[0]];
    const Vec3 b = vertices_[f.vertex[1]];
    const Vec3 c = vertices_[f.vertex[2]];
    const Vec3 cross = (b - a).cross(c - a);
    const double area = 0.5 * cross.norm();
    const double diam = longest_edge(a, b, c);
    if (!(area > 1e-12 * diam * diam) || diam == 0.0)
      throw GeometryError("BoundaryMesh: degenerate (zero-area) triangle, element " +
                          std::to_string(i));
    TriangleElement e{f.vertex, (a + b + c) / 3.0, area, cross / cross.norm(),
                      diam, impedances[i], f.group};
    elements_.push_back(std::move(e));
    total_area_ += area;
    longest.push_back(diam);
    max_diameter_ = std::max(max_diameter_, diam);
  }

  std::sort(longest.begin(), longest.end());
  const std::size_t n = longest.size();
  median_longest_edge_ = (n % 2 == 1) ? longest[n / 2] : 0.5 * (longest[n / 2 - 1] + longest[n / 2]);

  // Closed iff every undirected edge is shared by exactly two triangles.
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_count;
  for (const auto& e : elements_) {
    for (int k = 0; k < 3; ++k) {
      std::uint32_t i = e.vertex[k], j = e.vertex[(k + 1) % 3];
      if (i > j) std::swap(i, j);
      ++edge_count[{i, j}];
    }
  }
  closed_ = std::all_of(edge_count.begin(), edge_count.end(),
                        [](const auto& kv) { return kv.second == 2; });
}

double BoundaryMesh::signed_volume() const {
  double v = 0.0;
  for (const auto& e : elements_) v += e.area * e.centroid.dot(e.normal) / 3.0;
  return v;
}

std::optional<std::size_t> BoundaryMesh::first_misoriented_element() const {
  if (!closed_) throw GeometryError("orientation check requires a closed mesh");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto& e = elements_[i];
    const double step = 1e-3 * std::sqrt(e.area);
    const PointClassification pc = classify(e.centroid + step * e.normal);
    if (pc.cls != PointClass::Interior) return i;
  }
  return std::nullopt;
}

PointClassification BoundaryMesh::classify(const Vec3& point, double boundary_tolerance) const {
  if (!closed_)
    throw GeometryError("classify: point classification requires a closed mesh");
  if (distance_to(point) < boundary_tolerance) return {PointClass::OnBoundary, two_pi};

  const double scale = std::max(1.0, max_diameter_);
  // Fixed-seed direction sequence: deterministic, re-randomized on grazing hits.
  std::mt19937_64 rng(0x5DEECE66Dull);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Vec3 dir(uni(rng), uni(rng), uni(rng));
    const double len = dir.norm();
    if (len < 0.1) continue;
    dir /= len;
    int crossings = 0;
    bool ok = true;
    for (const auto& e : elements_) {
      const RayHit h = ray_triangle(point, dir, vertices_[e.vertex[0]], vertices_[e.vertex[1]],
                                    vertices_[e.vertex[2]], scale);
      if (h.grazing) {
        ok = false;
        break;
      }
      if (h.hit) ++crossings;
    }
    if (!ok) continue;
    return (crossings % 2 == 1) ? PointClassification{PointClass::Interior, four_pi}
                                : PointClassification{PointClass::Exterior, 0.0};
  }
  throw GeometryError("classify: no non-grazing ray found (degenerate configuration)");
}

double BoundaryMesh::distance_to(const Vec3& point) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < elements_.size(); ++i)
    best = std::min(best, distance_to_element(point, i));
  return best;
}

double BoundaryMesh::distance_to_element(const Vec3& point, std::size_t element) const {
  const auto& e = elements_[element];
  const Vec3 q = closest_point_on_triangle(point, vertices_[e.vertex[0]], vertices_[e.vertex[1]],
                                           vertices_[e.vertex[2]]);
  return (point - q).norm();
}

namespace {
void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
}
void fnv_double(std::uint64_t& h, double v) { fnv_bytes(h, &v, sizeof v); }
}  // namespace

std::uint64_t BoundaryMesh::content_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (const auto& v : vertices_) {
    fnv_double(h, v.x());
    fnv_double(h, v.y());
    fnv_double(h, v.z());
  }
  for (const auto& e : elements_) {
    fnv_bytes(h, e.vertex.data(), sizeof(e.vertex));
    fnv_double(h, e.impedance.value());
    fnv_bytes(h, e.group.data(), e.group.size());
  }
  return h;
}

BoundaryMesh make_shoebox(const Vec3& lengths, double target_edge,
                          const std::array<Impedance, 6>& face_impedances) {
  for (int k = 0; k < 3; ++k)
    if (!(lengths[k] > 0.0))
      throw GeometryError("make_shoebox: box dimension " + std::to_string(k) +
                          " must be positive, got " + std::to_string(lengths[k]));
  if (!(target_edge > 0.0))
    throw GeometryError("make_shoebox: target edge must be positive, got " +
                        std::to_string(target_edge));

  std::vector<Vec3> vertices;
  std::map<std::array<double, 3>, std::uint32_t> vertex_index;
  auto vid = [&](const Vec3& p) -> std::uint32_t {
    const std::array<double, 3> key{p.x(), p.y(), p.z()};
    auto it = vertex_index.find(key);
    if (it != vertex_index.end()) return it->second;
    const auto id = static_cast<std::uint32_t>(vertices.size());
    vertices.push_back(p);
    vertex_index.emplace(key, id);
    return id;
  };

  const std::array<int, 3> divisions{static_cast<int>(std::ceil(lengths[0] / target_edge)),
                                     static_cast<int>(std::ceil(lengths[1] / target_edge)),
                                     static_cast<int>(std::ceil(lengths[2] / target_edge))};

  std::vector<BoundaryMesh::Face> faces;
  std::vector<Impedance> impedances;

  struct FaceSpec {
    int fixed_axis;
    double fixed_value;
    bool flip;  // winding flip so the geometric normal points inward
    const char* group;
  };
  // With cyclic in-face axes the unflipped winding normal points along
  // +fixed_axis, which is inward on the low face; high faces flip.
  const std::array<FaceSpec, 6> specs{{{0, 0.0, false, "xmin"},
                                       {0, lengths[0], true, "xmax"},
                                       {1, 0.0, false, "ymin"},
                                       {1, lengths[1], true, "ymax"},
                                       {2, 0.0, false, "zmin"},
                                       {2, lengths[2], true, "zmax"}}};

  for (int fi = 0; fi < 6; ++fi) {
    const FaceSpec& fs = specs[fi];
    const int a1 = (fs.fixed_axis + 1) % 3, a2 = (fs.fixed_axis + 2) % 3;
    const int n1 = divisions[a1], n2 = divisions[a2];
    auto corner = [&](int i, int j) {
      Vec3 p;
      p[fs.fixed_axis] = fs.fixed_value;
      p[a1] = lengths[a1] * static_cast<double>(i) / n1;
      p[a2] = lengths[a2] * static_cast<double>(j) / n2;
      return vid(p);
    };
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        const std::uint32_t p00 = corner(i, j), p10 = corner(i + 1, j);
        const std::uint32_t p11 = corner(i + 1, j + 1), p01 = corner(i, j + 1);
        BoundaryMesh::Face t1{{p00, p10, p11}, fs.group};
        BoundaryMesh::Face t2{{p00, p11, p01}, fs.group};
        if (fs.flip) {
          std::swap(t1.vertex[1], t1.vertex[2]);
          std::swap(t2.vertex[1], t2.vertex[2]);
        }
        faces.push_back(t1);
        faces.push_back(t2);
        impedances.push_back(face_impedances[fi]);
        impedances.push_back(face_impedances[fi]);
      }
    }
  }
  return BoundaryMesh(std::move(vertices), faces, impedances);
}

BoundaryMesh load_mesh(const std::filesystem::path& file, const ImpedanceMap& impedances) {
  std::ifstream in(file);
  if (!in) throw GeometryError("load_mesh: cannot open " + file.string());
  if (!impedances.groups.empty() && !impedances.per_element.empty())
    throw GeometryError("load_mesh: impedance map must be by group or per element, not both");

  std::vector<Vec3> vertices;
  std::vector<BoundaryMesh::Face> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw GeometryError("load_mesh: malformed vertex at line " + std::to_string(line_no));
      vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      long i, j, k;
      std::string group;
      if (!(ss >> i >> j >> k >> group))
        throw GeometryError("load_mesh: malformed face at line " + std::to_string(line_no) +
                            " (expected `f i j k group`)");
      std::string extra;
      if (ss >> extra)
        throw GeometryError("load_mesh: non-triangle face at line " + std::to_string(line_no) +
                            " (only triangles are supported)");
      if (i < 1 || j < 1 || k < 1)
        throw GeometryError("load_mesh: face indices are 1-based, line " + std::to_string(line_no));
      faces.push_back({{static_cast<std::uint32_t>(i - 1), static_cast<std::uint32_t>(j - 1),
                        static_cast<std::uint32_t>(k - 1)},
                       group});
    } else {
      throw GeometryError("load_mesh: unknown record '" + tag + "' at line " +
                          std::to_string(line_no));
    }
  }

  std::vector<Impedance> per_element;
  per_element.reserve(faces.size());
  if (!impedances.per_element.empty()) {
    if (impedances.per_element.size() != faces.size())
      throw GeometryError("load_mesh: per-element impedance list has " +
                          std::to_string(impedances.per_element.size()) + " entries for " +
                          std::to_string(faces.size()) + " elements");
    per_element = impedances.per_element;
  } else {
    std::set<std::string> used;
    for (const auto& f : faces) {
      auto it = impedances.groups.find(f.group);
      if (it == impedances.groups.end())
        throw GeometryError("load_mesh: no impedance assigned to group '" + f.group + "'");
      per_element.push_back(it->second);
      used.insert(f.group);
    }
    for (const auto& [name, z] : impedances.groups)
      if (!used.count(name))
        throw GeometryError("load_mesh: impedance map names unreferenced group '" + name + "'");
  }

  BoundaryMesh mesh(std::move(vertices), faces, per_element);
  if (mesh.is_closed()) {
    if (const auto bad = mesh.first_misoriented_element())
      throw GeometryError("load_mesh: element " + std::to_string(*bad) +
                          " has an outward normal; normals must point into the interior "
                          "(fix the vertex winding in the file)");
  }
  return mesh;
}

void save_mesh(const std::filesystem::path& file, const BoundaryMesh& mesh) {
  std::ofstream out(file);
  if (!out) throw GeometryError("save_mesh: cannot write " + file.string());
  out << "# triangle mesh, " << mesh.vertices().size() << " vertices, " << mesh.size()
      << " elements\n";
  char buf[128];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& e : mesh.elements()) {
    out << "f " << e.vertex[0] + 1 << ' ' << e.vertex[1] + 1 << ' ' << e.vertex[2] + 1 << ' '
        << (e.group.empty() ? "all" : e.group) << '\n';
  }
}

}  // namespace bira
