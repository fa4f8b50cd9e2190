#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bira/mesh.hpp"
#include "bira/medium.hpp"
#include "bira/types.hpp"

namespace bira {

/// Acoustic scene: boundary, medium, one source, one or more receivers.
/// Immutable after construction; share freely across workers.
struct Scene {
  BoundaryMesh mesh;
  Medium medium;
  Vec3 source;
  std::vector<Vec3> receivers;
  double min_clearance = 1e-3;  // m, minimum source/receiver distance from the boundary
};

struct SceneReport {
  bool ok = true;
  bool mesh_closed = false;
  double wavelength = 0.0;
  double median_longest_edge = 0.0;
  double elements_per_wavelength = 0.0;
  double source_clearance = 0.0;
  double min_receiver_clearance = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;

  std::string summary() const;
};

/// Physical and numerical sanity report for a scene at the highest frequency
/// of interest. Resolution below `warn_threshold` elements per wavelength
/// produces a warning; only invariant violations (points outside the domain,
/// on the boundary, or closer than the clearance) mark the report failed.
/// On open meshes the interior classification is skipped and noted.
SceneReport validate_scene(const Scene& scene, double max_frequency_hz,
                           double warn_threshold = 4.0);

std::uint64_t scene_hash(const Scene& scene);

/// Loads a scene from its JSON description:
///   {"mesh": {"shoebox": {"lengths": [Lx,Ly,Lz], "target_edge": e,
///             "face_impedances": [...6 of number|"rigid"] | "impedance": ...}}
///          | {"file": "room.mesh", "impedance_map": {group: number|"rigid"}
///             | {"per_element": [...]}},
///    "medium": {"c": 343.0, "rho": 1.21},
///    "source": [x,y,z],
///    "receivers": [[x,y,z], ...],
///    "min_clearance": 1e-3}
/// Relative mesh paths resolve against `base_dir`.
Scene load_scene(const std::string& json_text, const std::filesystem::path& base_dir = ".");
Scene load_scene_file(const std::filesystem::path& path);

}  // namespace bira
