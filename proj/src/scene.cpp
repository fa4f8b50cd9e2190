#include "bira/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bira/errors.hpp"

namespace bira {

using nlohmann::json;

std::string SceneReport::summary() const {
  std::ostringstream os;
  os << (ok ? "OK" : "FAILED") << ": mesh " << (mesh_closed ? "closed" : "open")
     << ", resolution " << elements_per_wavelength << " elements/wavelength (median edge "
     << median_longest_edge << " m, wavelength " << wavelength << " m), source clearance "
     << source_clearance << " m, min receiver clearance " << min_receiver_clearance << " m";
  for (const auto& w : warnings) os << "\n  warning: " << w;
  for (const auto& f : failures) os << "\n  failure: " << f;
  return os.str();
}

SceneReport validate_scene(const Scene& scene, double max_frequency_hz, double warn_threshold) {
  SceneReport rep;
  rep.mesh_closed = scene.mesh.is_closed();
  rep.median_longest_edge = scene.mesh.median_longest_edge();
  if (max_frequency_hz > 0.0) {
    rep.wavelength = scene.medium.sound_speed / max_frequency_hz;
    rep.elements_per_wavelength = rep.wavelength / rep.median_longest_edge;
    if (rep.elements_per_wavelength < warn_threshold) {
      std::ostringstream os;
      os << "resolution " << rep.elements_per_wavelength << " elements/wavelength at "
         << max_frequency_hz << " Hz is below " << warn_threshold;
      rep.warnings.push_back(os.str());
    }
  }

  auto check_point = [&](const Vec3& p, const std::string& name) -> double {
    const double clearance = scene.mesh.distance_to(p);
    if (rep.mesh_closed) {
      const PointClassification pc = scene.mesh.classify(p);
      if (pc.cls == PointClass::OnBoundary) {
        rep.ok = false;
        rep.failures.push_back(name + " lies on the boundary");
      } else if (pc.cls == PointClass::Exterior) {
        rep.ok = false;
        rep.failures.push_back(name + " lies outside the domain");
      }
    }
    if (clearance < scene.min_clearance) {
      rep.ok = false;
      std::ostringstream os;
      os << name << " clearance " << clearance << " m is below the minimum "
         << scene.min_clearance << " m";
      rep.failures.push_back(os.str());
    }
    return clearance;
  };

  rep.source_clearance = check_point(scene.source, "source");
  rep.min_receiver_clearance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scene.receivers.size(); ++i) {
    const double c = check_point(scene.receivers[i], "receiver " + std::to_string(i));
    rep.min_receiver_clearance = std::min(rep.min_receiver_clearance, c);
  }
  if (scene.receivers.empty()) {
    rep.ok = false;
    rep.failures.push_back("scene has no receivers");
  }
  if (!rep.mesh_closed)
    rep.warnings.push_back("open mesh: interior classification skipped");
  return rep;
}

namespace {
void hash_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
}
void hash_double(std::uint64_t& h, double v) { hash_bytes(h, &v, sizeof v); }
}  // namespace

std::uint64_t scene_hash(const Scene& scene) {
  std::uint64_t h = scene.mesh.content_hash();
  hash_double(h, scene.medium.sound_speed);
  hash_double(h, scene.medium.density);
  for (int k = 0; k < 3; ++k) hash_double(h, scene.source[k]);
  for (const auto& r : scene.receivers)
    for (int k = 0; k < 3; ++k) hash_double(h, r[k]);
  hash_double(h, scene.min_clearance);
  return h;
}

namespace {

Impedance parse_impedance(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "rigid") return Impedance::rigid();
    throw ValidationError("scene: impedance string must be \"rigid\", got \"" +
                          j.get<std::string>() + "\"");
  }
  return Impedance(j.get<double>());
}

Vec3 parse_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError(std::string("scene: ") + what + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

BoundaryMesh parse_mesh(const json& jm, const std::filesystem::path& base_dir) {
  if (jm.contains("shoebox")) {
    const json& jb = jm.at("shoebox");
    const Vec3 lengths = parse_vec3(jb.at("lengths"), "shoebox lengths");
    const double edge = jb.at("target_edge").get<double>();
    if (jb.contains("face_impedances")) {
      const json& jf = jb.at("face_impedances");
      if (!jf.is_array() || jf.size() != 6)
        throw ValidationError("scene: face_impedances must list 6 values");
      std::array<Impedance, 6> z{Impedance::rigid(), Impedance::rigid(), Impedance::rigid(),
                                 Impedance::rigid(), Impedance::rigid(), Impedance::rigid()};
      for (int k = 0; k < 6; ++k) z[k] = parse_impedance(jf[k]);
      return make_shoebox(lengths, edge, z);
    }
    const Impedance z =
        jb.contains("impedance") ? parse_impedance(jb.at("impedance")) : Impedance::rigid();
    return make_shoebox(lengths, edge, z);
  }
  if (jm.contains("file")) {
    std::filesystem::path p = jm.at("file").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    ImpedanceMap imap;
    if (jm.contains("impedance_map")) {
      const json& ji = jm.at("impedance_map");
      if (ji.is_object() && ji.contains("per_element")) {
        for (const auto& z : ji.at("per_element")) imap.per_element.push_back(parse_impedance(z));
      } else if (ji.is_object()) {
        for (auto it = ji.begin(); it != ji.end(); ++it)
          imap.groups.emplace(it.key(), parse_impedance(it.value()));
      } else {
        throw ValidationError("scene: impedance_map must be an object");
      }
    }
    return load_mesh(p, imap);
  }
  throw ValidationError("scene: mesh must specify either \"shoebox\" or \"file\"");
}

}  // namespace

Scene load_scene(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scene: JSON parse error: ") + e.what());
  }
  try {
    BoundaryMesh mesh = parse_mesh(j.at("mesh"), base_dir);
    const json& jm = j.at("medium");
    Medium medium(jm.at("c").get<double>(), jm.at("rho").get<double>());
    Vec3 source = parse_vec3(j.at("source"), "source");
    std::vector<Vec3> receivers;
    for (const auto& r : j.at("receivers")) receivers.push_back(parse_vec3(r, "receiver"));
    Scene scene{std::move(mesh), medium, source, std::move(receivers)};
    if (j.contains("min_clearance")) scene.min_clearance = j.at("min_clearance").get<double>();
    return scene;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scene: ") + e.what());
  }
}

Scene load_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("scene: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scene(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace bira
