// Command-line front end: mesh generation/inspection, frequency sweeps,
// impulse-response synthesis, image-source comparison, and state-space
// diagnostics.
//
// Exit codes: 0 ok, 2 geometry, 3 solve/assembly, 4 scene validation,
// 5 broken symmetry, 6 comparison setup.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bira/assembly.hpp"
#include "bira/errors.hpp"
#include "bira/io.hpp"
#include "bira/oracle.hpp"
#include "bira/parallel.hpp"
#include "bira/response.hpp"
#include "bira/scene.hpp"
#include "bira/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bira;

namespace {

constexpr int kExitGeometry = 2;
constexpr int kExitSolve = 3;
constexpr int kExitValidation = 4;
constexpr int kExitSymmetry = 5;
constexpr int kExitComparison = 6;

struct RunConfig {
  json raw;  // merged config, echoed verbatim into output metadata
  fs::path base_dir = ".";

  Scene scene() const {
    if (!raw.contains("scene")) throw ValidationError("config: missing \"scene\"");
    const json& js = raw.at("scene");
    if (js.is_string()) {
      fs::path p = js.get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      return load_scene_file(p);
    }
    return load_scene(js.dump(), base_dir);
  }

  std::optional<FrequencyGrid> grid() const {
    if (!raw.contains("grid")) return std::nullopt;
    const json& jg = raw.at("grid");
    if (jg.contains("fs") && jg.contains("nfft"))
      return FrequencyGrid(jg.at("fs").get<double>(), jg.at("nfft").get<int>());
    return std::nullopt;
  }

  std::vector<double> frequency_list() const {
    std::vector<double> out;
    if (!raw.contains("grid")) return out;
    const json& jg = raw.at("grid");
    if (jg.contains("frequencies")) {
      for (const auto& f : jg.at("frequencies")) out.push_back(f.get<double>());
    } else if (jg.contains("f_start") && jg.contains("f_stop") && jg.contains("f_step")) {
      const double f0 = jg.at("f_start").get<double>(), f1 = jg.at("f_stop").get<double>(),
                   df = jg.at("f_step").get<double>();
      if (!(df > 0.0)) throw ValidationError("config: f_step must be positive");
      for (double f = f0; f <= f1 + 1e-9 * df; f += df) out.push_back(f);
    }
    return out;
  }

  SweepOptions sweep_options() const {
    SweepOptions opt;
    opt.workers = raw.value("workers", default_workers());
    if (raw.contains("solver")) {
      const json& jsv = raw.at("solver");
      const std::string method = jsv.value("method", "direct");
      if (method == "direct") {
        opt.method = SolveMethod::Direct;
      } else if (method == "neumann") {
        opt.method = SolveMethod::Neumann;
      } else {
        throw ValidationError("config: solver.method must be \"direct\" or \"neumann\"");
      }
      opt.neumann_order = jsv.value("neumann_order", 40);
      opt.assembly.quadrature.gauss_degree = jsv.value("quadrature_degree", 6);
      opt.assembly.quadrature.near_field_threshold = jsv.value("near_field_threshold", 2.0);
      if (jsv.contains("self_rule")) {
        opt.assembly.quadrature.self_radial = jsv.at("self_rule").at(0).get<int>();
        opt.assembly.quadrature.self_angular = jsv.at("self_rule").at(1).get<int>();
      }
      opt.band_limit_hz = jsv.value("band_limit_hz", 0.0);
      opt.allow_underresolved = jsv.value("allow_underresolved", false);
      opt.collect_spectral_radius = jsv.value("collect_spectral_radius", false);
    }
    opt.assembly.workers = opt.workers;
    return opt;
  }

  SpectralWindow window() const {
    SpectralWindow w;
    if (raw.contains("window")) {
      const json& jw = raw.at("window");
      w.enabled = jw.value("enabled", true);
      w.band_limit_hz = jw.value("band_limit_hz", 0.0);
      w.rolloff_fraction = jw.value("rolloff_fraction", 0.2);
    }
    return w;
  }

  fs::path out_dir() const {
    fs::path dir = raw.contains("output") ? raw.at("output").value("directory", ".") : ".";
    if (dir.is_relative()) dir = base_dir / dir;
    fs::create_directories(dir);
    return dir;
  }

  std::string basename(const std::string& fallback) const {
    return raw.contains("output") ? raw.at("output").value("basename", fallback) : fallback;
  }

  std::vector<std::string> formats() const {
    std::vector<std::string> out{"csv"};
    if (raw.contains("output") && raw.at("output").contains("formats")) {
      out.clear();
      for (const auto& f : raw.at("output").at("formats")) out.push_back(f.get<std::string>());
    }
    return out;
  }
};

json load_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ValidationError("config: cannot open " + p.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config: JSON parse error in " + p.string() + ": " + e.what());
  }
  return j;
}

// Deep-merge b into a (b wins): flags override config-file values.
void merge_json(json& a, const json& b) {
  if (!b.is_object() || !a.is_object()) {
    a = b;
    return;
  }
  for (auto it = b.begin(); it != b.end(); ++it) {
    if (a.contains(it.key()))
      merge_json(a[it.key()], it.value());
    else
      a[it.key()] = it.value();
  }
}

json meta_for(const RunConfig& cfg, const Scene& scene, const std::string& command) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(scene_hash(scene)));
  char mesh_hash[32];
  std::snprintf(mesh_hash, sizeof mesh_hash, "%016llx",
                static_cast<unsigned long long>(scene.mesh.content_hash()));
  return json{{"command", command},
              {"config", cfg.raw},
              {"scene_hash", hash},
              {"mesh_hash", mesh_hash},
              {"elements", scene.mesh.size()},
              {"receivers", scene.receivers.size()}};
}

int map_exception(const std::exception& e) {
  std::cerr << "error: " << e.what() << '\n';
  if (dynamic_cast<const GeometryError*>(&e)) return kExitGeometry;
  if (dynamic_cast<const ValidationError*>(&e)) return kExitValidation;
  if (dynamic_cast<const SymmetryError*>(&e)) return kExitSymmetry;
  if (dynamic_cast<const ComparisonError*>(&e)) return kExitComparison;
  if (dynamic_cast<const SolveError*>(&e)) return kExitSolve;
  if (dynamic_cast<const SingularEvaluation*>(&e)) return kExitSolve;
  return 1;
}

std::array<Impedance, 6> parse_face_impedances(const std::string& spec) {
  std::array<Impedance, 6> z{Impedance::rigid(), Impedance::rigid(), Impedance::rigid(),
                             Impedance::rigid(), Impedance::rigid(), Impedance::rigid()};
  if (spec.empty()) return z;
  std::stringstream ss(spec);
  std::string item;
  std::vector<std::string> items;
  while (std::getline(ss, item, ',')) items.push_back(item);
  auto parse_one = [](const std::string& s) {
    return s == "rigid" ? Impedance::rigid() : Impedance(std::stod(s));
  };
  if (items.size() == 1) {
    z.fill(parse_one(items[0]));
  } else if (items.size() == 6) {
    for (int k = 0; k < 6; ++k) z[static_cast<std::size_t>(k)] = parse_one(items[k]);
  } else {
    throw GeometryError("mesh: impedance list must have 1 or 6 entries");
  }
  return z;
}

void print_mesh_report(const BoundaryMesh& mesh) {
  std::cout << "N=" << mesh.size() << ", area=" << mesh.total_area()
            << ", median_edge=" << mesh.median_longest_edge()
            << ", closed=" << (mesh.is_closed() ? "yes" : "no");
  if (mesh.is_closed()) {
    std::cout << ", volume=" << -mesh.signed_volume() << ", orientation=ok";
  }
  std::cout << '\n';
}

int cmd_mesh(const std::string& shoebox, double edge, const std::string& impedance,
             const std::string& inspect, const std::string& impedance_map_path,
             const std::string& out_path) {
  if (!shoebox.empty()) {
    std::stringstream ss(shoebox);
    std::string item;
    std::vector<double> dims;
    while (std::getline(ss, item, ',')) dims.push_back(std::stod(item));
    if (dims.size() != 3) throw GeometryError("mesh: --shoebox expects Lx,Ly,Lz");
    BoundaryMesh mesh =
        make_shoebox(Vec3(dims[0], dims[1], dims[2]), edge, parse_face_impedances(impedance));
    if (const auto bad = mesh.first_misoriented_element())
      throw GeometryError("mesh: generated element " + std::to_string(*bad) +
                          " misoriented (internal error)");
    print_mesh_report(mesh);
    if (!out_path.empty()) {
      save_mesh(out_path, mesh);
      std::cout << "wrote " << out_path << '\n';
    }
    return 0;
  }
  if (!inspect.empty()) {
    ImpedanceMap imap;
    if (!impedance_map_path.empty()) {
      const json j = load_json_file(impedance_map_path);
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_string() && it.value().get<std::string>() == "rigid")
          imap.groups.emplace(it.key(), Impedance::rigid());
        else
          imap.groups.emplace(it.key(), Impedance(it.value().get<double>()));
      }
    } else {
      imap.groups.emplace("all", Impedance::rigid());
    }
    BoundaryMesh mesh = load_mesh(inspect, imap);
    print_mesh_report(mesh);
    return 0;
  }
  throw GeometryError("mesh: nothing to do (use --shoebox or --inspect)");
}

int cmd_sweep(const RunConfig& cfg) {
  const Scene scene = cfg.scene();
  const SweepOptions opts = cfg.sweep_options();
  TransferFunction tf;
  if (const auto grid = cfg.grid()) {
    tf = sweep(scene, *grid, opts);
  } else {
    const std::vector<double> freqs = cfg.frequency_list();
    if (freqs.empty())
      throw ValidationError("config: grid must give {fs, nfft}, {f_start, f_stop, f_step} or "
                            "{frequencies}");
    tf = sweep_frequencies(scene, freqs, opts);
  }
  const fs::path dir = cfg.out_dir();
  const std::string base = cfg.basename("sweep");
  write_transfer_csv(dir / (base + "_tf.csv"), tf);
  write_diagnostics_csv(dir / (base + "_diag.csv"), tf);
  json meta = meta_for(cfg, scene, "sweep");
  meta["method"] = tf.method;
  meta["dc_surrogate_hz"] = tf.dc_surrogate_hz;
  write_text(dir / (base + "_meta.json"), meta.dump(2) + "\n");
  std::cout << "wrote " << (dir / (base + "_tf.csv")).string() << " ("
            << tf.values.cols() << " bins, " << tf.values.rows() << " receivers)\n";
  return 0;
}

int cmd_rir(const RunConfig& cfg) {
  const Scene scene = cfg.scene();
  const auto grid = cfg.grid();
  if (!grid) throw ValidationError("rir: grid must give {fs, nfft}");
  SweepOptions opts = cfg.sweep_options();
  const SpectralWindow window = cfg.window();
  if (opts.band_limit_hz == 0.0 && window.enabled && window.band_limit_hz > 0.0)
    opts.band_limit_hz = window.band_limit_hz;
  const TransferFunction tf = sweep(scene, *grid, opts);
  const ImpulseResponse ir = to_impulse_response(tf, window);

  const fs::path dir = cfg.out_dir();
  const std::string base = cfg.basename("rir");
  const auto formats = cfg.formats();
  write_transfer_csv(dir / (base + "_tf.csv"), tf);
  write_diagnostics_csv(dir / (base + "_diag.csv"), tf);
  if (std::find(formats.begin(), formats.end(), "csv") != formats.end())
    write_impulse_csv(dir / (base + "_ir.csv"), ir);
  if (std::find(formats.begin(), formats.end(), "wav") != formats.end())
    write_impulse_wav(dir / (base + "_ir"), ir);
  json meta = meta_for(cfg, scene, "rir");
  meta["method"] = tf.method;
  meta["imag_energy_ratio"] = ir.imag_energy_ratio;
  meta["window"] = {{"enabled", window.enabled},
                    {"band_limit_hz", window.band_limit_hz},
                    {"rolloff_fraction", window.rolloff_fraction}};
  write_text(dir / (base + "_meta.json"), meta.dump(2) + "\n");
  std::cout << "wrote impulse responses under " << dir.string() << '\n';
  return 0;
}

// Shoebox parameters of the configured scene; comparison setup error if the
// scene does not come from a shoebox description.
Vec3 require_shoebox(const RunConfig& cfg) {
  try {
    const json& jb = cfg.raw.at("scene").at("mesh").at("shoebox").at("lengths");
    return Vec3(jb.at(0).get<double>(), jb.at(1).get<double>(), jb.at(2).get<double>());
  } catch (const json::exception&) {
    throw ComparisonError("compare-ism: scene must be described as a shoebox");
  }
}

int cmd_compare_ism(const RunConfig& cfg, int orders, bool do_rir) {
  const Vec3 lengths = require_shoebox(cfg);
  const Scene scene = cfg.scene();
  std::array<double, 6> refl{1, 1, 1, 1, 1, 1};
  if (cfg.raw.contains("compare") && cfg.raw.at("compare").contains("reflection_coefficients")) {
    const json& jr = cfg.raw.at("compare").at("reflection_coefficients");
    if (jr.size() != 6) throw ComparisonError("compare-ism: need 6 reflection coefficients");
    for (int k = 0; k < 6; ++k) refl[static_cast<std::size_t>(k)] = jr.at(k).get<double>();
  }
  const fs::path dir = cfg.out_dir();
  const std::string base = cfg.basename("compare");
  const SweepOptions opts = cfg.sweep_options();

  if (do_rir) {
    const auto grid = cfg.grid();
    if (!grid) throw ValidationError("compare-ism --rir: grid must give {fs, nfft}");
    const SpectralWindow window = cfg.window();
    SweepOptions sw = opts;
    if (sw.band_limit_hz == 0.0 && window.enabled && window.band_limit_hz > 0.0)
      sw.band_limit_hz = window.band_limit_hz;
    const TransferFunction tf = sweep(scene, *grid, sw);
    const ImpulseResponse ir = to_impulse_response(tf, window);
    const TransferFunction tf_ism =
        ism_shoebox(lengths, scene.source, scene.receivers, orders, refl, scene.medium, *grid);
    const ImpulseResponse ir_ism = to_impulse_response(tf_ism, window);

    // Per-arrival deltas: peak sample and amplitude near each expected image
    // arrival, receiver 0.
    const auto images = ism_images(lengths, scene.source, orders, refl);
    std::ostringstream csv;
    csv << "order,expected_sample,bioss_peak_sample,ism_peak_sample,bioss_amp,ism_amp\n";
    const int n = grid->nfft;
    const int search = 5;
    for (const auto& img : images) {
      const double r = (scene.receivers[0] - img.position).norm();
      const int expected = static_cast<int>(std::lround(r * grid->fs / scene.medium.sound_speed));
      if (expected >= n - search) continue;
      auto peak_near = [&](const ImpulseResponse& h) {
        int best = std::max(0, expected - search);
        for (int i = best; i <= std::min(n - 1, expected + search); ++i)
          if (std::abs(h.samples(0, i)) > std::abs(h.samples(0, best))) best = i;
        return best;
      };
      const int pb = peak_near(ir), pi = peak_near(ir_ism);
      csv << img.order << ',' << expected << ',' << pb << ',' << pi << ','
          << format_double(ir.samples(0, pb)) << ',' << format_double(ir_ism.samples(0, pi))
          << '\n';
    }
    write_text(dir / (base + "_arrivals.csv"), csv.str());
    write_impulse_csv(dir / (base + "_bioss_ir.csv"), ir);
    write_impulse_csv(dir / (base + "_ism_ir.csv"), ir_ism);
    json meta = meta_for(cfg, scene, "compare-ism");
    meta["orders"] = orders;
    write_text(dir / (base + "_meta.json"), meta.dump(2) + "\n");
    std::cout << "wrote " << (dir / (base + "_arrivals.csv")).string() << '\n';
    return 0;
  }

  const std::vector<double> freqs = cfg.frequency_list();
  if (freqs.empty())
    throw ValidationError("compare-ism: grid must give {f_start, f_stop, f_step} or {frequencies}");

  // Scattered-field comparison: BIOSS series terms up to `orders` against
  // image-source reflections of order 1..orders (order 0 is the shared
  // direct path). With --orders 0 both sides reduce to the direct path.
  GeometryCache cache(scene.mesh, opts.assembly.quadrature);
  std::ostringstream csv;
  csv << "freq_hz,bioss_re,bioss_im,ism_re,ism_im,rel_err,phase_err\n";
  double max_rel = 0.0;
  const CMatrix ism_all = ism_response(lengths, scene.source, scene.receivers, orders, refl,
                                       scene.medium, freqs);
  const CMatrix ism_direct =
      ism_response(lengths, scene.source, scene.receivers, 0, refl, scene.medium, freqs);
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const LaplacePoint s = LaplacePoint::from_frequency(freqs[i]);
    Complex bioss;
    if (orders == 0) {
      bioss = assemble_D(scene.receivers, scene.source, s, scene.medium)(0);
    } else {
      OperatorSet ops = assemble_operator_set(scene, s, opts.assembly, &cache);
      const auto markov = markov_parameters(ops, orders);
      Complex scattered(0.0, 0.0);
      for (const auto& mk : markov) scattered += mk(0);
      bioss = scattered;
    }
    const Complex ism = (orders == 0)
                            ? ism_direct(0, static_cast<Eigen::Index>(i))
                            : ism_all(0, static_cast<Eigen::Index>(i)) -
                                  ism_direct(0, static_cast<Eigen::Index>(i));
    const double rel = std::abs(bioss - ism) / std::max(1e-300, std::abs(ism));
    const double phase = std::abs(std::arg(bioss / ism));
    max_rel = std::max(max_rel, rel);
    csv << format_double(freqs[i]) << ',' << format_double(bioss.real()) << ','
        << format_double(bioss.imag()) << ',' << format_double(ism.real()) << ','
        << format_double(ism.imag()) << ',' << format_double(rel) << ',' << format_double(phase)
        << '\n';
  }
  write_text(dir / (base + "_compare.csv"), csv.str());
  json meta = meta_for(cfg, scene, "compare-ism");
  meta["orders"] = orders;
  meta["max_rel_err"] = max_rel;
  write_text(dir / (base + "_meta.json"), meta.dump(2) + "\n");
  std::cout << "max relative error " << max_rel << ", wrote "
            << (dir / (base + "_compare.csv")).string() << '\n';
  return 0;
}

int cmd_diagnostics(const RunConfig& cfg, const std::string& freq_list, int order_count,
                    const std::string& dump_operators) {
  const Scene scene = cfg.scene();
  std::vector<double> freqs;
  {
    std::stringstream ss(freq_list);
    std::string item;
    while (std::getline(ss, item, ',')) freqs.push_back(std::stod(item));
  }
  if (freqs.empty()) freqs = cfg.frequency_list();
  if (freqs.empty()) throw ValidationError("diagnostics: no frequencies given (--freqs)");

  const SweepOptions opts = cfg.sweep_options();
  const fs::path dir = cfg.out_dir();
  const std::string base = cfg.basename("diag");
  GeometryCache cache(scene.mesh, opts.assembly.quadrature);

  bool all_ok = true;
  for (double f : freqs) {
    const LaplacePoint s = LaplacePoint::from_frequency(f);
    const OperatorSet ops = assemble_operator_set(scene, s, opts.assembly, &cache);
    if (!dump_operators.empty()) {
      const std::string tag = base + "_f" + std::to_string(f);
      if (dump_operators == "binary") {
        write_operator_binary(dir / tag, ops);
      } else if (dump_operators == "csv") {
        write_matrix_csv(dir / (tag + "_A.csv"), ops.A);
        write_vector_csv(dir / (tag + "_B.csv"), ops.B);
        write_matrix_csv(dir / (tag + "_C.csv"), ops.C);
        write_vector_csv(dir / (tag + "_D.csv"), ops.D);
      } else {
        throw ValidationError("diagnostics: --dump-operators must be csv or binary");
      }
    }
    const int k = order_count > 0
                      ? order_count
                      : static_cast<int>(std::min<Eigen::Index>(ops.state_size(), 256));
    const auto markov = markov_parameters(ops, k);
    const RankedMatrix obs = observability_matrix(ops, k);
    const RankedMatrix ctrl = controllability_matrix(ops, k);

    const std::string tag = base + "_f" + std::to_string(f);
    CMatrix mk(markov[0].size(), static_cast<Eigen::Index>(markov.size()));
    for (std::size_t i = 0; i < markov.size(); ++i)
      mk.col(static_cast<Eigen::Index>(i)) = markov[i];
    write_matrix_csv(dir / (tag + "_markov.csv"), mk);
    write_matrix_csv(dir / (tag + "_observability.csv"), obs.matrix);
    write_matrix_csv(dir / (tag + "_controllability.csv"), ctrl.matrix);
    {
      std::ostringstream sv;
      sv << "observability,controllability\n";
      const std::size_t rows = std::max(obs.singular_values.size(), ctrl.singular_values.size());
      for (std::size_t i = 0; i < rows; ++i) {
        if (i < obs.singular_values.size()) sv << format_double(obs.singular_values[i]);
        sv << ',';
        if (i < ctrl.singular_values.size()) sv << format_double(ctrl.singular_values[i]);
        sv << '\n';
      }
      write_text(dir / (tag + "_singular_values.csv"), sv.str());
    }

    // Consistency identities of the stacked operators.
    const CVector markov0 = markov[0];
    const CVector cb = ops.C * ops.B;
    const bool id1 = markov0 == cb;
    double max_obs_err = 0.0, max_ctrl_err = 0.0;
    const Eigen::Index m = ops.receiver_count();
    for (int kk = 0; kk < k; ++kk) {
      const CVector via_obs = obs.matrix.middleRows(kk * m, m) * ops.B;
      const CVector via_ctrl = ops.C * ctrl.matrix.col(kk);
      const double scale = std::max(1e-300, markov[static_cast<std::size_t>(kk)].norm());
      max_obs_err =
          std::max(max_obs_err, (via_obs - markov[static_cast<std::size_t>(kk)]).norm() / scale);
      max_ctrl_err =
          std::max(max_ctrl_err, (via_ctrl - markov[static_cast<std::size_t>(kk)]).norm() / scale);
    }
    const bool id2 = max_obs_err < 1e-13, id3 = max_ctrl_err < 1e-13;
    all_ok = all_ok && id1 && id2 && id3;
    std::cout << "f=" << f << " Hz: markov0==CB " << (id1 ? "PASS" : "FAIL")
              << ", observability-block identity " << (id2 ? "PASS" : "FAIL") << " ("
              << max_obs_err << "), controllability-column identity " << (id3 ? "PASS" : "FAIL")
              << " (" << max_ctrl_err << "), ranks " << obs.numerical_rank << "/"
              << ctrl.numerical_rank << '\n';
  }
  json meta = meta_for(cfg, scene, "diagnostics");
  meta["order_count"] = order_count;
  write_text(dir / (base + "_meta.json"), meta.dump(2) + "\n");
  return all_ok ? 0 : kExitSolve;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary-integral room acoustics engine"};
  app.require_subcommand(1);

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "generate or inspect boundary meshes");
  std::string shoebox, impedance, inspect, impedance_map, mesh_out;
  double edge = 0.0;
  mesh_cmd->add_option("--shoebox", shoebox, "box dimensions Lx,Ly,Lz (m)");
  mesh_cmd->add_option("--edge", edge, "target element edge (m)");
  mesh_cmd->add_option("--impedance", impedance, "face impedance: Z | rigid | 6 comma-separated");
  mesh_cmd->add_option("--inspect", inspect, "mesh file to inspect");
  mesh_cmd->add_option("--impedances", impedance_map, "JSON impedance map for --inspect");
  mesh_cmd->add_option("--out", mesh_out, "write the generated mesh here");

  // shared config + overrides
  std::string config_path;
  std::vector<std::string> sets;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration JSON");
    cmd->add_option("--set", sets,
                    "override a config entry, e.g. --set solver.method=neumann (flags win)");
  };

  auto* sweep_cmd = app.add_subcommand("sweep", "frequency sweep to transfer functions");
  add_common(sweep_cmd);
  auto* rir_cmd = app.add_subcommand("rir", "sweep plus impulse-response synthesis");
  add_common(rir_cmd);
  auto* cmp_cmd = app.add_subcommand("compare-ism", "compare against the image-source model");
  add_common(cmp_cmd);
  int cmp_orders = 1;
  bool cmp_rir = false;
  cmp_cmd->add_option("--orders", cmp_orders, "reflection orders to compare (0 = direct only)");
  cmp_cmd->add_flag("--rir", cmp_rir, "compare impulse-response arrivals instead of spectra");
  auto* diag_cmd = app.add_subcommand("diagnostics", "Markov/observability/controllability dumps");
  add_common(diag_cmd);
  std::string diag_freqs, diag_dump;
  int diag_k = 0;
  diag_cmd->add_option("--freqs", diag_freqs, "comma-separated frequencies (Hz)");
  diag_cmd->add_option("--K", diag_k, "stack depth (default min(N, 256))");
  diag_cmd->add_option("--dump-operators", diag_dump,
                       "also dump the assembled A/B/C/D per frequency: csv | binary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mesh_cmd->parsed())
      return cmd_mesh(shoebox, edge, impedance, inspect, impedance_map, mesh_out);

    RunConfig cfg;
    if (!config_path.empty()) {
      cfg.raw = load_json_file(config_path);
      cfg.base_dir = fs::path(config_path).parent_path();
      if (cfg.base_dir.empty()) cfg.base_dir = ".";
    } else {
      cfg.raw = json::object();
    }
    // --set key.path=value overrides (flags win over the config file).
    for (const std::string& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ValidationError("--set expects key.path=value, got " + kv);
      json patch;
      json* node = &patch;
      std::string keypath = kv.substr(0, eq);
      std::stringstream ss(keypath);
      std::string part;
      std::vector<std::string> parts;
      while (std::getline(ss, part, '.')) parts.push_back(part);
      for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &((*node)[parts[i]]);
      const std::string value = kv.substr(eq + 1);
      json parsed;
      try {
        parsed = json::parse(value);
      } catch (const json::exception&) {
        parsed = value;  // plain string
      }
      (*node)[parts.back()] = parsed;
      merge_json(cfg.raw, patch);
    }

    if (sweep_cmd->parsed()) return cmd_sweep(cfg);
    if (rir_cmd->parsed()) return cmd_rir(cfg);
    if (cmp_cmd->parsed()) return cmd_compare_ism(cfg, cmp_orders, cmp_rir);
    if (diag_cmd->parsed()) return cmd_diagnostics(cfg, diag_freqs, diag_k, diag_dump);
  } catch (const std::exception& e) {
    return map_exception(e);
  }
  return 0;
}
