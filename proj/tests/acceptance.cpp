// Acceptance suite: one self-contained check per engine-level criterion,
// each printing a single [PASS]/[FAIL] line (plus indented measurements).
// Run everything, or a subset with --only AC-3 [--only AC-7 ...].

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bira/assembly.hpp"
#include "bira/dft.hpp"
#include "bira/errors.hpp"
#include "bira/oracle.hpp"
#include "bira/response.hpp"
#include "bira/scene.hpp"
#include "bira/solver.hpp"

using namespace bira;

namespace {

const Medium kAir(343.0, 1.21);

struct Check {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "  ok   " : "  FAIL ") + what);
  }
  void note(const std::string& what) { notes.push_back("       " + what); }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// AC-1: free-field exactness of the direct path and its synthesized impulse.
void ac1(Check& c) {
  std::mt19937_64 rng(20240811);
  // Room-acoustics scale: omega R / c stays small enough that the reference
  // product's own rounding sits below the 1e-12 gate.
  std::uniform_real_distribution<double> ur(0.1, 10.0), uf(0.0, 2000.0), dir(-1.0, 1.0);
  double max_mag_err = 0.0, max_phase_err = 0.0;
  for (int i = 0; i < 100; ++i) {
    Vec3 d(dir(rng), dir(rng), dir(rng));
    if (d.norm() < 0.1) {
      --i;
      continue;
    }
    d.normalize();
    const double r = ur(rng);
    const double omega = two_pi * uf(rng);
    const Vec3 src(0.2, -0.4, 1.0);
    const Vec3 rcv = src + r * d;
    const Complex v = incident_receiver(rcv, src, {0.0, omega}, kAir);
    max_mag_err = std::max(max_mag_err, std::abs(std::abs(v) * r - 1.0));
    const double phase_err =
        std::abs(std::remainder(std::arg(v) + omega * r / kAir.sound_speed, two_pi));
    max_phase_err = std::max(max_phase_err, phase_err);
  }
  c.require(max_mag_err <= 1e-12, fmt("|D|*R - 1 <= 1e-12 over 100 samples (max %.2e)", max_mag_err));
  c.require(max_phase_err <= 1e-12,
            fmt("phase + omega R / c = 0 (mod 2 pi) <= 1e-12 (max %.2e)", max_phase_err));

  // Synthesized direct-path impulse: R = 1.715 m at fs = 2000 Hz arrives on
  // sample 10 exactly; amplitude within 2% of 1/R after calibrating the
  // spectral-window loss on the pure-delay case.
  const FrequencyGrid grid(2000.0, 512);
  const double r = 1.715;
  const Vec3 src(0, 0, 0), rcv(r, 0, 0);
  TransferFunction direct, delay;
  direct.grid = delay.grid = grid;
  direct.values.resize(1, grid.bin_count());
  delay.values.resize(1, grid.bin_count());
  for (int k = 0; k < grid.bin_count(); ++k) {
    const LaplacePoint s = LaplacePoint::from_frequency(grid.frequency(k));
    direct.values(0, k) = incident_receiver(rcv, src, s, kAir);
    delay.values(0, k) = r * direct.values(0, k);
  }
  const SpectralWindow window;  // default raised cosine over the top 20%
  const ImpulseResponse ir = to_impulse_response(direct, window);
  const ImpulseResponse cal = to_impulse_response(delay, window);
  Eigen::Index peak, cal_peak;
  ir.samples.row(0).cwiseAbs().maxCoeff(&peak);
  cal.samples.row(0).cwiseAbs().maxCoeff(&cal_peak);
  const double loss = cal.samples(0, cal_peak);
  const double amplitude = ir.samples(0, peak) / loss;
  c.require(peak == std::lround(r * grid.fs / kAir.sound_speed),
            fmt("impulse peak at sample %ld (expected %ld)", long(peak),
                std::lround(r * grid.fs / kAir.sound_speed)));
  c.require(std::abs(amplitude - 1.0 / r) <= 0.02 / r,
            fmt("calibrated amplitude %.6f within 2%% of 1/R = %.6f (window loss %.4f)",
                amplitude, 1.0 / r, loss));
}

// ---------------------------------------------------------------------------
// AC-2: first-order boundary term against the specular reflection off a
// large rigid plate (asymptotic equivalence regime).
void ac2(Check& c) {
  const double plate = 10.0;
  const double edge = kAir.sound_speed / 343.0 / 6.0;  // 6 elements/wavelength at 343 Hz
  const int n = static_cast<int>(std::ceil(plate / edge));
  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      verts.emplace_back(-plate / 2 + plate * i / n, -plate / 2 + plate * j / n, 0.0);
  auto vid = [&](int i, int j) { return static_cast<std::uint32_t>(i * (n + 1) + j); };
  std::vector<BoundaryMesh::Face> faces;
  faces.reserve(static_cast<std::size_t>(2 * n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      faces.push_back({{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)}, "plate"});
      faces.push_back({{vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)}, "plate"});
    }
  const BoundaryMesh mesh(verts, faces, std::vector<Impedance>(faces.size(), Impedance::rigid()));
  c.note(fmt("plate mesh N=%zu (edge %.4f m)", mesh.size(), edge));

  const Vec3 src(0, 0, 1), rcv(0, 0, 2);
  const AxisPlane plane{2, 0.0};
  AssemblyOptions opts;
  opts.workers = 2;
  const GeometryCache cache(mesh, opts.quadrature);
  double max_mag = 0.0, max_phase = 0.0;
  for (double f = 200.0; f <= 343.0 + 1e-9; f += 6.5) {
    const LaplacePoint s = LaplacePoint::from_frequency(f);
    const CVector B = assemble_B(mesh, src, s, kAir, opts, &cache);
    const CMatrix C = assemble_C(mesh, {rcv}, kAir, s, opts, &cache);
    const Complex cb = (C * B)(0);
    const Complex ref = plate_first_order(src, rcv, plane, s.omega, kAir);
    max_mag = std::max(max_mag, std::abs(std::abs(cb) - std::abs(ref)) / std::abs(ref));
    max_phase = std::max(max_phase, std::abs(std::arg(cb / ref)));
  }
  c.require(max_mag < 0.10,
            fmt("first-order term magnitude error %.2f%% < 10%% over 200-343 Hz", 100 * max_mag));
  c.require(max_phase < 0.2, fmt("phase error %.4f rad < 0.2 rad", max_phase));
}

// ---------------------------------------------------------------------------
// AC-3: modal detection through sigma_min(I - A) on the rigid shoebox.
void ac3(Check& c) {
  Scene scene{make_shoebox(Vec3(2, 1.5, 1), 0.25, Impedance::rigid()), kAir,
              Vec3(0.52, 0.41, 0.33), {Vec3(1.51, 1.08, 0.66)}};
  c.note(fmt("mesh N=%zu", scene.mesh.size()));
  std::vector<double> freqs;
  for (double f = 60.0; f <= 120.0 + 1e-9; f += 1.0) freqs.push_back(f);
  SweepOptions opts;
  opts.workers = 2;
  const TransferFunction tf = sweep_frequencies(scene, freqs, opts);
  double best_f = 0.0, best_sigma = std::numeric_limits<double>::infinity();
  for (const auto& d : tf.diagnostics) {
    if (d.sigma_min < best_sigma) {
      best_sigma = d.sigma_min;
      best_f = d.frequency;
    }
  }
  const auto modes = rigid_box_modes(Vec3(2, 1.5, 1), kAir, 200.0);
  const double f_expect = modes.front().frequency;  // 85.75 Hz
  c.note(fmt("sigma_min minimized at %.1f Hz (sigma %.3e); first analytic mode %.2f Hz", best_f,
             best_sigma, f_expect));
  c.require(std::abs(best_f - f_expect) <= 0.05 * f_expect,
            fmt("detected mode within 5%% of %.2f Hz", f_expect));
}

// ---------------------------------------------------------------------------
// AC-4: truncated-series convergence bound on the matched-impedance cube.
void ac4(Check& c) {
  Scene scene{make_shoebox(Vec3(1, 1, 1), 0.25, Impedance(kAir.density * kAir.sound_speed)), kAir,
              Vec3(0.3, 0.4, 0.5), {Vec3(0.7, 0.6, 0.5)}};
  AssemblyOptions opts;
  opts.workers = 2;
  const GeometryCache cache(scene.mesh, opts.quadrature);

  const std::vector<double> freqs{50.0, 120.0, 200.0, 300.0, 400.0};
  std::vector<double> rho_values;
  int compliant = 0;
  for (double f : freqs) {
    const OperatorSet ops =
        assemble_operator_set(scene, LaplacePoint::from_frequency(f), opts, &cache);
    const SpectralRadiusEstimate rho = spectral_radius(ops.A);
    rho_values.push_back(rho.value);
    c.note(fmt("f = %5.1f Hz: converged spectral radius estimate %.4f", f, rho.value));
    if (rho.converged && rho.value < 0.9) {
      ++compliant;
      const StateSolution direct = solve_direct(ops, Complex(1.0, 0.0));
      for (int K : {5, 10, 20, 40}) {
        const NeumannResult res = solve_neumann(ops, Complex(1.0, 0.0), K);
        const double err = (res.solution.p - direct.p).norm() / direct.p.norm();
        c.require(err <= 10.0 * std::pow(rho.value, K + 1),
                  fmt("f = %.1f Hz, K = %d: error %.3e <= 10 rho^%d", f, K, err, K + 1));
      }
    }
  }
  // Exhaustive scan of the admissible band for any compliant frequency.
  double min_rho = std::numeric_limits<double>::infinity(), min_rho_f = 0.0;
  for (double f = 50.0; f <= 400.0 + 1e-9; f += 2.0) {
    const CMatrix A = assemble_A(scene.mesh, kAir, LaplacePoint::from_frequency(f), opts, &cache);
    const double r = spectral_radius(A).value;
    if (r < min_rho) {
      min_rho = r;
      min_rho_f = f;
    }
  }
  c.note(fmt("band scan 50-400 Hz (2 Hz steps): min spectral radius %.4f at %.0f Hz", min_rho,
             min_rho_f));
  c.require(compliant == 5,
            fmt("%d of 5 pinned frequencies meet the rho < 0.9 precondition "
                "(constant-mode eigenvalue is anchored near 1 by the solid-angle identity; "
                "absorption enters at second order in omega - see the truncated-series unit "
                "tests for the bound verified on contractive operators)",
                compliant));
}

// ---------------------------------------------------------------------------
// AC-5: conjugate symmetry of operators, solutions and responses; realness
// of synthesized impulse responses.
void ac5(Check& c) {
  Scene scene{make_shoebox(Vec3(1, 1, 1), 0.25, Impedance(415.03)), kAir, Vec3(0.3, 0.4, 0.5),
              {Vec3(0.7, 0.6, 0.5)}};
  AssemblyOptions opts;
  opts.workers = 2;
  double worst_ops = 0.0, worst_sol = 0.0;
  for (double f : {47.0, 171.5, 333.0}) {
    const LaplacePoint sp = LaplacePoint::from_frequency(f);
    const OperatorSet plus = assemble_operator_set(scene, sp, opts);
    const OperatorSet minus = assemble_operator_set(scene, sp.conjugate(), opts);
    const double scale = plus.A.cwiseAbs().maxCoeff();
    worst_ops = std::max(worst_ops,
                         (minus.A - plus.A.conjugate()).cwiseAbs().maxCoeff() / scale);
    worst_ops = std::max(worst_ops, (minus.B - plus.B.conjugate()).cwiseAbs().maxCoeff() /
                                        plus.B.cwiseAbs().maxCoeff());
    worst_ops = std::max(worst_ops, (minus.C - plus.C.conjugate()).cwiseAbs().maxCoeff() /
                                        plus.C.cwiseAbs().maxCoeff());
    worst_ops = std::max(worst_ops, (minus.D - plus.D.conjugate()).cwiseAbs().maxCoeff() /
                                        plus.D.cwiseAbs().maxCoeff());
    const StateSolution solp = solve_direct(plus, Complex(1.0, 0.0));
    const StateSolution solm = solve_direct(minus, Complex(1.0, 0.0));
    worst_sol = std::max(worst_sol, (solm.q - solp.q.conjugate()).norm() / solp.q.norm());
    worst_sol = std::max(worst_sol, (solm.p - solp.p.conjugate()).norm() / solp.p.norm());
  }
  c.require(worst_ops <= 1e-12, fmt("operator conjugate symmetry to 1e-12 (worst %.2e)", worst_ops));
  c.require(worst_sol <= 1e-12, fmt("solution conjugate symmetry to 1e-12 (worst %.2e)", worst_sol));

  SweepOptions sopts;
  sopts.workers = 2;
  sopts.allow_underresolved = true;
  const FrequencyGrid grid(600.0, 64);
  const TransferFunction tf = sweep(scene, grid, sopts);
  const ImpulseResponse ir = to_impulse_response(tf, SpectralWindow{});
  c.require(ir.imag_energy_ratio < 1e-10,
            fmt("impulse-response imaginary energy ratio %.2e < 1e-10", ir.imag_energy_ratio));
}

// ---------------------------------------------------------------------------
// AC-6: first-order reflection arrivals of the rigid shoebox against the
// image-source rendering on the identical grid (the heavyweight run).
//
// The lossless box makes this comparison delicate: the static mode leaves a
// near-DC plateau (the s -> 0 limit is reactive and formally divergent), and
// the undamped resonances wrap around the circular synthesis window. A
// common 60 Hz analysis high-pass (below the lowest eigenfrequency, applied
// to both renderings) removes the plateau; the modal wrap is measured and
// reported. A second, scattering-order-resolved comparison (direct plus
// first-order boundary term vs direct plus single-bounce images, the
// asymptotic-equivalence pair) is reported alongside.
struct ArrivalDeltas {
  int count = 0, within_time = 0, within_amp = 0;
};

ArrivalDeltas compare_arrivals(Check& c, const char* label, const RVector& b, const RVector& g,
                               const std::vector<ImageSource>& images, const Vec3& rcv, double fs,
                               double sound_speed) {
  ArrivalDeltas out;
  const int search = 3;
  for (const auto& img : images) {
    if (img.order != 1) continue;
    ++out.count;
    const double t = (rcv - img.position).norm() * fs / sound_speed;
    const int expected = static_cast<int>(std::lround(t));
    auto peak_near = [&](const RVector& h) {
      int best = expected - search;
      for (int i = expected - search; i <= expected + search; ++i)
        if (std::abs(h(i)) > std::abs(h(best))) best = i;
      return best;
    };
    const int pb = peak_near(b), pi = peak_near(g);
    const double ab = b(pb), ai = g(pi);
    const bool t_ok = std::abs(pb - pi) <= 2;
    const bool a_ok = std::abs(ab - ai) <= 0.20 * std::abs(ai);
    out.within_time += t_ok;
    out.within_amp += a_ok;
    c.note(fmt("%s arrival %.2f: peak %d vs %d, amplitude %+.4f vs %+.4f (%.0f%%)%s%s", label, t,
               pb, pi, ab, ai, 100.0 * std::abs(ab - ai) / std::abs(ai),
               t_ok ? "" : " [time]", a_ok ? "" : " [amp]"));
  }
  return out;
}

void ac6(Check& c) {
  const Vec3 L(2, 1.5, 1);
  const Vec3 src(1.472, 0.334, 0.274), rcv(0.778, 0.755, 0.416);
  const double band = 500.0;
  const double hp = 60.0;  // analysis high-pass, below the 85.75 Hz fundamental
  const double edge = kAir.sound_speed / band / 6.0;  // 6 elements/wavelength at 500 Hz
  Scene scene{make_shoebox(L, edge, Impedance::rigid()), kAir, src, {rcv}};
  c.note(fmt("mesh N=%zu (edge %.4f m)", scene.mesh.size(), edge));

  const FrequencyGrid grid(2000.0, 4096);
  SweepOptions opts;
  opts.workers = 2;
  opts.band_limit_hz = band;
  opts.collect_conditioning = false;
  opts.allow_underresolved = true;  // 6 per wavelength by grid pitch
  TransferFunction tf = sweep(scene, grid, opts);

  const std::array<double, 6> unit{1, 1, 1, 1, 1, 1};
  TransferFunction tf_ism = ism_shoebox(L, src, {rcv}, 6, unit, kAir, grid);

  // Diagnostics of the lossless-box artifacts before filtering.
  double plateau = 0.0;
  int spiky_bins = 0;
  for (int k = 0; k < grid.bin_count(); ++k) {
    const double mag = std::abs(tf.values(0, k));
    if (grid.frequency(k) < 20.0) plateau = std::max(plateau, mag);
    if (mag > 25.0 && grid.frequency(k) <= band) ++spiky_bins;
  }
  c.note(fmt("near-DC plateau |T| up to %.1f; %d resonance-dominated bins above |T| = 25",
             plateau, spiky_bins));

  auto synth_hp = [&](TransferFunction& t) {
    for (int k = 0; k < grid.bin_count(); ++k)
      if (grid.frequency(k) < hp) t.values(0, k) = Complex(0.0, 0.0);
    SpectralWindow window;
    window.band_limit_hz = band;
    const ImpulseResponse ir = to_impulse_response(t, window);
    return RVector(ir.samples.row(0).transpose());
  };
  const RVector b = synth_hp(tf);
  const RVector g = synth_hp(tf_ism);

  double late = 0.0;
  for (int i = grid.nfft / 2; i < grid.nfft; ++i) late = std::max(late, std::abs(b(i) - g(i)));
  c.note(fmt("late-window max |full - image| after the %g Hz high-pass: %.3f "
             "(wrapped modal ringing of the undamped box)",
             hp, late));

  const auto images = ism_images(L, src, 1, unit);
  const ArrivalDeltas full =
      compare_arrivals(c, "full", b, g, images, rcv, grid.fs, kAir.sound_speed);

  // Scattering-order-resolved pair: direct + first boundary term against
  // direct + single-bounce images (no feedback inversion on either side).
  {
    AssemblyOptions aopts;
    aopts.workers = 2;
    const GeometryCache cache(scene.mesh, aopts.quadrature);
    TransferFunction tf1;
    tf1.grid = grid;
    tf1.values = CMatrix::Zero(1, grid.bin_count());
    for (int k = 0; k < grid.bin_count(); ++k) {
      const double f = grid.frequency(k);
      if (f > band) break;
      const LaplacePoint s = (k == 0)
                                 ? LaplacePoint::from_frequency(grid.fs / (10.0 * grid.nfft))
                                 : LaplacePoint::from_frequency(f);
      const CVector B = assemble_B(scene.mesh, src, s, kAir, aopts, &cache);
      const CMatrix C = assemble_C(scene.mesh, {rcv}, kAir, s, aopts, &cache);
      const Complex t = assemble_D({rcv}, src, s, kAir)(0) + (C * B)(0);
      tf1.values(0, k) = (k == 0) ? Complex(t.real(), 0.0) : t;
    }
    TransferFunction tf_ism1 = ism_shoebox(L, src, {rcv}, 1, unit, kAir, grid);
    const RVector b1 = synth_hp(tf1);
    const RVector g1 = synth_hp(tf_ism1);
    const ArrivalDeltas first =
        compare_arrivals(c, "first-order", b1, g1, images, rcv, grid.fs, kAir.sound_speed);
    c.note(fmt("first-order pair: %d/6 times, %d/6 amplitudes within tolerance "
               "(oblique far-wall reflections clip their Fresnel zones on these faces below "
               "%g Hz, outside the specular-equivalence regime)",
               first.within_time, first.within_amp, band));
  }

  c.require(full.count == 6, fmt("6 first-order images (%d found)", full.count));
  c.require(full.within_time == 6, fmt("%d/6 arrival times within 2 samples", full.within_time));
  c.require(full.within_amp == 6, fmt("%d/6 amplitudes within 20%%", full.within_amp));
}

// ---------------------------------------------------------------------------
// AC-7: assembled entries against the brute-force Monte-Carlo quadrature.
void ac7(Check& c) {
  const BoundaryMesh cube = make_shoebox(Vec3(1, 1, 1), 0.25, Impedance::rigid());
  AssemblyOptions opts;
  opts.workers = 2;
  std::mt19937_64 rng(313);
  std::uniform_int_distribution<std::size_t> pick(0, cube.size() - 1);

  // 20 deterministic well-separated pairs.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < 20) {
    const std::size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const auto& ei = cube.element(i);
    const auto& ej = cube.element(j);
    if ((ei.centroid - ej.centroid).norm() <= 2.0 * std::max(ei.diameter, ej.diameter)) continue;
    pairs.emplace_back(i, j);
  }

  const long samples = 10000000;
  int ok = 0, total = 0;
  double worst_z = 0.0;
  for (double f : {0.0, 100.0}) {
    const LaplacePoint s = LaplacePoint::from_frequency(f);
    const CMatrix A = assemble_A(cube, kAir, s, opts);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto [i, j] = pairs[k];
      const auto mc = monte_carlo_pair_entry(cube, i, j, kAir, s, samples,
                                             0xAC7000 + 97 * k + (f > 0.0 ? 1 : 0));
      const Complex gauss = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      const double z_re =
          mc.se_re > 0.0 ? std::abs(gauss.real() - mc.mean.real()) / mc.se_re : 0.0;
      const double z_im =
          mc.se_im > 0.0 ? std::abs(gauss.imag() - mc.mean.imag()) / mc.se_im : 0.0;
      worst_z = std::max({worst_z, z_re, z_im});
      ok += (z_re < 3.0 && z_im < 3.0);
      ++total;
    }
  }
  c.note(fmt("largest |gauss - mc| deviation: %.2f standard errors", worst_z));
  c.require(ok == total,
            fmt("%d/%d entries within 3 Monte-Carlo standard errors (1e7 samples)", ok, total));
}

// ---------------------------------------------------------------------------
// AC-8: state-space identity suite.
void ac8(Check& c) {
  Scene scene{make_shoebox(Vec3(1, 1, 1), 0.25, Impedance(415.03)), kAir, Vec3(0.3, 0.4, 0.5),
              {Vec3(0.7, 0.6, 0.5), Vec3(0.25, 0.5, 0.25)}};
  AssemblyOptions opts;
  opts.workers = 2;
  const OperatorSet ops =
      assemble_operator_set(scene, LaplacePoint::from_frequency(90.0), opts);

  // Markov_0 == CB bitwise.
  const auto markov = markov_parameters(ops, 12);
  c.require(markov[0] == CVector(ops.C * ops.B), "markov_0 equals CB bitwise");

  // Series partial sums reproduce the truncated solve bitwise (fixed fold
  // order), on the physical operator below the divergence guard.
  {
    const Complex x(0.8, -0.6);
    const int K = 4;
    const NeumannResult res = solve_neumann(ops, x, K);
    CVector v = ops.B * x;
    CVector p = ops.D * x;
    p += ops.C * v;
    for (int k = 1; k <= K; ++k) {
      v = ops.A * v;
      p += ops.C * v;
    }
    c.require(p == res.solution.p, "sum of C A^k B x terms plus Dx equals the series solve bitwise");
  }
  // Same identity at depth 40 on a contraction (scaled copy of the operator).
  {
    OperatorSet scaled = ops;
    scaled.A *= 0.6 / spectral_radius(ops.A).value;
    const Complex x(1.0, 0.0);
    const int K = 40;
    const NeumannResult res = solve_neumann(scaled, x, K);
    CVector v = scaled.B * x;
    CVector p = scaled.D * x;
    p += scaled.C * v;
    for (int k = 1; k <= K; ++k) {
      v = scaled.A * v;
      p += scaled.C * v;
    }
    c.require(p == res.solution.p, "depth-40 series identity bitwise on the scaled operator");
  }

  // Observability / controllability cross identities to 1e-13.
  const int K = 12;
  const RankedMatrix obs = observability_matrix(ops, K);
  const RankedMatrix ctrl = controllability_matrix(ops, K);
  const Eigen::Index m = ops.receiver_count();
  double worst_obs = 0.0, worst_ctrl = 0.0;
  for (int k = 0; k < K; ++k) {
    const double scale = markov[static_cast<std::size_t>(k)].norm();
    worst_obs = std::max(worst_obs, (obs.matrix.middleRows(k * m, m) * ops.B -
                                     markov[static_cast<std::size_t>(k)])
                                            .norm() /
                                        scale);
    worst_ctrl = std::max(worst_ctrl, (ops.C * ctrl.matrix.col(k) -
                                       markov[static_cast<std::size_t>(k)])
                                              .norm() /
                                          scale);
  }
  c.require(worst_obs <= 1e-13,
            fmt("observability block times B matches markov to 1e-13 (worst %.2e)", worst_obs));
  c.require(worst_ctrl <= 1e-13,
            fmt("C times controllability column matches markov to 1e-13 (worst %.2e)", worst_ctrl));
}

// ---------------------------------------------------------------------------
// AC-9: reciprocity under source-receiver exchange, discretization-limited.
void ac9(Check& c) {
  const Vec3 L(2, 1.5, 1);
  const Vec3 a(0.52, 0.41, 0.33), b(1.51, 1.08, 0.66);
  // Bins below the 6-elements-per-wavelength limit of the 0.25 m mesh
  // (343 / (6 * 0.354) = 162 Hz), kept clear of the analytic resonances.
  const std::vector<double> freqs{50, 60, 70, 75, 100, 105, 125, 130, 155};

  auto run = [&](double edge, const std::vector<double>& fl) {
    Scene fwd{make_shoebox(L, edge, Impedance::rigid()), kAir, a, {b}};
    Scene swp{make_shoebox(L, edge, Impedance::rigid()), kAir, b, {a}};
    SweepOptions opts;
    opts.workers = 2;
    opts.collect_conditioning = false;
    const TransferFunction tf = sweep_frequencies(fwd, fl, opts);
    const TransferFunction ts = sweep_frequencies(swp, fl, opts);
    std::vector<double> errs;
    for (Eigen::Index k = 0; k < tf.values.cols(); ++k)
      errs.push_back(std::abs(tf.values(0, k) - ts.values(0, k)) / std::abs(tf.values(0, k)));
    return errs;
  };

  const std::vector<double> coarse = run(0.25, freqs);
  double worst = 0.0;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    worst = std::max(worst, coarse[k]);
    c.note(fmt("f = %5.1f Hz: reciprocity error %.3e", freqs[k], coarse[k]));
  }
  c.require(worst <= 0.01, fmt("exchange error %.3e <= 1%% at all bins", worst));

  // Empirical justification: the error decreases under mesh refinement.
  const std::vector<double> sub{70, 100, 130};
  const std::vector<double> coarse_sub = run(0.25, sub);
  const std::vector<double> fine_sub = run(0.125, sub);
  double med_c, med_f;
  {
    auto med = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    med_c = med(coarse_sub);
    med_f = med(fine_sub);
  }
  c.require(med_f < med_c,
            fmt("median error decreases under refinement (%.3e -> %.3e)", med_c, med_f));
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only.push_back(argv[++i]);
  }

  struct Criterion {
    const char* id;
    const char* title;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria{
      {"AC-1", "free-field exactness of the direct path", ac1},
      {"AC-2", "first-order term vs specular reflection off a rigid plate", ac2},
      {"AC-3", "modal detection via sigma_min(I - A) on the rigid shoebox", ac3},
      {"AC-4", "truncated-series convergence bound (matched-impedance cube)", ac4},
      {"AC-5", "conjugate symmetry and impulse-response realness", ac5},
      {"AC-6", "first-order arrivals vs image sources (heavyweight)", ac6},
      {"AC-7", "assembled entries vs Monte-Carlo quadrature", ac7},
      {"AC-8", "state-space identity suite", ac8},
      {"AC-9", "reciprocity under source-receiver exchange", ac9},
  };

  int failures = 0, ran = 0;
  for (const auto& cr : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end()) continue;
    ++ran;
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.require(false, std::string("unexpected exception: ") + e.what());
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s: %s (%.1f s)\n", check.pass ? "PASS" : "FAIL", cr.id, cr.title, dt);
    for (const auto& n : check.notes) std::printf("%s\n", n.c_str());
    failures += check.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criteria selected\n");
    return 2;
  }
  std::printf("%d of %d selected criteria passed\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
