#include "bira/response.hpp"

#include <cmath>
#include <sstream>

#include "bira/dft.hpp"
#include "bira/errors.hpp"
#include "bira/parallel.hpp"

namespace bira {

FrequencyGrid::FrequencyGrid(double fs_hz, int nfft_samples) : fs(fs_hz), nfft(nfft_samples) {
  if (!(fs > 0.0)) throw ValidationError("FrequencyGrid: fs must be positive");
  if (nfft <= 0 || nfft % 2 != 0)
    throw ValidationError("FrequencyGrid: nfft must be even and positive");
}

double SpectralWindow::value(double f, double nyquist) const {
  if (!enabled) return 1.0;
  const double limit = band_limit_hz > 0.0 ? band_limit_hz : nyquist;
  if (f > limit) return 0.0;
  const double knee = limit * (1.0 - rolloff_fraction);
  if (f <= knee || limit <= knee) return 1.0;
  const double t = (f - knee) / (limit - knee);
  return 0.5 * (1.0 + std::cos(pi * t));
}

namespace {

struct BinSolve {
  CVector p;
  BinDiagnostics diag;
};

BinSolve solve_bin(const Scene& scene, const GeometryCache& cache, double frequency,
                   const SweepOptions& options) {
  const LaplacePoint s = LaplacePoint::from_frequency(frequency);
  AssemblyOptions asm_opts = options.assembly;
  OperatorSet ops = assemble_operator_set(scene, s, asm_opts, &cache);

  BinSolve out;
  out.diag.frequency = frequency;
  try {
    if (options.method == SolveMethod::Direct) {
      DirectOptions dopts;
      dopts.estimate_conditioning = options.collect_conditioning;
      StateSolution sol = solve_direct(ops, Complex(1.0, 0.0), dopts);
      out.p = sol.p;
      out.diag.condition_estimate = sol.condition_estimate;
      out.diag.sigma_min = sol.sigma_min;
      out.diag.residual_norm = sol.residual_norm;
      out.diag.near_singular = sol.near_singular;
      if (options.collect_spectral_radius)
        out.diag.spectral_radius = spectral_radius(ops.A).value;
    } else {
      out.diag.spectral_radius = spectral_radius(ops.A).value;
      NeumannResult res = solve_neumann(ops, Complex(1.0, 0.0), options.neumann_order);
      out.p = res.solution.p;
      out.diag.residual_norm = res.solution.residual_norm;
    }
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "sweep: solve failed at " << frequency << " Hz: " << e.what();
    throw SolveError(os.str());
  }
  return out;
}

void require_valid(const Scene& scene, double max_frequency, const SweepOptions& options) {
  const SceneReport rep = validate_scene(scene, max_frequency, options.resolution_warn_threshold);
  if (!rep.ok) throw ValidationError("sweep: scene validation failed\n" + rep.summary());
  if (!options.allow_underresolved && !rep.warnings.empty() &&
      rep.elements_per_wavelength < options.resolution_warn_threshold &&
      rep.elements_per_wavelength > 0.0) {
    throw ValidationError(
        "sweep: mesh resolution below the warning threshold at the sweep band edge "
        "(set allow_underresolved to proceed)\n" +
        rep.summary());
  }
}

}  // namespace

TransferFunction sweep(const Scene& scene, const FrequencyGrid& grid, const SweepOptions& options) {
  const double band_top =
      options.band_limit_hz > 0.0 ? std::min(options.band_limit_hz, grid.nyquist()) : grid.nyquist();
  require_valid(scene, band_top, options);

  GeometryCache cache(scene.mesh, options.assembly.quadrature);
  const auto m = static_cast<Eigen::Index>(scene.receivers.size());
  const int bins = grid.bin_count();

  TransferFunction tf;
  tf.grid = grid;
  tf.values = CMatrix::Zero(m, bins);
  tf.diagnostics.assign(bins, BinDiagnostics{});
  tf.scene_hash = scene_hash(scene);
  tf.method = options.method == SolveMethod::Direct ? "direct" : "neumann";
  tf.band_limit_hz = options.band_limit_hz;
  tf.dc_surrogate_hz = grid.fs / (10.0 * grid.nfft);

  // Bin 0 is handled at a small positive surrogate frequency: the reactive
  // (imaginary) part of a lossless resonance at s -> 0 is discarded by
  // keeping the real part only.
  std::vector<int> todo;
  todo.push_back(0);
  for (int k = 1; k < bins; ++k)
    if (grid.frequency(k) <= band_top) todo.push_back(k);

  AssemblyOptions asm_opts = options.assembly;
  const bool bin_parallel = options.workers > 1;
  // With bin-level parallelism each assembly runs single-threaded; a lone
  // frequency still uses the assembly workers.
  if (bin_parallel) asm_opts.workers = 1;
  SweepOptions per_bin = options;
  per_bin.assembly = asm_opts;

  parallel_for(0, static_cast<long>(todo.size()), options.workers, [&](long idx) {
    const int k = todo[static_cast<std::size_t>(idx)];
    const double f = (k == 0) ? tf.dc_surrogate_hz : grid.frequency(k);
    BinSolve bs = solve_bin(scene, cache, f, per_bin);
    bs.diag.bin = k;
    if (k == 0) {
      tf.values.col(0) = bs.p.real().cast<Complex>();
    } else {
      tf.values.col(k) = bs.p;
    }
    tf.diagnostics[static_cast<std::size_t>(k)] = bs.diag;
  });

  // Nyquist bin forced real, magnitude preserved (sign of the real part).
  const int nyq = bins - 1;
  if (grid.frequency(nyq) <= band_top) {
    for (Eigen::Index r = 0; r < m; ++r) {
      const Complex v = tf.values(r, nyq);
      tf.values(r, nyq) = Complex(std::copysign(std::abs(v), v.real() == 0.0 ? 1.0 : v.real()), 0.0);
    }
  }
  return tf;
}

TransferFunction sweep_frequencies(const Scene& scene, const std::vector<double>& frequencies,
                                   const SweepOptions& options) {
  double fmax = 0.0;
  for (double f : frequencies) {
    if (!(f > 0.0)) throw ValidationError("sweep_frequencies: frequencies must be positive");
    fmax = std::max(fmax, f);
  }
  require_valid(scene, fmax, options);

  GeometryCache cache(scene.mesh, options.assembly.quadrature);
  const auto m = static_cast<Eigen::Index>(scene.receivers.size());

  TransferFunction tf;
  tf.grid = FrequencyGrid{};  // not an inverse-DFT grid
  tf.values = CMatrix::Zero(m, static_cast<Eigen::Index>(frequencies.size()));
  tf.diagnostics.assign(frequencies.size(), BinDiagnostics{});
  tf.scene_hash = scene_hash(scene);
  tf.method = options.method == SolveMethod::Direct ? "direct" : "neumann";

  AssemblyOptions asm_opts = options.assembly;
  if (options.workers > 1) asm_opts.workers = 1;
  SweepOptions per_bin = options;
  per_bin.assembly = asm_opts;

  parallel_for(0, static_cast<long>(frequencies.size()), options.workers, [&](long idx) {
    BinSolve bs = solve_bin(scene, cache, frequencies[static_cast<std::size_t>(idx)], per_bin);
    bs.diag.bin = static_cast<int>(idx);
    tf.values.col(idx) = bs.p;
    tf.diagnostics[static_cast<std::size_t>(idx)] = bs.diag;
  });
  return tf;
}

ImpulseResponse to_impulse_response(const TransferFunction& tf, const SpectralWindow& window) {
  if (tf.grid.nfft <= 0)
    throw ValidationError(
        "to_impulse_response: transfer function was not computed on an fs/nfft grid");
  const int bins = tf.grid.bin_count();
  if (tf.values.cols() != bins)
    throw ValidationError("to_impulse_response: incomplete transfer function");

  ImpulseResponse ir;
  ir.fs = tf.grid.fs;
  ir.samples.resize(tf.values.rows(), tf.grid.nfft);
  ir.imag_energy_ratio = 0.0;

  std::vector<Complex> spectrum(bins);
  for (Eigen::Index r = 0; r < tf.values.rows(); ++r) {
    for (int k = 0; k < bins; ++k)
      spectrum[static_cast<std::size_t>(k)] =
          tf.values(r, k) * window.value(tf.grid.frequency(k), tf.grid.nyquist());
    double ratio = 0.0;
    const std::vector<double> x = inverse_real_dft(spectrum, tf.grid.nfft, &ratio);
    ir.imag_energy_ratio = std::max(ir.imag_energy_ratio, ratio);
    for (int i = 0; i < tf.grid.nfft; ++i) ir.samples(r, i) = x[static_cast<std::size_t>(i)];
  }
  if (ir.imag_energy_ratio > 1e-8) {
    std::ostringstream os;
    os << "to_impulse_response: non-real synthesis, imaginary/real energy ratio "
       << ir.imag_energy_ratio << " (broken conjugate symmetry upstream)";
    throw SymmetryError(os.str());
  }
  return ir;
}

double band_energy(const ImpulseResponse& ir, Eigen::Index receiver, double f_lo, double f_hi) {
  const int n = static_cast<int>(ir.samples.cols());
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = ir.samples(receiver, i);
  const std::vector<Complex> spec = real_dft(x);
  // Parseval: sum x^2 = (1/N) [ |X_0|^2 + 2 sum_middle |X_k|^2 + |X_{N/2}|^2 ].
  double e = 0.0;
  const int half = n / 2;
  for (int k = 0; k <= half; ++k) {
    const double f = k * ir.fs / n;
    if (f < f_lo || f > f_hi) continue;
    const double mag2 = std::norm(spec[static_cast<std::size_t>(k)]);
    e += (k == 0 || k == half) ? mag2 : 2.0 * mag2;
  }
  return e / n;
}

}  // namespace bira
