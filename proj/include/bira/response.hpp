#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bira/scene.hpp"
#include "bira/solver.hpp"
#include "bira/types.hpp"

namespace bira {

/// Linear frequency grid tied to an inverse-DFT contract: bins k = 0..nfft/2
/// at f_k = k * fs / nfft. Arbitrary frequency lists are supported by
/// sweep_frequencies but cannot feed to_impulse_response.
struct FrequencyGrid {
  double fs = 0.0;
  int nfft = 0;

  FrequencyGrid() = default;
  FrequencyGrid(double fs_hz, int nfft_samples);

  int bin_count() const { return nfft / 2 + 1; }
  double frequency(int k) const { return k * fs / nfft; }
  double nyquist() const { return 0.5 * fs; }
};

/// Raised-cosine spectral roll-off over the top `rolloff_fraction` of the
/// band [0, band_limit]; unity below the roll-off, zero above the band
/// limit. band_limit <= 0 means the Nyquist frequency.
struct SpectralWindow {
  bool enabled = true;
  double band_limit_hz = 0.0;
  double rolloff_fraction = 0.2;

  double value(double f, double nyquist) const;
};

struct BinDiagnostics {
  int bin = 0;
  double frequency = 0.0;
  double condition_estimate = 0.0;
  double sigma_min = 0.0;
  double spectral_radius = 0.0;  // filled when requested or when method = Neumann
  double residual_norm = 0.0;
  bool near_singular = false;
};

/// Frequency response per receiver, M x (nfft/2 + 1), for unit excitation
/// x(s) = 1 per bin.
struct TransferFunction {
  FrequencyGrid grid;
  CMatrix values;
  std::vector<BinDiagnostics> diagnostics;
  std::uint64_t scene_hash = 0;
  std::string method = "direct";
  double dc_surrogate_hz = 0.0;  // frequency substituted for the s = 0 bin
  double band_limit_hz = 0.0;    // 0: all bins solved
};

struct SweepOptions {
  SolveMethod method = SolveMethod::Direct;
  int neumann_order = 40;
  AssemblyOptions assembly;
  int workers = 1;              // concurrent frequency bins
  bool collect_spectral_radius = false;
  bool collect_conditioning = true;  // sigma_min / condition per bin
  bool allow_underresolved = false;
  double resolution_warn_threshold = 4.0;
  double band_limit_hz = 0.0;   // skip bins above this frequency (stored as 0)
};

/// Sweeps the grid: for each bin k > 0 (up to the band limit) the operator
/// set is assembled at s = j 2 pi f_k through a shared geometry cache and
/// solved with unit excitation. Bin 0 is solved at the small surrogate
/// frequency fs/(10 nfft) and its real part copied in; the Nyquist bin is
/// forced real with its magnitude preserved. Bins run concurrently and are
/// written into pre-sized slots, so the result does not depend on completion
/// order.
TransferFunction sweep(const Scene& scene, const FrequencyGrid& grid, const SweepOptions& options);

/// Sweep over an arbitrary frequency list (diagnostics-style runs).
TransferFunction sweep_frequencies(const Scene& scene, const std::vector<double>& frequencies,
                                   const SweepOptions& options);

/// Real time-domain pressure per receiver, M x nfft.
struct ImpulseResponse {
  double fs = 0.0;
  RMatrix samples;
  double imag_energy_ratio = 0.0;
};

/// Hermitian inverse DFT of the windowed transfer function. A pure delay
/// e^{-j omega tau}/R synthesizes to a band-limited impulse of peak ~ 1/R at
/// sample round(tau fs) (window loss measurable on the pure-delay case).
/// Output with imaginary/real energy ratio above 1e-8 signals broken
/// symmetry upstream and raises SymmetryError.
ImpulseResponse to_impulse_response(const TransferFunction& tf,
                                    const SpectralWindow& window = SpectralWindow{});

/// Energy of one receiver's impulse response within [f_lo, f_hi], computed
/// spectrally with Parseval weights; the full band equals the time-domain
/// energy to rounding.
double band_energy(const ImpulseResponse& ir, Eigen::Index receiver, double f_lo, double f_hi);

inline double total_energy(const ImpulseResponse& ir, Eigen::Index receiver) {
  return band_energy(ir, receiver, 0.0, ir.fs / 2.0);
}

}  // namespace bira
