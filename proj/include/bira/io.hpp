#pragma once

#include <filesystem>
#include <string>

#include "bira/assembly.hpp"
#include "bira/response.hpp"
#include "bira/types.hpp"

namespace bira {

/// Shortest round-trippable decimal for a double ("%.17g").
std::string format_double(double v);

/// Transfer function CSV: header `freq_hz,re_0,im_0,...`, one row per bin.
/// Deterministic formatting: identical values produce identical bytes.
void write_transfer_csv(const std::filesystem::path& path, const TransferFunction& tf);

/// Per-bin diagnostics CSV: freq_hz, sigma_min, condition, rho_hat,
/// residual, near_singular.
void write_diagnostics_csv(const std::filesystem::path& path, const TransferFunction& tf);

/// Impulse response CSV: header `sample,r0,...`, one row per sample.
void write_impulse_csv(const std::filesystem::path& path, const ImpulseResponse& ir);

/// 32-bit float mono WAV, one file per receiver (suffix `_r<i>.wav`).
void write_impulse_wav(const std::filesystem::path& path_prefix, const ImpulseResponse& ir);

/// Complex matrix as CSV rows of re,im pairs (row-major).
void write_matrix_csv(const std::filesystem::path& path, const CMatrix& m);
void write_vector_csv(const std::filesystem::path& path, const CVector& v);

/// Raw little-endian interleaved re/im doubles, row-major, with a JSON
/// sidecar {"N", "M", "s": {"sigma", "omega"}, "layout": "row-major"}.
void write_operator_binary(const std::filesystem::path& path_prefix, const OperatorSet& ops);

/// Arbitrary JSON sidecar text (pre-serialized) written next to an artifact.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace bira
