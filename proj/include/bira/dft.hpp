#pragma once

#include <vector>

#include "bira/types.hpp"

namespace bira {

/// In-place DFT, sign convention X_k = sum_n x_n e^{-2 pi j k n / N}.
/// Radix-2 Cooley-Tukey for power-of-two sizes, direct evaluation otherwise
/// (sizes here are desk scale).
void dft(std::vector<Complex>& data, bool inverse);

/// Inverse DFT of a Hermitian half spectrum (bins 0..nfft/2) to nfft real
/// samples. The extension H[nfft-k] = conj(H[k]) is applied internally;
/// `imag_ratio` receives the ratio of imaginary to real output energy (a
/// symmetry diagnostic; exactly 0 up to rounding for valid input).
std::vector<double> inverse_real_dft(const std::vector<Complex>& half_spectrum, int nfft,
                                     double* imag_ratio = nullptr);

/// Forward DFT of a real signal, returning bins 0..n/2.
std::vector<Complex> real_dft(const std::vector<double>& x);

}  // namespace bira
