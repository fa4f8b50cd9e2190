#include "bira/dft.hpp"

#include <cmath>
#include <stdexcept>

namespace bira {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * pi / static_cast<double>(len);
    const Complex wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const Complex u = a[i + k];
        const Complex v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

void dft_direct(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  std::vector<Complex> out(n, Complex(0.0, 0.0));
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t m = 0; m < n; ++m) {
      const double ang = sign * two_pi * static_cast<double>((k * m) % n) / static_cast<double>(n);
      out[k] += a[m] * Complex(std::cos(ang), std::sin(ang));
    }
  }
  a.swap(out);
}

}  // namespace

void dft(std::vector<Complex>& data, bool inverse) {
  if (data.empty()) return;
  if (is_pow2(data.size()))
    fft_radix2(data, inverse);
  else
    dft_direct(data, inverse);
}

std::vector<double> inverse_real_dft(const std::vector<Complex>& half_spectrum, int nfft,
                                     double* imag_ratio) {
  if (nfft <= 0 || nfft % 2 != 0)
    throw std::invalid_argument("inverse_real_dft: nfft must be even and positive");
  if (static_cast<int>(half_spectrum.size()) != nfft / 2 + 1)
    throw std::invalid_argument("inverse_real_dft: expected nfft/2+1 bins");

  std::vector<Complex> full(nfft);
  for (int k = 0; k <= nfft / 2; ++k) full[k] = half_spectrum[k];
  for (int k = 1; k < nfft / 2; ++k) full[nfft - k] = std::conj(half_spectrum[k]);
  dft(full, true);

  std::vector<double> out(nfft);
  double re_energy = 0.0, im_energy = 0.0;
  const double scale = 1.0 / nfft;
  for (int n = 0; n < nfft; ++n) {
    out[n] = full[n].real() * scale;
    re_energy += full[n].real() * full[n].real();
    im_energy += full[n].imag() * full[n].imag();
  }
  if (imag_ratio) *imag_ratio = (re_energy > 0.0) ? im_energy / re_energy : (im_energy > 0.0);
  return out;
}

std::vector<Complex> real_dft(const std::vector<double>& x) {
  std::vector<Complex> a(x.begin(), x.end());
  dft(a, false);
  a.resize(x.size() / 2 + 1);
  return a;
}

}  // namespace bira
