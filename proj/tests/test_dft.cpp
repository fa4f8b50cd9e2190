#include <doctest.h>

#include <cmath>
#include <random>

#include "bira/dft.hpp"

using namespace bira;

TEST_SUITE_BEGIN("dft");

TEST_CASE("radix-2 agrees with the direct transform") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> a(64);
  for (auto& v : a) v = Complex(u(rng), u(rng));
  std::vector<Complex> b = a;
  dft(a, false);  // radix-2 path (power of two)
  // Direct evaluation for reference.
  std::vector<Complex> ref(b.size());
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t m = 0; m < n; ++m)
      ref[k] += b[m] * std::polar(1.0, -two_pi * static_cast<double>(k * m % n) / n);
  for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(a[k] - ref[k]) < 1e-11);
}

TEST_CASE("forward-inverse round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t n : {16u, 36u}) {  // power of two and composite
    std::vector<Complex> a(n);
    for (auto& v : a) v = Complex(u(rng), u(rng));
    std::vector<Complex> b = a;
    dft(b, false);
    dft(b, true);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(b[k] / double(n) - a[k]) < 1e-12);
  }
}

TEST_CASE("inverse real DFT of a pure delay") {
  const int nfft = 256;
  const int tau = 36;
  std::vector<Complex> half(nfft / 2 + 1);
  for (int k = 0; k <= nfft / 2; ++k)
    half[static_cast<std::size_t>(k)] = std::polar(1.0, -two_pi * k * tau / double(nfft));
  double ratio = 1.0;
  const std::vector<double> x = inverse_real_dft(half, nfft, &ratio);
  CHECK(ratio < 1e-20);
  CHECK(x[tau] == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < nfft; ++i)
    if (i != tau) CHECK(std::abs(x[static_cast<std::size_t>(i)]) < 1e-12);
}

TEST_CASE("real_dft Parseval") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(128);
  for (auto& v : x) v = u(rng);
  const auto spec = real_dft(x);
  double time_e = 0.0;
  for (double v : x) time_e += v * v;
  double spec_e = std::norm(spec[0]) + std::norm(spec[64]);
  for (int k = 1; k < 64; ++k) spec_e += 2.0 * std::norm(spec[static_cast<std::size_t>(k)]);
  CHECK(spec_e / 128.0 == doctest::Approx(time_e).epsilon(1e-12));
}

TEST_SUITE_END();
