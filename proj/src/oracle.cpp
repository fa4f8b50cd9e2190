#include "bira/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "bira/errors.hpp"
#include "bira/parallel.hpp"

namespace bira {

Vec3 mirror_point(const Vec3& p, const AxisPlane& plane) {
  Vec3 out = p;
  out[plane.axis] = 2.0 * plane.value - p[plane.axis];
  return out;
}

std::vector<ImageSource> ism_images(const Vec3& lengths, const Vec3& source, int max_order,
                                    const std::array<double, 6>& reflection) {
  if (max_order < 0) throw ComparisonError("ism_images: max_order must be >= 0");
  std::vector<ImageSource> images;
  // Image coordinate (1-2q) s + 2 m L per axis; the number of bounces off
  // the low/high wall pair is |m - q| and |m|.
  const int mrange = max_order / 2 + 1;
  for (int qx = 0; qx <= 1; ++qx)
    for (int mx = -mrange; mx <= mrange; ++mx) {
      const int ox = std::abs(mx - qx) + std::abs(mx);
      if (ox > max_order) continue;
      for (int qy = 0; qy <= 1; ++qy)
        for (int my = -mrange; my <= mrange; ++my) {
          const int oy = std::abs(my - qy) + std::abs(my);
          if (ox + oy > max_order) continue;
          for (int qz = 0; qz <= 1; ++qz)
            for (int mz = -mrange; mz <= mrange; ++mz) {
              const int oz = std::abs(mz - qz) + std::abs(mz);
              const int order = ox + oy + oz;
              if (order > max_order) continue;
              ImageSource img;
              img.position = Vec3((1 - 2 * qx) * source.x() + 2.0 * mx * lengths.x(),
                                  (1 - 2 * qy) * source.y() + 2.0 * my * lengths.y(),
                                  (1 - 2 * qz) * source.z() + 2.0 * mz * lengths.z());
              img.order = order;
              img.gain = std::pow(reflection[0], std::abs(mx - qx)) *
                         std::pow(reflection[1], std::abs(mx)) *
                         std::pow(reflection[2], std::abs(my - qy)) *
                         std::pow(reflection[3], std::abs(my)) *
                         std::pow(reflection[4], std::abs(mz - qz)) *
                         std::pow(reflection[5], std::abs(mz));
              images.push_back(img);
            }
        }
    }
  // Deterministic ordering: by order, then lexicographic position.
  std::sort(images.begin(), images.end(), [](const ImageSource& a, const ImageSource& b) {
    if (a.order != b.order) return a.order < b.order;
    for (int k = 0; k < 3; ++k)
      if (a.position[k] != b.position[k]) return a.position[k] < b.position[k];
    return false;
  });
  return images;
}

namespace {
Complex image_sum(const std::vector<ImageSource>& images, const Vec3& receiver, double omega,
                  const Medium& medium) {
  Complex acc(0.0, 0.0);
  for (const auto& img : images) {
    if (img.gain == 0.0 && img.order > 0) continue;
    const double r = (receiver - img.position).norm();
    const double phase = omega * r / medium.sound_speed;
    acc += img.gain / r * Complex(std::cos(phase), -std::sin(phase));
  }
  return acc;
}
}  // namespace

TransferFunction ism_shoebox(const Vec3& lengths, const Vec3& source,
                             const std::vector<Vec3>& receivers, int max_order,
                             const std::array<double, 6>& reflection, const Medium& medium,
                             const FrequencyGrid& grid) {
  const std::vector<ImageSource> images = ism_images(lengths, source, max_order, reflection);
  TransferFunction tf;
  tf.grid = grid;
  tf.method = "ism";
  tf.values = CMatrix::Zero(static_cast<Eigen::Index>(receivers.size()), grid.bin_count());
  for (Eigen::Index r = 0; r < tf.values.rows(); ++r)
    for (int k = 0; k < grid.bin_count(); ++k)
      tf.values(r, k) =
          image_sum(images, receivers[static_cast<std::size_t>(r)], two_pi * grid.frequency(k),
                    medium);
  return tf;
}

CMatrix ism_response(const Vec3& lengths, const Vec3& source, const std::vector<Vec3>& receivers,
                     int max_order, const std::array<double, 6>& reflection, const Medium& medium,
                     const std::vector<double>& frequencies) {
  const std::vector<ImageSource> images = ism_images(lengths, source, max_order, reflection);
  CMatrix out(static_cast<Eigen::Index>(receivers.size()),
              static_cast<Eigen::Index>(frequencies.size()));
  for (Eigen::Index r = 0; r < out.rows(); ++r)
    for (Eigen::Index k = 0; k < out.cols(); ++k)
      out(r, k) = image_sum(images, receivers[static_cast<std::size_t>(r)],
                            two_pi * frequencies[static_cast<std::size_t>(k)], medium);
  return out;
}

std::vector<BoxMode> rigid_box_modes(const Vec3& lengths, const Medium& medium, double f_max) {
  if (!(f_max > 0.0)) throw ComparisonError("rigid_box_modes: f_max must be positive");
  std::vector<BoxMode> modes;
  const double c2 = medium.sound_speed / 2.0;
  const int nx_max = static_cast<int>(std::floor(f_max / c2 * lengths.x()));
  for (int nx = 0; nx <= nx_max; ++nx) {
    const double fx2 = nx / lengths.x() * (nx / lengths.x());
    const double rem_x = (f_max / c2) * (f_max / c2) - fx2;
    if (rem_x < 0.0) break;
    const int ny_max = static_cast<int>(std::floor(std::sqrt(rem_x) * lengths.y()));
    for (int ny = 0; ny <= ny_max; ++ny) {
      const double fy2 = ny / lengths.y() * (ny / lengths.y());
      const double rem_y = rem_x - fy2;
      if (rem_y < 0.0) break;
      const int nz_max = static_cast<int>(std::floor(std::sqrt(rem_y) * lengths.z()));
      for (int nz = 0; nz <= nz_max; ++nz) {
        if (nx == 0 && ny == 0 && nz == 0) continue;
        const double f =
            c2 * std::sqrt(fx2 + fy2 + (nz / lengths.z()) * (nz / lengths.z()));
        if (f <= f_max) modes.push_back({nx, ny, nz, f});
      }
    }
  }
  std::sort(modes.begin(), modes.end(), [](const BoxMode& a, const BoxMode& b) {
    if (a.frequency != b.frequency) return a.frequency < b.frequency;
    return std::array<int, 3>{a.nx, a.ny, a.nz} < std::array<int, 3>{b.nx, b.ny, b.nz};
  });
  return modes;
}

namespace {

// Uniform point on a triangle by the square-root barycentric transform,
// mapped through edge differences so shared coordinates stay exact.
inline Vec3 sample_triangle(const Vec3& v0, const Vec3& v1, const Vec3& v2, double u1, double u2) {
  const double su = std::sqrt(u1);
  return v0 + su * (v1 - v0) + su * u2 * (v2 - v1);
}

struct McAccumulator {
  double sum_re = 0.0, sum_im = 0.0, sum_re2 = 0.0, sum_im2 = 0.0;
  void add(const Complex& v) {
    sum_re += v.real();
    sum_im += v.imag();
    sum_re2 += v.real() * v.real();
    sum_im2 += v.imag() * v.imag();
  }
  void merge(const McAccumulator& o) {
    sum_re += o.sum_re;
    sum_im += o.sum_im;
    sum_re2 += o.sum_re2;
    sum_im2 += o.sum_im2;
  }
};

MonteCarloEstimate finalize(const McAccumulator& acc, long n, double scale) {
  MonteCarloEstimate est;
  est.samples = n;
  const double mean_re = acc.sum_re / n;
  const double mean_im = acc.sum_im / n;
  est.mean = scale * Complex(mean_re, mean_im);
  const double var_re = std::max(0.0, acc.sum_re2 / n - mean_re * mean_re);
  const double var_im = std::max(0.0, acc.sum_im2 / n - mean_im * mean_im);
  est.se_re = scale * std::sqrt(var_re / n);
  est.se_im = scale * std::sqrt(var_im / n);
  return est;
}

constexpr long kMcBlocks = 64;

// Blocked sampling with per-block generators seeded from the master seed;
// block partition and merge order are fixed, so totals are identical for
// any worker count.
template <typename SampleFn>
MonteCarloEstimate run_blocked(long samples, std::uint64_t seed, double scale, SampleFn&& fn) {
  if (samples < 10000)
    throw ComparisonError("monte_carlo: at least 1e4 samples required");
  std::vector<McAccumulator> blocks(kMcBlocks);
  parallel_for(0, kMcBlocks, default_workers(), [&](long b) {
    const long lo = samples * b / kMcBlocks;
    const long hi = samples * (b + 1) / kMcBlocks;
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(b + 1)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    McAccumulator acc;
    for (long i = lo; i < hi; ++i) acc.add(fn(rng, uni));
    blocks[static_cast<std::size_t>(b)] = acc;
  });
  McAccumulator total;
  for (const auto& b : blocks) total.merge(b);
  return finalize(total, samples, scale);
}

}  // namespace

MonteCarloEstimate monte_carlo_pair_entry(const BoundaryMesh& mesh, std::size_t row,
                                          std::size_t col, const Medium& medium,
                                          const LaplacePoint& s, long samples,
                                          std::uint64_t seed) {
  if (row == col)
    throw ComparisonError("monte_carlo_pair_entry: self-pairs are singular and not supported");
  const TriangleElement& en = mesh.element(row);
  const TriangleElement& ev = mesh.element(col);
  const Vec3 a0 = mesh.vertex_of(en, 0), a1 = mesh.vertex_of(en, 1), a2 = mesh.vertex_of(en, 2);
  const Vec3 b0 = mesh.vertex_of(ev, 0), b1 = mesh.vertex_of(ev, 1), b2 = mesh.vertex_of(ev, 2);
  const Vec3 n_inner = ev.normal;
  const double inv_c = 1.0 / medium.sound_speed;
  const double rho_over_z = ev.impedance.is_rigid() ? 0.0 : medium.density / ev.impedance.value();
  const Complex sval = s.value();

  // (A_n A_nu) / sqrt(A_n A_nu): the uniform-density estimate times areas,
  // then the orthonormal basis normalization.
  const double scale = std::sqrt(en.area * ev.area);

  auto kernel = [&](std::mt19937_64& rng, std::uniform_real_distribution<double>& uni) {
    const Vec3 b = sample_triangle(a0, a1, a2, uni(rng), uni(rng));
    const Vec3 beta = sample_triangle(b0, b1, b2, uni(rng), uni(rng));
    const Vec3 d = b - beta;
    const double r = d.norm();
    const double ct = d.dot(n_inner) / r;
    const double g = (ct * inv_c / r - rho_over_z / r) / two_pi;
    const double h = ct / (two_pi * r * r);
    const double phase = s.omega * r * inv_c;
    Complex prop(std::cos(phase), -std::sin(phase));
    if (s.sigma != 0.0) prop *= std::exp(-s.sigma * r * inv_c);
    return (sval * g + h) * prop;
  };
  return run_blocked(samples, seed, scale, kernel);
}

MonteCarloEstimate monte_carlo_receiver_entry(const BoundaryMesh& mesh, std::size_t element,
                                              const Vec3& receiver, const Medium& medium,
                                              const LaplacePoint& s, long samples,
                                              std::uint64_t seed) {
  const TriangleElement& ev = mesh.element(element);
  const Vec3 b0 = mesh.vertex_of(ev, 0), b1 = mesh.vertex_of(ev, 1), b2 = mesh.vertex_of(ev, 2);
  const double inv_c = 1.0 / medium.sound_speed;
  const double rho_over_z = ev.impedance.is_rigid() ? 0.0 : medium.density / ev.impedance.value();
  const Complex sval = s.value();
  const double scale = ev.area / std::sqrt(ev.area);

  auto kernel = [&](std::mt19937_64& rng, std::uniform_real_distribution<double>& uni) {
    const Vec3 beta = sample_triangle(b0, b1, b2, uni(rng), uni(rng));
    const Vec3 d = receiver - beta;
    const double r = d.norm();
    const double ct = d.dot(ev.normal) / r;
    const double g = (ct * inv_c / r - rho_over_z / r) / four_pi;
    const double h = ct / (four_pi * r * r);
    const double phase = s.omega * r * inv_c;
    Complex prop(std::cos(phase), -std::sin(phase));
    if (s.sigma != 0.0) prop *= std::exp(-s.sigma * r * inv_c);
    return (sval * g + h) * prop;
  };
  return run_blocked(samples, seed, scale, kernel);
}

Complex plate_first_order(const Vec3& source, const Vec3& receiver, const AxisPlane& plane,
                          double omega, const Medium& medium) {
  const double ds = source[plane.axis] - plane.value;
  const double dr = receiver[plane.axis] - plane.value;
  if (ds * dr < 0.0)
    throw ComparisonError("plate_first_order: source and receiver must share a side of the plane");
  const Vec3 image = mirror_point(source, plane);
  const double r = (receiver - image).norm();
  const double phase = omega * r / medium.sound_speed;
  return Complex(std::cos(phase), -std::sin(phase)) / r;
}

bool plate_setup_is_grazing(const Vec3& source, const Vec3& receiver, const AxisPlane& plane,
                            double min_elevation_rad) {
  const Vec3 image = mirror_point(source, plane);
  const Vec3 path = receiver - image;
  const double len = path.norm();
  if (len == 0.0) return true;
  const double elevation = std::asin(std::min(1.0, std::abs(path[plane.axis]) / len));
  return elevation < min_elevation_rad;
}

}  // namespace bira
