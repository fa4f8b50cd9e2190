#include "bira/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "bira/errors.hpp"

namespace bira {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {
std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw ValidationError("io: cannot write " + path.string());
  return out;
}
}  // namespace

void write_transfer_csv(const std::filesystem::path& path, const TransferFunction& tf) {
  std::ofstream out = open_out(path);
  out << "freq_hz";
  for (Eigen::Index r = 0; r < tf.values.rows(); ++r) out << ",re_" << r << ",im_" << r;
  out << '\n';
  for (Eigen::Index k = 0; k < tf.values.cols(); ++k) {
    const double f = tf.grid.nfft > 0 ? tf.grid.frequency(static_cast<int>(k))
                                      : tf.diagnostics[static_cast<std::size_t>(k)].frequency;
    out << format_double(f);
    for (Eigen::Index r = 0; r < tf.values.rows(); ++r)
      out << ',' << format_double(tf.values(r, k).real()) << ','
          << format_double(tf.values(r, k).imag());
    out << '\n';
  }
}

void write_diagnostics_csv(const std::filesystem::path& path, const TransferFunction& tf) {
  std::ofstream out = open_out(path);
  out << "freq_hz,sigma_min,condition,rho_hat,residual,near_singular\n";
  for (const auto& d : tf.diagnostics) {
    out << format_double(d.frequency) << ',' << format_double(d.sigma_min) << ','
        << format_double(d.condition_estimate) << ',' << format_double(d.spectral_radius) << ','
        << format_double(d.residual_norm) << ',' << (d.near_singular ? 1 : 0) << '\n';
  }
}

void write_impulse_csv(const std::filesystem::path& path, const ImpulseResponse& ir) {
  std::ofstream out = open_out(path);
  out << "sample";
  for (Eigen::Index r = 0; r < ir.samples.rows(); ++r) out << ",r" << r;
  out << '\n';
  for (Eigen::Index i = 0; i < ir.samples.cols(); ++i) {
    out << i;
    for (Eigen::Index r = 0; r < ir.samples.rows(); ++r)
      out << ',' << format_double(ir.samples(r, i));
    out << '\n';
  }
}

namespace {
void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}
void put_u16(std::ofstream& out, std::uint16_t v) {
  out.write(reinterpret_cast<const char*>(&v), 2);
}
}  // namespace

void write_impulse_wav(const std::filesystem::path& path_prefix, const ImpulseResponse& ir) {
  for (Eigen::Index r = 0; r < ir.samples.rows(); ++r) {
    std::filesystem::path p = path_prefix;
    p += "_r" + std::to_string(r) + ".wav";
    std::ofstream out = open_out(p, true);
    const auto n = static_cast<std::uint32_t>(ir.samples.cols());
    const std::uint32_t data_bytes = n * 4;
    out.write("RIFF", 4);
    put_u32(out, 36 + data_bytes);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    put_u32(out, 16);
    put_u16(out, 3);  // IEEE float
    put_u16(out, 1);  // mono
    const auto rate = static_cast<std::uint32_t>(ir.fs + 0.5);
    put_u32(out, rate);
    put_u32(out, rate * 4);
    put_u16(out, 4);
    put_u16(out, 32);
    out.write("data", 4);
    put_u32(out, data_bytes);
    for (Eigen::Index i = 0; i < ir.samples.cols(); ++i) {
      const float v = static_cast<float>(ir.samples(r, i));
      out.write(reinterpret_cast<const char*>(&v), 4);
    }
  }
}

void write_matrix_csv(const std::filesystem::path& path, const CMatrix& m) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

void write_vector_csv(const std::filesystem::path& path, const CVector& v) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << format_double(v(i).real()) << ',' << format_double(v(i).imag()) << '\n';
}

void write_operator_binary(const std::filesystem::path& path_prefix, const OperatorSet& ops) {
  auto dump = [&](const char* name, const Complex* data, Eigen::Index count) {
    std::filesystem::path p = path_prefix;
    p += std::string("_") + name + ".bin";
    std::ofstream out = open_out(p, true);
    // Interleaved little-endian re/im doubles; Eigen stores column-major, so
    // copy through a row-major pass for the documented layout.
    out.write(reinterpret_cast<const char*>(data), count * static_cast<Eigen::Index>(sizeof(Complex)));
  };
  // Row-major copies for the documented layout.
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a = ops.A, c = ops.C;
  dump("A", a.data(), a.size());
  dump("B", ops.B.data(), ops.B.size());
  dump("C", c.data(), c.size());
  dump("D", ops.D.data(), ops.D.size());

  nlohmann::json meta{{"N", ops.state_size()},
                      {"M", ops.receiver_count()},
                      {"s", {{"sigma", ops.s.sigma}, {"omega", ops.s.omega}}},
                      {"layout", "row-major"}};
  std::filesystem::path p = path_prefix;
  p += "_operators.json";
  write_text(p, meta.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out = open_out(path);
  out << content;
}

}  // namespace bira
