#include "openmap/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "openmap/errors.hpp"

#ifndef OPENMAP_VERSION
#define OPENMAP_VERSION "0.0.0"
#endif

namespace openmap::io {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* normalization_name(Normalization n) {
  return n == Normalization::unit_sum ? "unit_sum" : "raw";
}

}  // namespace

void write_density_csv(std::ostream& out, const DensityGrid& grid) {
  out << "# axes=";
  for (std::size_t i = 0; i < grid.axes.size(); ++i) out << (i ? ";" : "") << grid.axes[i];
  out << " rows=" << grid.rows << " cols=" << grid.cols
      << " normalization=" << normalization_name(grid.normalization) << " cell_centres=(i+1/2)/size\n";
  if (grid.is_1d()) {
    const std::string axis = grid.axes.empty() ? "x" : grid.axes.front();
    out << "index," << axis << ",value\n";
    for (std::size_t i = 0; i < grid.cols; ++i) {
      out << i << ',' << num((static_cast<double>(i) + 0.5) / static_cast<double>(grid.cols)) << ','
          << num(grid.values[i]) << '\n';
    }
    return;
  }
  out << "q_index,p_index,q,p,value\n";
  for (std::size_t i = 0; i < grid.rows; ++i) {
    for (std::size_t j = 0; j < grid.cols; ++j) {
      out << i << ',' << j << ',' << num((static_cast<double>(i) + 0.5) / static_cast<double>(grid.rows)) << ','
          << num((static_cast<double>(j) + 0.5) / static_cast<double>(grid.cols)) << ',' << num(grid.at(i, j))
          << '\n';
    }
  }
}

void write_wigner_csv(std::ostream& out, const WignerGrid& grid) {
  const std::size_t side = grid.side();
  out << "# axes=q;p rows=" << side << " cols=" << side << " lattice=q=a/" << side << ",p=b/" << side << '\n';
  out << "a,b,q,p,value\n";
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t b = 0; b < side; ++b) {
      out << a << ',' << b << ',' << num(static_cast<double>(a) / static_cast<double>(side)) << ','
          << num(static_cast<double>(b) / static_cast<double>(side)) << ',' << num(grid.at(a, b)) << '\n';
    }
  }
}

void write_vector_csv(std::ostream& out, const std::string& column, const std::vector<double>& values) {
  out << "index," << column << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << num(values[i]) << '\n';
}

namespace detail {

void write_pgm_bytes(const std::filesystem::path& path, std::size_t width, std::size_t height, int bits,
                     const std::vector<double>& values, double lo, double hi) {
  if (bits != 8 && bits != 16) throw ValidationError("write_pgm: bits must be 8 or 16");
  const int maxval = bits == 8 ? 255 : 65535;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("write_pgm: cannot open " + path.string());
  out << "P5\n" << width << ' ' << height << '\n' << maxval << '\n';
  const double span = hi - lo;
  for (double v : values) {
    const double t = span > 0.0 ? (v - lo) / span : 0.0;
    const auto level = static_cast<unsigned>(std::lround(std::clamp(t, 0.0, 1.0) * maxval));
    if (bits == 8) {
      out.put(static_cast<char>(level));
    } else {
      out.put(static_cast<char>((level >> 8) & 0xFF));
      out.put(static_cast<char>(level & 0xFF));
    }
  }
  if (!out) throw ValidationError("write_pgm: write failed for " + path.string());
}

}  // namespace detail

PgmInfo write_phase_space_pgm(const std::filesystem::path& path, const DensityGrid& grid, int bits) {
  if (grid.is_1d()) throw ValidationError("write_phase_space_pgm: expected a 2D grid");
  return write_pgm(
      path, grid.rows, grid.cols,
      [&](std::size_t x, std::size_t y) { return grid.at(x, grid.cols - 1 - y); }, bits);
}

WignerImages write_wigner_pgms(const std::filesystem::path& stem, const WignerGrid& grid, int bits) {
  const std::size_t side = grid.side();
  auto value = [&](std::size_t x, std::size_t y) { return grid.at(x, side - 1 - y); };
  auto with_suffix = [&](const std::string& suffix) {
    std::filesystem::path p = stem;
    p += suffix;
    return p;
  };
  WignerImages images;
  images.positive = write_pgm(
      with_suffix("_positive.pgm"), side, side, [&](std::size_t x, std::size_t y) { return std::max(value(x, y), 0.0); },
      bits);
  images.negative = write_pgm(
      with_suffix("_negative.pgm"), side, side,
      [&](std::size_t x, std::size_t y) { return std::max(-value(x, y), 0.0); }, bits);
  images.sign_mask = write_pgm(
      with_suffix("_sign.pgm"), side, side, [&](std::size_t x, std::size_t y) { return value(x, y) > 0.0 ? 1.0 : 0.0; },
      8);
  return images;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("sha256_file: cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return hex.str();
}

std::string provenance_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string software_version() {
  return OPENMAP_VERSION;
}

void write_sidecar(const std::filesystem::path& artifact, const Json& config, const Json& extra) {
  Json doc;
  doc["artifact"] = artifact.filename().string();
  doc["sha256"] = sha256_file(artifact);
  doc["software"] = "openmap";
  doc["version"] = software_version();
  doc["timestamp"] = provenance_timestamp();
  doc["config"] = config;
  for (const auto& [key, value] : extra.items()) doc[key] = value;
  std::filesystem::path sidecar = artifact;
  sidecar += ".json";
  std::ofstream out(sidecar);
  if (!out) throw ValidationError("write_sidecar: cannot open " + sidecar.string());
  out << doc.dump(2) << '\n';
}

Json pgm_sidecar_fields(const PgmInfo& info, const std::string& axis_mapping) {
  Json j;
  j["min_value"] = info.min_value;
  j["max_value"] = info.max_value;
  j["bits"] = info.bits;
  j["width"] = info.width;
  j["height"] = info.height;
  j["axis_mapping"] = axis_mapping;
  return j;
}

}  // namespace openmap::io
