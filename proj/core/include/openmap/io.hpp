#pragma once

// Flat-file output: CSV tables, binary PGM (P5) images, and JSON sidecars.

#include <filesystem>
#include <algorithm>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "openmap/phase_space.hpp"

namespace openmap::io {

using Json = nlohmann::ordered_json;

/// 1D grids: "index,<axis>,value"; 2D grids: "q_index,p_index,q,p,value",
/// row-major in q. A leading '#' line records axes, shape and normalization.
void write_density_csv(std::ostream& out, const DensityGrid& grid);

/// "a,b,q,p,value" over the doubled lattice.
void write_wigner_csv(std::ostream& out, const WignerGrid& grid);

void write_vector_csv(std::ostream& out, const std::string& column, const std::vector<double>& values);

struct PgmInfo {
  double min_value = 0.0;
  double max_value = 0.0;
  int bits = 8;
  std::size_t width = 0;
  std::size_t height = 0;
};

/// Writes a width x height grayscale P5 image. `pixel(x, y)` gives the value
/// at column x, row y (row 0 at the top); values are scaled linearly from
/// [min, max] to [0, maxval].
template <class PixelFn>
PgmInfo write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height, PixelFn pixel,
                  int bits = 8);

/// Phase-space grid as an image: q to the right, p upwards.
PgmInfo write_phase_space_pgm(const std::filesystem::path& path, const DensityGrid& grid, int bits = 8);

/// Positive part, negative part and sign mask images of a Wigner grid.
struct WignerImages {
  PgmInfo positive;
  PgmInfo negative;
  PgmInfo sign_mask;
};
WignerImages write_wigner_pgms(const std::filesystem::path& stem, const WignerGrid& grid, int bits = 8);

std::string sha256_file(const std::filesystem::path& path);

/// UTC timestamp; honours SOURCE_DATE_EPOCH for reproducible sidecars.
std::string provenance_timestamp();

std::string software_version();

/// Writes <artifact>.json next to the artifact with checksum, version,
/// timestamp, the given config and any extra fields.
void write_sidecar(const std::filesystem::path& artifact, const Json& config, const Json& extra = Json::object());

Json pgm_sidecar_fields(const PgmInfo& info, const std::string& axis_mapping);

// ---------------------------------------------------------------------------

namespace detail {
void write_pgm_bytes(const std::filesystem::path& path, std::size_t width, std::size_t height, int bits,
                     const std::vector<double>& values, double lo, double hi);
}

template <class PixelFn>
PgmInfo write_pgm(const std::filesystem::path& path, std::size_t width, std::size_t height, PixelFn pixel,
                  int bits) {
  std::vector<double> values(width * height);
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double v = pixel(x, y);
      values[y * width + x] = v;
      if (x == 0 && y == 0) {
        lo = hi = v;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  detail::write_pgm_bytes(path, width, height, bits, values, lo, hi);
  return {lo, hi, bits, width, height};
}

}  // namespace openmap::io
