#pragma once

#include <map>
#include <string>
#include <vector>

#include "tomotv/grid.hpp"

namespace tomotv {

/// Portable float grid: a small text header (kind, dims, spacing) followed by
/// the raw column-major little-endian f64 payload. Lossless round trip.
struct GridFile {
    std::string kind = "image";  // "image" or "sinogram"
    double spacing1 = 1.0;       // pixel size / bin spacing
    double spacing2 = 1.0;       // pixel size / angle step (degrees)
    Grid2D grid;
};

void save_grid(const std::string& path, const GridFile& gf);
GridFile load_grid(const std::string& path);

/// 16-bit PGM export, min-max scaled; for eyeballing results only.
void save_pgm16(const std::string& path, const Grid2D& grid);

/// Flat key = value config text; '#' starts a comment. Later keys win.
using KeyValueMap = std::map<std::string, std::string>;
KeyValueMap read_key_value_file(const std::string& path);
void write_key_value_file(const std::string& path, const KeyValueMap& kv,
                          const std::string& header_comment = "");

/// Formats a double so that reading it back reproduces the value exactly.
std::string format_double(double v);

} // namespace tomotv
