#pragma once

#include <cstddef>
#include <string>

#include "pir/reynolds.hpp"

namespace pir {

/// Reads a manifest of `key=value` lines (nx, ny, dx, dy, dt, n_snapshots,
/// optional cylinder_x, cylinder_y, diameter, and optional u_pattern,
/// v_pattern, w_pattern defaulting to u_%04d.bin etc.). Field files are raw
/// little-endian doubles, x fastest, resolved relative to the manifest.
/// Fills curl_rms. Throws ParseError, MissingField or DimensionMismatch.
[[nodiscard]] SnapshotStack load_snapshot_stack(const std::string& manifest_path);

/// Writes `manifest.txt` and the field files into `directory` (created if
/// needed). Returns the manifest path.
std::string write_snapshot_stack(const std::string& directory, const SnapshotStack& stack);

struct ColumnTextLayout {
    std::size_t nx = 449;
    std::size_t ny = 199;
    double dx = 0.02;
    double dy = 0.02;
    double dt = 0.2;
    Cylinder cylinder{1.0, 1.98, 0.5};
};

/// Converts column-stacked text exports (one whitespace-separated column per
/// snapshot, nx·ny rows with x fastest) of u, v and ω into the manifest
/// format. Returns the manifest path.
std::string convert_column_text(const std::string& u_path, const std::string& v_path, const std::string& w_path,
                                const ColumnTextLayout& layout, const std::string& out_directory);

}  // namespace pir
