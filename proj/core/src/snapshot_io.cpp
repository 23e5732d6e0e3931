#include "pir/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "pir/csv.hpp"
#include "pir/error.hpp"

namespace pir {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string field_name(const std::string& pattern, std::size_t index) {
    char buf[512];
    const int len = std::snprintf(buf, sizeof(buf), pattern.c_str(), static_cast<int>(index));
    if (len < 0 || static_cast<std::size_t>(len) >= sizeof(buf)) {
        throw Error(ErrorKind::ParseError, "bad file pattern '" + pattern + "'");
    }
    return buf;
}

double to_little_endian(double value) {
    if constexpr (std::endian::native == std::endian::little) {
        return value;
    } else {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &value, sizeof bits);
        bits = __builtin_bswap64(bits);
        std::memcpy(&value, &bits, sizeof bits);
        return value;
    }
}

Matrix read_field(const fs::path& path, std::size_t nx, std::size_t ny) {
    if (!fs::exists(path)) throw Error(ErrorKind::MissingField, "field file '" + path.string() + "' not found");
    const auto bytes = fs::file_size(path);
    const auto expected = static_cast<std::uintmax_t>(nx * ny * sizeof(double));
    if (bytes != expected) {
        throw Error(ErrorKind::DimensionMismatch, "'" + path.string() + "' has " + std::to_string(bytes) +
                                                      " bytes, expected " + std::to_string(expected) + " for " +
                                                      std::to_string(nx) + "x" + std::to_string(ny));
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    // Column-major nx×ny storage is exactly "x fastest".
    Matrix m(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(ny));
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(expected));
    if (!in) throw Error(ErrorKind::IoError, "failed reading '" + path.string() + "'");
    if constexpr (std::endian::native != std::endian::little) {
        for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = to_little_endian(m.data()[k]);
    }
    return m;
}

void write_field(const fs::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "' for writing");
    for (Eigen::Index k = 0; k < m.size(); ++k) {
        const double v = to_little_endian(m.data()[k]);
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
    if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path.string() + "'");
}

class Manifest {
public:
    Manifest(std::map<std::string, std::string> entries, std::string source)
        : entries_(std::move(entries)), source_(std::move(source)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    const std::string& text(const std::string& key) const {
        const auto it = entries_.find(key);
        if (it == entries_.end()) throw Error(ErrorKind::MissingField, source_ + ": missing key '" + key + "'");
        return it->second;
    }

    std::string text_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? text(key) : fallback;
    }

    double number(const std::string& key) const { return csv::parse_number(text(key), source_ + " key '" + key + "'"); }

    std::size_t count(const std::string& key) const {
        const double v = number(key);
        if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw Error(ErrorKind::ParseError, source_ + ": key '" + key + "' must be a nonnegative integer");
        }
        return static_cast<std::size_t>(v);
    }

private:
    std::map<std::string, std::string> entries_;
    std::string source_;
};

Manifest read_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingField, "manifest '" + path.string() + "' not found");
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::ParseError,
                        path.string() + " line " + std::to_string(line_no) + ": expected key=value");
        }
        entries[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return Manifest(std::move(entries), path.string());
}

std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t rows) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingField, "cannot open '" + path + "'");
    std::vector<std::vector<double>> columns;
    std::string line;
    std::size_t row = 0;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        for (char& ch : line) {
            if (ch == ',') ch = ' ';
        }
        std::istringstream cells(line);
        std::vector<double> values;
        std::string cell;
        while (cells >> cell) values.push_back(csv::parse_number(cell, path + " line " + std::to_string(line_no)));
        if (values.empty()) continue;
        if (columns.empty()) {
            columns.assign(values.size(), std::vector<double>(rows));
        } else if (values.size() != columns.size()) {
            throw Error(ErrorKind::DimensionMismatch, path + " line " + std::to_string(line_no) + " has " +
                                                          std::to_string(values.size()) + " columns, expected " +
                                                          std::to_string(columns.size()));
        }
        if (row >= rows) {
            throw Error(ErrorKind::DimensionMismatch, path + " has more than " + std::to_string(rows) + " rows");
        }
        for (std::size_t c = 0; c < values.size(); ++c) columns[c][row] = values[c];
        ++row;
    }
    if (row != rows) {
        throw Error(ErrorKind::DimensionMismatch,
                    path + " has " + std::to_string(row) + " rows, expected " + std::to_string(rows));
    }
    return columns;
}

}  // namespace

SnapshotStack load_snapshot_stack(const std::string& manifest_path) {
    const fs::path manifest_file(manifest_path);
    const Manifest m = read_manifest(manifest_file);
    SnapshotStack s;
    s.nx = m.count("nx");
    s.ny = m.count("ny");
    s.dx = m.number("dx");
    s.dy = m.number("dy");
    s.dt = m.number("dt");
    const std::size_t snapshots = m.count("n_snapshots");
    if (m.has("cylinder_x") || m.has("cylinder_y") || m.has("diameter")) {
        s.cylinder = Cylinder{m.number("cylinder_x"), m.number("cylinder_y"), m.number("diameter")};
    }
    const fs::path base = manifest_file.parent_path();
    const std::string patterns[3] = {m.text_or("u_pattern", "u_%04d.bin"), m.text_or("v_pattern", "v_%04d.bin"),
                                     m.text_or("w_pattern", "w_%04d.bin")};
    std::vector<Matrix>* targets[3] = {&s.u, &s.v, &s.w};
    for (int f = 0; f < 3; ++f) {
        targets[f]->reserve(snapshots);
        for (std::size_t n = 0; n < snapshots; ++n) {
            targets[f]->push_back(read_field(base / field_name(patterns[f], n), s.nx, s.ny));
        }
    }
    s.validate();
    s.curl_rms = curl_residual_rms(s);
    return s;
}

std::string write_snapshot_stack(const std::string& directory, const SnapshotStack& stack) {
    stack.validate();
    const fs::path dir(directory);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create '" + directory + "': " + ec.message());
    const fs::path manifest = dir / "manifest.txt";
    {
        std::ofstream out(manifest);
        if (!out) throw Error(ErrorKind::IoError, "cannot write '" + manifest.string() + "'");
        out << "nx=" << stack.nx << '\n'
            << "ny=" << stack.ny << '\n'
            << "dx=" << csv::format_number(stack.dx) << '\n'
            << "dy=" << csv::format_number(stack.dy) << '\n'
            << "dt=" << csv::format_number(stack.dt) << '\n'
            << "n_snapshots=" << stack.snapshot_count() << '\n';
        if (stack.cylinder) {
            out << "cylinder_x=" << csv::format_number(stack.cylinder->x) << '\n'
                << "cylinder_y=" << csv::format_number(stack.cylinder->y) << '\n'
                << "diameter=" << csv::format_number(stack.cylinder->diameter) << '\n';
        }
        out << "u_pattern=u_%04d.bin\nv_pattern=v_%04d.bin\nw_pattern=w_%04d.bin\n";
    }
    for (std::size_t n = 0; n < stack.snapshot_count(); ++n) {
        write_field(dir / field_name("u_%04d.bin", n), stack.u[n]);
        write_field(dir / field_name("v_%04d.bin", n), stack.v[n]);
        write_field(dir / field_name("w_%04d.bin", n), stack.w[n]);
    }
    return manifest.string();
}

std::string convert_column_text(const std::string& u_path, const std::string& v_path, const std::string& w_path,
                                const ColumnTextLayout& layout, const std::string& out_directory) {
    const std::size_t cells = layout.nx * layout.ny;
    const auto u = read_columns(u_path, cells);
    const auto v = read_columns(v_path, cells);
    const auto w = read_columns(w_path, cells);
    if (u.size() != w.size() || v.size() != w.size()) {
        throw Error(ErrorKind::DimensionMismatch, "u, v and w exports have different snapshot counts");
    }
    SnapshotStack s;
    s.nx = layout.nx;
    s.ny = layout.ny;
    s.dx = layout.dx;
    s.dy = layout.dy;
    s.dt = layout.dt;
    s.cylinder = layout.cylinder;
    const auto rows = static_cast<Eigen::Index>(layout.nx);
    const auto cols = static_cast<Eigen::Index>(layout.ny);
    for (std::size_t n = 0; n < w.size(); ++n) {
        s.u.push_back(Eigen::Map<const Matrix>(u[n].data(), rows, cols));
        s.v.push_back(Eigen::Map<const Matrix>(v[n].data(), rows, cols));
        s.w.push_back(Eigen::Map<const Matrix>(w[n].data(), rows, cols));
    }
    return write_snapshot_stack(out_directory, s);
}

}  // namespace pir
