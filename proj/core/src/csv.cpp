#include "pir/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "pir/error.hpp"

namespace pir::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
        out.emplace_back(trim(cell));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, const std::string& context) {
    text = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::ParseError, context + ": '" + std::string(text) + "' is not a finite number");
    }
    return value;
}

void write_series(std::ostream& out, const TimeSeries& series, const std::vector<std::string>& state_names,
                  const std::string& time_column) {
    if (state_names.size() != series.dim()) {
        throw Error(ErrorKind::ShapeMismatch, "column names do not match the series width");
    }
    out << time_column;
    for (const auto& name : state_names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_number(series.times[i]);
        for (Eigen::Index j = 0; j < series.states.cols(); ++j) {
            out << ',' << format_number(series.states(static_cast<Eigen::Index>(i), j));
        }
        out << '\n';
    }
}

void write_series_file(const std::string& path, const TimeSeries& series,
                       const std::vector<std::string>& state_names, const std::string& time_column) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    write_series(out, series, state_names, time_column);
    if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

NamedSeries read_series(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) {
        throw Error(ErrorKind::ParseError, source + ": missing header row");
    }
    const auto header = split_line(line);
    if (header.size() < 2) throw Error(ErrorKind::ParseError, source + ": need a time column and at least one state");
    NamedSeries out;
    out.names.assign(header.begin() + 1, header.end());

    std::vector<double> times;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        const std::string where = source + " line " + std::to_string(line_no);
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::ParseError, where + ": expected " + std::to_string(header.size()) + " cells, got " +
                                                   std::to_string(cells.size()));
        }
        times.push_back(parse_number(cells[0], where));
        for (std::size_t c = 1; c < cells.size(); ++c) values.push_back(parse_number(cells[c], where));
    }
    const auto rows = static_cast<Eigen::Index>(times.size());
    const auto cols = static_cast<Eigen::Index>(out.names.size());
    out.series.times = std::move(times);
    out.series.states = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), rows, cols);
    return out;
}

NamedSeries read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    return read_series(in, path);
}

}  // namespace pir::csv
