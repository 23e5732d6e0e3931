#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pir/differentiation.hpp"

namespace pir::csv {

/// Splits one line on commas. Surrounding whitespace is trimmed; quoting is
/// not supported (none of the numeric files use it).
[[nodiscard]] std::vector<std::string> split_line(std::string_view line);

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_number(double value);

/// Parses a finite double; throws ParseError mentioning `context` otherwise.
[[nodiscard]] double parse_number(std::string_view text, const std::string& context);

/// Header `time_column,<names...>` followed by one row per sample.
void write_series(std::ostream& out, const TimeSeries& series, const std::vector<std::string>& state_names,
                  const std::string& time_column = "t");
void write_series_file(const std::string& path, const TimeSeries& series,
                       const std::vector<std::string>& state_names, const std::string& time_column = "t");

struct NamedSeries {
    std::vector<std::string> names;  ///< state column names (time column excluded)
    TimeSeries series;
};

/// Reads a file written by write_series: first column is time.
[[nodiscard]] NamedSeries read_series(std::istream& in, const std::string& source = "<stream>");
[[nodiscard]] NamedSeries read_series_file(const std::string& path);

}  // namespace pir::csv
