#include "pir/epidemic_data.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>

#include "pir/csv.hpp"
#include "pir/error.hpp"
#include "pir/integrator.hpp"
#include "pir/models.hpp"

namespace pir {

namespace {

const Counts& require_column(const std::optional<Counts>& column, const char* name) {
    if (!column) throw Error(ErrorKind::MissingColumn, std::string("column '") + name + "' is required");
    return *column;
}

/// out[t] = Σ_{k = max(0, t - w)}^{t} in[k].
Counts trailing_sum(const Counts& in, std::int64_t w) {
    Counts out(in.size());
    std::int64_t running = 0;
    for (std::size_t t = 0; t < in.size(); ++t) {
        running += in[t];
        if (static_cast<std::int64_t>(t) > w) running -= in[t - static_cast<std::size_t>(w) - 1];
        out[t] = running;
    }
    return out;
}

Counts cumulative(const Counts& in) {
    Counts out(in.size());
    std::partial_sum(in.begin(), in.end(), out.begin());
    return out;
}

std::string day_label(const RawDailySeries& raw, std::size_t t) {
    if (t < raw.dates.size()) return raw.dates[t];
    return "day " + std::to_string(t);
}

void require_nonnegative(std::int64_t value, const char* compartment, const RawDailySeries& raw, std::size_t t) {
    if (value < 0) {
        throw Error(ErrorKind::NegativeCompartment, std::string(compartment) + " is negative (" +
                                                        std::to_string(value) + ") on " + day_label(raw, t));
    }
}

TimeSeries day_indexed(const std::vector<Counts>& columns) {
    const std::size_t n = columns.front().size();
    TimeSeries out;
    out.times.resize(n);
    out.states.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t t = 0; t < n; ++t) {
        out.times[t] = static_cast<double>(t);
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out.states(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) =
                static_cast<double>(columns[c][t]);
        }
    }
    return out;
}

std::chrono::sys_days parse_date(const std::string& text, const std::string& where) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
        throw Error(ErrorKind::ParseError, where + ": '" + text + "' is not a YYYY-MM-DD date");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw Error(ErrorKind::ParseError, where + ": '" + text + "' is not a valid date");
    return std::chrono::sys_days{ymd};
}

std::int64_t parse_count(const std::string& text, const std::string& where, const std::string& column) {
    std::int64_t value = 0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(begin, end, value);
    if (text.empty() || res.ec != std::errc() || res.ptr != end) {
        throw Error(ErrorKind::ParseError, where + ", column '" + column + "': '" + text + "' is not an integer");
    }
    if (value < 0) {
        throw Error(ErrorKind::ParseError, where + ", column '" + column + "': negative count " + text);
    }
    return value;
}

const std::vector<std::string>& count_columns() {
    static const std::vector<std::string> names{"new_cases", "new_deaths", "new_vaccinated", "new_hospitalized",
                                                "new_icu"};
    return names;
}

std::optional<Counts>& column_slot(RawDailySeries& raw, const std::string& name) {
    if (name == "new_cases") return raw.new_cases;
    if (name == "new_deaths") return raw.new_deaths;
    if (name == "new_vaccinated") return raw.new_vaccinated;
    if (name == "new_hospitalized") return raw.new_hospitalized;
    return raw.new_icu;
}

const std::optional<Counts>& column_slot(const RawDailySeries& raw, const std::string& name) {
    return column_slot(const_cast<RawDailySeries&>(raw), name);
}

}  // namespace

std::size_t RawDailySeries::size() const {
    for (const auto& name : count_columns()) {
        if (const auto& col = column_slot(*this, name)) return col->size();
    }
    return dates.size();
}

void RawDailySeries::validate() const {
    const std::size_t n = size();
    if (!dates.empty() && dates.size() != n) {
        throw Error(ErrorKind::ShapeMismatch, "date column length differs from the count columns");
    }
    for (const auto& name : count_columns()) {
        const auto& col = column_slot(*this, name);
        if (!col) continue;
        if (col->size() != n) throw Error(ErrorKind::ShapeMismatch, "column '" + name + "' has a different length");
        for (std::size_t t = 0; t < n; ++t) {
            if ((*col)[t] < 0) {
                throw Error(ErrorKind::ParseError, "column '" + name + "' is negative on " + day_label(*this, t));
            }
        }
    }
}

RawDailySeries RawDailySeries::slice(std::size_t first, std::size_t count) const {
    const std::size_t n = size();
    if (first > n || count > n - first) {
        throw Error(ErrorKind::IndexOutOfRange, "slice outside the " + std::to_string(n) + "-day series");
    }
    RawDailySeries out;
    const auto f = static_cast<std::ptrdiff_t>(first);
    const auto l = static_cast<std::ptrdiff_t>(first + count);
    if (!dates.empty()) out.dates.assign(dates.begin() + f, dates.begin() + l);
    for (const auto& name : count_columns()) {
        const auto& col = column_slot(*this, name);
        if (col) column_slot(out, name) = Counts(col->begin() + f, col->begin() + l);
    }
    return out;
}

std::int64_t FixedRates::window_days(double gamma) {
    if (!(gamma > 0.0) || !(1.0 / gamma >= 1.0 - 1e-12)) {
        throw Error(ErrorKind::InvalidArgument, "recovery rate must satisfy 0 < gamma <= 1");
    }
    return std::llround(1.0 / gamma);
}

TimeSeries build_sir_states(const RawDailySeries& raw, std::int64_t population, const FixedRates& rates) {
    raw.validate();
    const Counts& cases = require_column(raw.new_cases, "new_cases");
    if (population <= 0) throw Error(ErrorKind::NonPositivePopulation, "population must be positive");
    if (cases.empty()) throw Error(ErrorKind::TooFewPoints, "no days in the series");
    const Counts infected = trailing_sum(cases, FixedRates::window_days(rates.gamma1));

    const std::size_t n = cases.size();
    Counts s(n);
    Counts r(n);
    std::int64_t susceptible = population;
    for (std::size_t t = 0; t < n; ++t) {
        susceptible -= cases[t];
        s[t] = susceptible;
        r[t] = population - s[t] - infected[t];
        require_nonnegative(s[t], "S", raw, t);
        require_nonnegative(r[t], "R", raw, t);
    }
    return day_indexed({s, infected, r});
}

TimeSeries build_s3i3r_states(const RawDailySeries& raw, std::int64_t population, const FixedRates& rates) {
    raw.validate();
    const Counts& cases = require_column(raw.new_cases, "new_cases");
    const Counts& deaths = require_column(raw.new_deaths, "new_deaths");
    const Counts& vaccinated = require_column(raw.new_vaccinated, "new_vaccinated");
    const Counts& hospitalized = require_column(raw.new_hospitalized, "new_hospitalized");
    const Counts& icu = require_column(raw.new_icu, "new_icu");
    if (population <= 0) throw Error(ErrorKind::NonPositivePopulation, "population must be positive");
    if (cases.empty()) throw Error(ErrorKind::TooFewPoints, "no days in the series");

    const Counts cases_window = trailing_sum(cases, FixedRates::window_days(rates.gamma1));
    const Counts i2 = trailing_sum(hospitalized, FixedRates::window_days(rates.gamma2));
    const Counts i3 = trailing_sum(icu, FixedRates::window_days(rates.gamma3));
    const Counts r2 = cumulative(vaccinated);
    const Counts r3 = cumulative(deaths);

    const std::size_t n = cases.size();
    Counts s(n), i1(n), r1(n);
    std::int64_t prev_s = population;
    std::int64_t prev_i1 = 0;
    std::int64_t prev_r1 = 0;
    for (std::size_t t = 0; t < n; ++t) {
        std::int64_t vaccinated_from_s = 0;
        if (vaccinated[t] > 0) {
            const std::int64_t pool = prev_s + prev_i1 + prev_r1;
            if (pool == 0) {
                throw Error(ErrorKind::DegenerateDenominator, "S + I1 + R1 is zero before " + day_label(raw, t));
            }
            vaccinated_from_s = std::llround(static_cast<double>(vaccinated[t]) * static_cast<double>(prev_s) /
                                             static_cast<double>(pool));
        }
        s[t] = prev_s - cases[t] - vaccinated_from_s;
        i1[t] = cases_window[t] - hospitalized[t];
        r1[t] = population - s[t] - i1[t] - i2[t] - i3[t] - r2[t] - r3[t];
        require_nonnegative(s[t], "S", raw, t);
        require_nonnegative(i1[t], "I1", raw, t);
        require_nonnegative(r1[t], "R1", raw, t);
        prev_s = s[t];
        prev_i1 = i1[t];
        prev_r1 = r1[t];
    }
    return day_indexed({s, i1, i2, i3, r1, r2, r3});
}

RawDailySeries parse_who_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    // Skip a UTF-8 byte order mark and blank lines before the header.
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            have_header = true;
            break;
        }
    }
    if (!have_header) throw Error(ErrorKind::ParseError, source + ": file is empty");
    const auto header = csv::split_line(line);

    std::optional<std::size_t> date_col;
    std::map<std::string, std::size_t> count_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "date") {
            date_col = c;
        } else if (std::find(count_columns().begin(), count_columns().end(), header[c]) != count_columns().end()) {
            if (count_cols.count(header[c])) {
                throw Error(ErrorKind::ParseError, source + ": duplicate column '" + header[c] + "'");
            }
            count_cols[header[c]] = c;
        }
    }
    if (!date_col) throw Error(ErrorKind::MissingColumn, source + ": no 'date' column");
    if (!count_cols.count("new_cases")) throw Error(ErrorKind::MissingColumn, source + ": no 'new_cases' column");

    struct Row {
        std::chrono::sys_days day;
        std::string date;
        std::map<std::string, std::int64_t> counts;
        std::size_t line;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const auto cells = csv::split_line(line);
        if (cells.size() == 1 && cells.front().empty()) continue;
        const std::string where = source + " line " + std::to_string(line_no);
        if (cells.size() != header.size()) {
            throw Error(ErrorKind::ParseError, where + ": expected " + std::to_string(header.size()) + " cells, got " +
                                                   std::to_string(cells.size()));
        }
        Row row{parse_date(cells[*date_col], where), cells[*date_col], {}, line_no};
        for (const auto& [name, c] : count_cols) row.counts[name] = parse_count(cells[c], where, name);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorKind::ParseError, source + ": no data rows");

    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.day < b.day; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto gap = (rows[i].day - rows[i - 1].day).count();
        if (gap == 0) {
            throw Error(ErrorKind::NonMonotonicDates, source + ": date " + rows[i].date + " appears twice (lines " +
                                                          std::to_string(rows[i - 1].line) + " and " +
                                                          std::to_string(rows[i].line) + ")");
        }
        if (gap != 1) {
            throw Error(ErrorKind::NonMonotonicDates,
                        source + ": " + std::to_string(gap - 1) + " missing day(s) after " + rows[i - 1].date);
        }
    }

    RawDailySeries out;
    for (const auto& [name, c] : count_cols) {
        (void)c;
        column_slot(out, name) = Counts{};
    }
    for (const auto& row : rows) {
        out.dates.push_back(row.date);
        for (const auto& [name, value] : row.counts) column_slot(out, name)->push_back(value);
    }
    return out;
}

RawDailySeries load_who_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    return parse_who_csv(in, path);
}

void write_who_csv(const std::string& path, const RawDailySeries& raw) {
    raw.validate();
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    const std::size_t n = raw.size();
    std::vector<std::string> dates = raw.dates;
    if (dates.empty()) {
        // Synthetic series get consecutive dates from an arbitrary origin.
        const std::chrono::sys_days origin{std::chrono::year{2020} / 1 / 1};
        for (std::size_t t = 0; t < n; ++t) {
            const std::chrono::year_month_day ymd{origin + std::chrono::days{static_cast<int>(t)}};
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
            dates.emplace_back(buf);
        }
    }
    std::vector<std::string> present;
    for (const auto& name : count_columns()) {
        if (column_slot(raw, name)) present.push_back(name);
    }
    out << "date";
    for (const auto& name : present) out << ',' << name;
    out << '\n';
    for (std::size_t t = 0; t < n; ++t) {
        out << dates[t];
        for (const auto& name : present) out << ',' << (*column_slot(raw, name))[t];
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

RawDailySeries daily_cases_from_sir(const TimeSeries& sir_states) {
    sir_states.validate();
    if (sir_states.dim() != 3 || sir_states.size() == 0) {
        throw Error(ErrorKind::ShapeMismatch, "expected a non-empty S, I, R series");
    }
    const auto& x = sir_states.states;
    Counts cases(sir_states.size());
    double previous_s = x.row(0).sum();
    for (std::size_t t = 0; t < cases.size(); ++t) {
        const double s = x(static_cast<Eigen::Index>(t), 0);
        cases[t] = std::max<std::int64_t>(0, std::llround(previous_s - s));
        previous_s = s;
    }
    RawDailySeries raw;
    raw.new_cases = std::move(cases);
    return raw;
}

CovidAnalysis analyze_covid(const RawDailySeries& raw, const CovidOptions& options) {
    CovidAnalysis out;
    std::vector<std::pair<std::size_t, double>> known;
    std::optional<ParameterLinearModel> model;
    const double n_pop = static_cast<double>(options.population);
    if (options.model == "sir") {
        out.states = build_sir_states(raw, options.population, options.rates);
        model.emplace(sir_model(n_pop));
        known = {{1, options.rates.gamma1}};
    } else if (options.model == "s3i3r") {
        out.states = build_s3i3r_states(raw, options.population, options.rates);
        model.emplace(s3i3r_model(n_pop));
        known = {{1, options.rates.gamma1}, {2, options.rates.gamma2}, {3, options.rates.gamma3}};
    } else {
        throw Error(ErrorKind::InvalidArgument, "covid analysis supports 'sir' and 's3i3r', got '" + options.model + "'");
    }
    out.state_names = model->state_names();
    out.parameter_names = model->parameter_names();
    out.infected_column = 1;

    const auto partition = ParameterPartition::with_known(model->parameter_count(), known);
    TimeVaryingOptions tv;
    tv.estimation.scheme = options.scheme;
    out.estimates = estimate_time_varying(*model, out.states, options.window, partition, tv);
    if (out.estimates.empty()) throw Error(ErrorKind::TooFewPoints, "no complete estimation window");

    std::vector<double> times;
    std::vector<Vector> values;
    for (const auto& e : out.estimates) {
        times.push_back(e.time);
        values.push_back(e.estimate.values);
    }
    const std::size_t start = out.estimates.front().index + 1 - options.window;
    SimulationConfig sim;
    sim.t0 = out.states.times[start];
    sim.t_end = out.states.times.back();
    sim.step = 1.0;
    sim.initial_state = out.states.states.row(static_cast<Eigen::Index>(start)).transpose();
    sim.schedule = ParameterSchedule::piecewise(std::move(times), std::move(values));
    out.resimulated = simulate(*model, sim);
    return out;
}

}  // namespace pir
