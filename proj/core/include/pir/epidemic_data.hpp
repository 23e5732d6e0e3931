#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pir/differentiation.hpp"
#include "pir/estimation.hpp"

namespace pir {

using Counts = std::vector<std::int64_t>;

/// Daily counts in people per day. Columns other than new_cases are optional.
struct RawDailySeries {
    std::vector<std::string> dates;  ///< ISO-8601 (YYYY-MM-DD); may be empty for synthetic data
    std::optional<Counts> new_cases;
    std::optional<Counts> new_deaths;
    std::optional<Counts> new_vaccinated;
    std::optional<Counts> new_hospitalized;
    std::optional<Counts> new_icu;

    /// Length of the present columns.
    [[nodiscard]] std::size_t size() const;

    /// Equal lengths among present columns, nonnegative counts.
    void validate() const;

    [[nodiscard]] bool has_s3i3r_columns() const noexcept {
        return new_cases && new_deaths && new_vaccinated && new_hospitalized && new_icu;
    }

    /// Days [first, first + count).
    [[nodiscard]] RawDailySeries slice(std::size_t first, std::size_t count) const;
};

/// Recovery rates treated as known; 1/γ is used as a whole number of days.
struct FixedRates {
    double gamma1 = 1.0 / 9.0;
    double gamma2 = 1.0 / 7.0;
    double gamma3 = 1.0 / 16.0;

    /// round(1/γ). Throws InvalidArgument when γ ≤ 0 or 1/γ < 1.
    [[nodiscard]] static std::int64_t window_days(double gamma);
};

/// S, I, R head counts per day with times 0, 1, ..., n-1.
/// S_t = S_{t-1} - ΔI⁺_t starting from S_{-1} = N; I_t is the sum of ΔI⁺ over
/// days t-w..t with w = round(1/γ1); R = N - S - I.
[[nodiscard]] TimeSeries build_sir_states(const RawDailySeries& raw, std::int64_t population,
                                          const FixedRates& rates);

/// S, I1, I2, I3, R1, R2, R3 head counts per day. Vaccinations are taken
/// from S in proportion S/(S+I1+R1) of the previous day, rounded to whole
/// people; R1 closes the population.
[[nodiscard]] TimeSeries build_s3i3r_states(const RawDailySeries& raw, std::int64_t population,
                                            const FixedRates& rates);

/// CSV with header `date,new_cases[,new_deaths,new_vaccinated,new_hospitalized,new_icu]`.
/// Unknown columns are ignored. Rows are sorted by date; duplicate dates and
/// missing days raise NonMonotonicDates.
[[nodiscard]] RawDailySeries load_who_csv(const std::string& path);
[[nodiscard]] RawDailySeries parse_who_csv(std::istream& in, const std::string& source = "<stream>");

void write_who_csv(const std::string& path, const RawDailySeries& raw);

/// Daily new infections implied by an SIR trajectory: ΔI⁺_t = round(S_{t-1} - S_t)
/// with S_{-1} = N = S_0 + I_0 + R_0, so day 0 carries the initial infections.
/// Dates are left empty.
[[nodiscard]] RawDailySeries daily_cases_from_sir(const TimeSeries& sir_states);

struct CovidOptions {
    std::string model = "sir";  ///< "sir" or "s3i3r"
    std::int64_t population = 5'831'000;
    FixedRates rates;
    std::size_t window = 14;
    DerivativeScheme scheme = DerivativeScheme::FullLength;
};

struct CovidAnalysis {
    std::vector<std::string> state_names;
    std::vector<std::string> parameter_names;
    TimeSeries states;                          ///< reconstructed compartments
    std::vector<TimeVaryingEstimate> estimates;  ///< one per day with a full window
    TimeSeries resimulated;                     ///< forward run with the estimated parameters
    std::size_t infected_column = 1;
};

/// Reconstructs compartments, estimates the time-varying parameters with the
/// recovery rates known and re-simulates from the first window start. Each
/// estimate is held from its attributed day until the next one; days before
/// the first estimate use the first estimate.
[[nodiscard]] CovidAnalysis analyze_covid(const RawDailySeries& raw, const CovidOptions& options);

}  // namespace pir
