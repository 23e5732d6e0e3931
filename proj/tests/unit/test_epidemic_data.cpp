#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pir/epidemic_data.hpp"
#include "pir/integrator.hpp"
#include "test_support.hpp"

using namespace pir;
using pir::testing::expect_error;
using pir::testing::Gen;

namespace {

RawDailySeries cases_only(Counts cases) {
    RawDailySeries raw;
    raw.new_cases = std::move(cases);
    return raw;
}

RawDailySeries full_columns(std::size_t n) {
    RawDailySeries raw;
    raw.new_cases = Counts(n, 0);
    raw.new_deaths = Counts(n, 0);
    raw.new_vaccinated = Counts(n, 0);
    raw.new_hospitalized = Counts(n, 0);
    raw.new_icu = Counts(n, 0);
    return raw;
}

RawDailySeries parse(const std::string& text) {
    std::istringstream in(text);
    return parse_who_csv(in, "test.csv");
}

std::vector<double> column(const TimeSeries& s, Eigen::Index c) {
    std::vector<double> out(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) out[t] = s.states(static_cast<Eigen::Index>(t), c);
    return out;
}

}  // namespace

TEST(BuildSirStates, SmallExample) {
    FixedRates rates;
    rates.gamma1 = 0.5;
    const auto s = build_sir_states(cases_only({0, 2, 3, 0}), 10, rates);
    EXPECT_EQ(column(s, 0), (std::vector<double>{10, 8, 5, 5}));
    EXPECT_EQ(column(s, 1), (std::vector<double>{0, 2, 5, 5}));
    EXPECT_EQ(column(s, 2), (std::vector<double>{0, 0, 0, 0}));
    EXPECT_EQ(s.times, (std::vector<double>{0, 1, 2, 3}));
}

TEST(BuildSirStates, NoCasesKeepsEveryoneSusceptible) {
    const auto s = build_sir_states(cases_only(Counts(20, 0)), 1000, {});
    EXPECT_TRUE((s.states.col(0).array() == 1000.0).all());
    EXPECT_TRUE(s.states.rightCols(2).isZero(0.0));
}

TEST(BuildSirStates, InfectionsLeaveAfterTheWindow) {
    FixedRates rates;
    rates.gamma1 = 1.0 / 3.0;  // window of 3 + 1 days
    Counts cases(10, 0);
    cases[2] = 7;
    const auto s = build_sir_states(cases_only(cases), 100, rates);
    EXPECT_EQ(column(s, 1), (std::vector<double>{0, 0, 7, 7, 7, 7, 0, 0, 0, 0}));
    EXPECT_EQ(s.states(6, 2), 7.0);
}

TEST(BuildSirStates, Errors) {
    expect_error(ErrorKind::NonPositivePopulation, [] { (void)build_sir_states(cases_only({1}), 0, {}); });
    expect_error(ErrorKind::NegativeCompartment, [] { (void)build_sir_states(cases_only({5, 6}), 10, {}); });
    expect_error(ErrorKind::MissingColumn, [] { (void)build_sir_states(RawDailySeries{}, 10, {}); });
    expect_error(ErrorKind::TooFewPoints, [] { (void)build_sir_states(cases_only({}), 10, {}); });
    FixedRates bad;
    bad.gamma1 = 0.0;
    expect_error(ErrorKind::InvalidArgument, [&] { (void)build_sir_states(cases_only({1}), 10, bad); });
}

TEST(FixedRates, WindowDays) {
    EXPECT_EQ(FixedRates::window_days(1.0 / 9.0), 9);
    EXPECT_EQ(FixedRates::window_days(1.0 / 7.0), 7);
    EXPECT_EQ(FixedRates::window_days(1.0 / 16.0), 16);
    EXPECT_EQ(FixedRates::window_days(0.3), 3);
    expect_error(ErrorKind::InvalidArgument, [] { (void)FixedRates::window_days(2.0); });
}

TEST(BuildS3i3rStates, VaccinationPulse) {
    auto raw = full_columns(5);
    (*raw.new_vaccinated)[2] = 100;
    const auto s = build_s3i3r_states(raw, 1000, {});
    EXPECT_EQ(column(s, 0), (std::vector<double>{1000, 1000, 900, 900, 900}));
    EXPECT_EQ(column(s, 5), (std::vector<double>{0, 0, 100, 100, 100}));
    EXPECT_TRUE(s.states.col(4).isZero(0.0));
}

TEST(BuildS3i3rStates, VaccinationsSplitByPreviousDayShare) {
    auto raw = full_columns(15);
    (*raw.new_cases)[0] = 400;
    (*raw.new_vaccinated)[12] = 100;
    const auto s = build_s3i3r_states(raw, 1000, {});
    // Day 11: S = 600, I1 = 0 (window passed), R1 = 400; S takes 60 of 100.
    EXPECT_EQ(s.states(11, 0), 600.0);
    EXPECT_EQ(s.states(11, 4), 400.0);
    EXPECT_EQ(s.states(12, 0), 540.0);
    EXPECT_EQ(s.states(12, 4), 360.0);
    EXPECT_EQ(s.states(12, 5), 100.0);
}

TEST(BuildS3i3rStates, HospitalAndIcuWindows) {
    auto raw = full_columns(40);
    (*raw.new_cases)[0] = 1000;
    (*raw.new_cases)[12] = 20;
    (*raw.new_hospitalized)[12] = 10;
    (*raw.new_icu)[13] = 4;
    (*raw.new_deaths)[15] = 2;
    const auto s = build_s3i3r_states(raw, 10000, {});
    EXPECT_EQ(s.states(12, 1), 10.0);  // case window minus the day's admissions
    EXPECT_EQ(s.states(13, 1), 20.0);
    EXPECT_EQ(s.states(19, 2), 10.0);  // I2 window of 7 + 1 days
    EXPECT_EQ(s.states(20, 2), 0.0);
    EXPECT_EQ(s.states(29, 3), 4.0);   // I3 window of 16 + 1 days
    EXPECT_EQ(s.states(30, 3), 0.0);
    EXPECT_EQ(s.states(39, 6), 2.0);
    EXPECT_EQ(s.states(13, 4), 1020.0 - 20.0 - 10.0 - 4.0);
}

TEST(BuildS3i3rStates, Errors) {
    expect_error(ErrorKind::MissingColumn, [] { (void)build_s3i3r_states(cases_only({1, 2}), 100, {}); });
    auto raw = full_columns(3);
    (*raw.new_cases)[0] = 200;
    expect_error(ErrorKind::NegativeCompartment, [&] { (void)build_s3i3r_states(raw, 100, {}); });
}

TEST(RawDailySeries, ValidateAndSlice) {
    auto raw = full_columns(4);
    raw.new_deaths->pop_back();
    expect_error(ErrorKind::ShapeMismatch, [&] { raw.validate(); });
    auto ok = cases_only({1, 2, 3, 4});
    ok.dates = {"2020-01-01", "2020-01-02", "2020-01-03", "2020-01-04"};
    const auto part = ok.slice(1, 2);
    EXPECT_EQ(*part.new_cases, (Counts{2, 3}));
    EXPECT_EQ(part.dates, (std::vector<std::string>{"2020-01-02", "2020-01-03"}));
    expect_error(ErrorKind::IndexOutOfRange, [&] { (void)ok.slice(3, 2); });
    EXPECT_FALSE(ok.has_s3i3r_columns());
    EXPECT_TRUE(full_columns(2).has_s3i3r_columns());
}

TEST(WhoCsv, ParsesMinimalFile) {
    const auto raw = parse("date,new_cases\n2020-03-01,0\n2020-03-02,5\n2020-03-03,2\n");
    EXPECT_EQ(raw.size(), 3u);
    EXPECT_EQ(*raw.new_cases, (Counts{0, 5, 2}));
    EXPECT_EQ(raw.dates.front(), "2020-03-01");
    EXPECT_FALSE(raw.new_deaths.has_value());
    EXPECT_FALSE(raw.has_s3i3r_columns());
}

TEST(WhoCsv, SortsRowsAndIgnoresUnknownColumns) {
    const auto raw = parse(
        "\xEF\xBB\xBF"
        "country,date,new_cases,new_deaths,new_vaccinated,new_hospitalized,new_icu\n"
        "DK,2021-01-02,7,1,3,2,1\n"
        "\n"
        "DK,2021-01-01,5,0,0,1,0\n");
    EXPECT_EQ(raw.dates, (std::vector<std::string>{"2021-01-01", "2021-01-02"}));
    EXPECT_EQ(*raw.new_cases, (Counts{5, 7}));
    EXPECT_EQ(*raw.new_icu, (Counts{0, 1}));
    EXPECT_TRUE(raw.has_s3i3r_columns());
}

TEST(WhoCsv, Errors) {
    expect_error(ErrorKind::ParseError, [] { (void)parse(""); });
    expect_error(ErrorKind::ParseError, [] { (void)parse("date,new_cases\n2020-01-01,-3\n"); });
    expect_error(ErrorKind::ParseError, [] { (void)parse("date,new_cases\n2020-01-01,abc\n"); });
    expect_error(ErrorKind::ParseError, [] { (void)parse("date,new_cases\n2020-13-01,1\n"); });
    expect_error(ErrorKind::ParseError, [] { (void)parse("date,new_cases\n2020-01-01,1,2\n"); });
    expect_error(ErrorKind::MissingColumn, [] { (void)parse("date,new_deaths\n2020-01-01,1\n"); });
    expect_error(ErrorKind::MissingColumn, [] { (void)parse("day,new_cases\n2020-01-01,1\n"); });
    expect_error(ErrorKind::NonMonotonicDates, [] { (void)parse("date,new_cases\n2020-01-01,1\n2020-01-01,2\n"); });
    expect_error(ErrorKind::NonMonotonicDates, [] { (void)parse("date,new_cases\n2020-01-01,1\n2020-01-03,2\n"); });
    expect_error(ErrorKind::IoError, [] { (void)load_who_csv("/nonexistent/who.csv"); });
}

TEST(WhoCsv, WriteThenLoadRoundTrip) {
    auto raw = full_columns(40);
    Gen g(71);
    for (auto* col : {&raw.new_cases, &raw.new_deaths, &raw.new_vaccinated, &raw.new_hospitalized, &raw.new_icu}) {
        for (auto& v : **col) v = g.integer(0, 1000);
    }
    const auto path = (std::filesystem::temp_directory_path() / "pir_who_roundtrip.csv").string();
    write_who_csv(path, raw);
    const auto back = load_who_csv(path);
    EXPECT_EQ(back.dates.front(), "2020-01-01");
    EXPECT_EQ(back.dates.back(), "2020-02-09");
    EXPECT_EQ(*back.new_cases, *raw.new_cases);
    EXPECT_EQ(*back.new_icu, *raw.new_icu);
    std::filesystem::remove(path);
}

TEST(DailyCases, RecoversInitialInfectionsOnDayZero) {
    TimeSeries s({0, 1, 2}, Matrix::Zero(3, 3));
    s.states << 90, 10, 0, 85, 12, 3, 84.6, 11, 4.4;
    const auto raw = daily_cases_from_sir(s);
    EXPECT_EQ(*raw.new_cases, (Counts{10, 5, 0}));
    EXPECT_TRUE(raw.dates.empty());
}

TEST(AnalyzeCovid, EstimateCountAndShapes) {
    const double n = 5'831'000.0;
    SimulationConfig c;
    c.t0 = 0.0;
    c.t_end = 99.0;
    c.step = 1.0;
    Vector x0(3);
    x0 << n - 2000.0, 2000.0, 0.0;
    c.initial_state = x0;
    Vector base(2);
    base << 0.25, 1.0 / 9.0;
    c.schedule = ParameterSchedule::sinusoidal(base, 0, 0.25, 0.05, 60.0);
    const auto truth = simulate(sir_model(n), c);
    const auto analysis = analyze_covid(daily_cases_from_sir(truth), {});
    EXPECT_EQ(analysis.states.size(), 100u);
    EXPECT_EQ(analysis.estimates.size(), 87u);
    EXPECT_EQ(analysis.resimulated.size(), 100u);  // from the first window start
    EXPECT_EQ(analysis.parameter_names, (std::vector<std::string>{"beta", "gamma"}));
    for (const auto& e : analysis.estimates) EXPECT_EQ(e.estimate.values(1), 1.0 / 9.0);

    CovidOptions bad;
    bad.model = "seir";
    expect_error(ErrorKind::InvalidArgument, [&] { (void)analyze_covid(daily_cases_from_sir(truth), bad); });
    bad.model = "s3i3r";
    expect_error(ErrorKind::MissingColumn, [&] { (void)analyze_covid(daily_cases_from_sir(truth), bad); });
}

// Properties.

TEST(EpidemicDataProperties, PopulationClosure) {
    Gen g(72);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t days = static_cast<std::size_t>(g.integer(1, 120));
        auto raw = full_columns(days);
        // Admissions, deaths and vaccinations start once earlier cases have
        // left the infection window, so every compartment stays consistent.
        for (std::size_t t = 0; t < days; ++t) {
            (*raw.new_cases)[t] = g.integer(1000, 2000);
            if (t < 15) continue;
            (*raw.new_hospitalized)[t] = g.integer(0, 20);
            (*raw.new_icu)[t] = g.integer(0, 3);
            (*raw.new_deaths)[t] = g.integer(0, 2);
            (*raw.new_vaccinated)[t] = g.integer(0, 800);
        }
        const std::int64_t population = 1'000'000;
        const auto sir = build_sir_states(raw, population, {});
        const auto s3 = build_s3i3r_states(raw, population, {});
        for (std::size_t t = 0; t < days; ++t) {
            const auto row = static_cast<Eigen::Index>(t);
            EXPECT_EQ(sir.states.row(row).sum(), static_cast<double>(population));
            EXPECT_EQ(s3.states.row(row).sum(), static_cast<double>(population));
            EXPECT_GE(s3.states.row(row).minCoeff(), 0.0);
            if (t > 0) {
                EXPECT_GE(s3.states(row, 5), s3.states(row - 1, 5));  // R2 never decreases
                EXPECT_GE(s3.states(row, 6), s3.states(row - 1, 6));  // R3 never decreases
                EXPECT_LE(s3.states(row, 0), s3.states(row - 1, 0));
            }
        }
    }
}

TEST(EpidemicDataProperties, RollingWindowIdentity) {
    Gen g(73);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t days = static_cast<std::size_t>(g.integer(2, 80));
        Counts cases(days);
        for (auto& c : cases) c = g.integer(0, 100);
        FixedRates rates;
        rates.gamma1 = 1.0 / g.integer(1, 20);
        const auto w = FixedRates::window_days(rates.gamma1);
        const auto s = build_sir_states(cases_only(cases), 10'000'000, rates);
        for (std::size_t t = 1; t < days; ++t) {
            const auto row = static_cast<Eigen::Index>(t);
            double expected = static_cast<double>(cases[t]);
            if (static_cast<std::int64_t>(t) > w) expected -= static_cast<double>(cases[t - static_cast<std::size_t>(w) - 1]);
            EXPECT_EQ(s.states(row, 1) - s.states(row - 1, 1), expected);
        }
    }
}
