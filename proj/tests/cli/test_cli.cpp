#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "pir/pir.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = PIR_CLI_PATH;
const std::string kConfigs = PIR_CONFIG_DIR;

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("pir_cli_" + name)) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }
    [[nodiscard]] std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

/// Runs the CLI with stdout and stderr captured to `dir/console.txt`.
int run(const std::string& args, const TempDir& dir) {
    const std::string cmd = kCli + " " + args + " > " + (dir / "console.txt") + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const std::string& name) { return kConfigs + "/" + name + ".cfg"; }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& path) {
    std::istringstream in(slurp(path));
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(CliSimulate, SirDefaultIs81RowsConservingMass) {
    TempDir dir("sim_sir");
    ASSERT_EQ(run("simulate --config " + config("sir_constant") + " --out " + dir.str(), dir), 0);
    const auto named = pir::csv::read_series_file(dir / "trajectory.csv");
    EXPECT_EQ(named.names, (std::vector<std::string>{"S", "I", "R"}));
    ASSERT_EQ(named.series.size(), 81u);
    for (Eigen::Index i = 0; i < named.series.states.rows(); ++i) {
        EXPECT_NEAR(named.series.states.row(i).sum(), 1.0, 1e-9);
    }
    EXPECT_NE(slurp(dir / "console.txt").find("conservation"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "run.log"));
}

TEST(CliSimulate, LotkaVolterraIs1000Rows) {
    TempDir dir("sim_lv");
    ASSERT_EQ(run("simulate --config " + config("lotka_volterra") + " --out " + dir.str(), dir), 0);
    EXPECT_EQ(lines(dir / "trajectory.csv").size(), 1001u);
}

TEST(CliSimulate, MissingModelIsUsageError) {
    TempDir dir("sim_nomodel");
    write_text(dir / "c.cfg", "sim.t_end=3\nsim.step=1\nsim.initial_state=1,0,0\n");
    EXPECT_EQ(run("simulate --config " + (dir / "c.cfg") + " --out " + (dir / "out"), dir), 2);
    EXPECT_NE(slurp(dir / "console.txt").find("model"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliSimulate, ConfigErrorsAreUsageErrors) {
    TempDir dir("sim_config_errors");
    const std::string base = "simulate --config " + config("sir_constant") + " --out " + (dir / "out");
    EXPECT_EQ(run(base + " --set sim.stpe=1", dir), 2);
    EXPECT_EQ(run(base + " --set model=seir", dir), 2);
    EXPECT_EQ(run(base + " --set sim.step=abc", dir), 2);
    EXPECT_EQ(run(base + " --set sim.points=81", dir), 2);
    EXPECT_EQ(run(base + " --set sim.initial_state=1,0", dir), 2);
    EXPECT_EQ(run("simulate --bogus", dir), 2);
    EXPECT_EQ(run("", dir), 2);
    EXPECT_EQ(run("--help", dir), 0);
}

TEST(CliSimulate, SeedSelectsTheNoiseRealisation) {
    TempDir dir("sim_seed");
    const std::string base = "simulate --config " + config("lotka_volterra") + " --out ";
    ASSERT_EQ(run(base + (dir / "a") + " --seed 3", dir), 0);
    ASSERT_EQ(run(base + (dir / "b") + " --seed 3", dir), 0);
    ASSERT_EQ(run(base + (dir / "c") + " --seed 4", dir), 0);
    EXPECT_EQ(slurp(dir / "a/trajectory.csv"), slurp(dir / "b/trajectory.csv"));
    EXPECT_NE(slurp(dir / "a/trajectory.csv"), slurp(dir / "c/trajectory.csv"));
}

TEST(CliEstimate, SirConstantEndToEnd) {
    TempDir dir("est_sir");
    ASSERT_EQ(run("estimate --config " + config("sir_constant") + " --out " + dir.str(), dir), 0);
    const auto summary = read_json(dir / "summary.json");
    EXPECT_LE(summary["relative_errors"]["beta"].get<double>(), 1e-3);
    EXPECT_LE(summary["relative_errors"]["gamma"].get<double>(), 1e-3);
    const auto rows = lines(dir / "estimates.csv");
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], "beta,gamma,residual_norm,condition");
}

TEST(CliEstimate, DataFileGivesTheSameEstimate) {
    TempDir dir("est_data");
    ASSERT_EQ(run("simulate --config " + config("sir_constant") + " --out " + (dir / "sim"), dir), 0);
    ASSERT_EQ(run("estimate --config " + config("sir_constant") + " --out " + (dir / "from_config"), dir), 0);
    ASSERT_EQ(run("estimate --config " + config("sir_constant") + " --data " + (dir / "sim/trajectory.csv") +
                      " --out " + (dir / "from_data"),
                  dir),
              0);
    EXPECT_EQ(slurp(dir / "from_config/estimates.csv"), slurp(dir / "from_data/estimates.csv"));
}

TEST(CliEstimate, VaryingModeOnConstantDataIsFlat) {
    TempDir dir("est_flat");
    write_text(dir / "c.cfg",
               "model=sir\nmodel.population=1\nsim.t_end=40\nsim.step=0.25\nsim.initial_state=0.9999,0.0001,0\n"
               "params.beta=0.5\nparams.gamma=0.3333333333333333\nestimate.mode=varying\nestimate.width=7\n");
    ASSERT_EQ(run("estimate --config " + (dir / "c.cfg") + " --out " + dir.str(), dir), 0);
    const auto rows = lines(dir / "estimates.csv");
    ASSERT_GT(rows.size(), 100u);
    EXPECT_EQ(rows[0], "index,t,width,widened,beta,gamma,residual_norm,condition");
    const auto summary = read_json(dir / "summary.json");
    EXPECT_LE(summary["mean_abs_re"]["beta"].get<double>(), 1e-3);
    EXPECT_LE(summary["mean_abs_re"]["gamma"].get<double>(), 1e-3);
}

TEST(CliEstimate, TruthFile) {
    TempDir dir("est_truth");
    ASSERT_EQ(run("simulate --config " + config("sir_constant") + " --out " + (dir / "sim"), dir), 0);
    const std::string data = " --data " + (dir / "sim/trajectory.csv");
    write_text(dir / "truth.csv", "t,beta,gamma\n0,0.5,0.3333333333333333\n");
    ASSERT_EQ(run("estimate --config " + config("sir_constant") + data + " --truth " + (dir / "truth.csv") +
                      " --out " + (dir / "ok"),
                  dir),
              0);
    EXPECT_LE(read_json(dir / "ok/summary.json")["relative_errors"]["beta"].get<double>(), 1e-3);

    write_text(dir / "short.csv", "t,beta,gamma\n0,0.5,0.3\n1,0.5,0.3\n");
    EXPECT_EQ(run("estimate --config " + config("sir_constant") + data + " --truth " + (dir / "short.csv") +
                      " --out " + (dir / "bad"),
                  dir),
              3);
    EXPECT_NE(slurp(dir / "console.txt").find("truth rows"), std::string::npos);

    write_text(dir / "names.csv", "t,b,g\n0,0.5,0.3\n");
    EXPECT_EQ(run("estimate --config " + config("sir_constant") + data + " --truth " + (dir / "names.csv") +
                      " --out " + (dir / "bad"),
                  dir),
              3);
}

TEST(CliEstimate, DataColumnsMustMatchTheModel) {
    TempDir dir("est_columns");
    ASSERT_EQ(run("simulate --config " + config("sir_constant") + " --out " + (dir / "sim"), dir), 0);
    EXPECT_EQ(run("estimate --config " + config("s3i3r_constant") + " --data " + (dir / "sim/trajectory.csv") +
                      " --out " + (dir / "out"),
                  dir),
              3);
}

TEST(CliEstimate, NumericalFailuresExitWithFour) {
    TempDir dir("est_numerical");
    // Seven state equations cannot determine eight unknown parameters.
    write_text(dir / "c.cfg",
               "model=s3i3r\nmodel.population=1\nsim.t_end=20\nsim.step=1\nsim.initial_state=0.9999,0.0001,0,0,0,0,0\n"
               "params.beta=0.5\nparams.gamma1=0.3\nparams.gamma2=0.05\nparams.gamma3=0.05\nparams.tau=0\n"
               "params.theta=0.1\nparams.phi1=0.05\nparams.phi2=0.05\nestimate.mode=varying\nestimate.width=1\n");
    EXPECT_EQ(run("estimate --config " + (dir / "c.cfg") + " --out " + (dir / "out"), dir), 4);
    EXPECT_NE(slurp(dir / "console.txt").find("UnderDetermined"), std::string::npos);
}

TEST(CliSweep, SingleDrawIsSingleRow) {
    TempDir dir("sweep_one");
    ASSERT_EQ(run("sweep --config " + config("sir_sweep") + " --set sweep.samples=1 --out " + dir.str(), dir), 0);
    EXPECT_EQ(lines(dir / "histogram.csv").size(), 2u);
    const auto t = read_json(dir / "thresholds.json");
    ASSERT_EQ(t["plain"].size(), 5u);
    ASSERT_EQ(t["normalized"].size(), 5u);
    const double thresholds[] = {1.0, 0.5, 0.1, 0.05, 0.01};
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(t["plain"][k]["threshold"].get<double>(), thresholds[k]);
        EXPECT_TRUE(t["plain"][k].contains("max"));
        EXPECT_TRUE(t["plain"][k].contains("mean"));
    }
}

TEST(CliSweep, MatchesTheLibrarySweep) {
    TempDir dir("sweep_sir");
    ASSERT_EQ(run("sweep --config " + config("sir_sweep") + " --out " + dir.str(), dir), 0);
    EXPECT_EQ(lines(dir / "histogram.csv").size(), 1001u);

    pir::SimulationConfig c;
    c.t_end = 80.0;
    c.step = 1.0;
    c.initial_state = Eigen::Vector3d(5.6e6, 1e5, 0.0);
    pir::SweepSpec spec;
    spec.domain = {{"beta", 0.0, 0.5}, {"gamma", 0.0, 0.3}};
    spec.sample_count = 1000;
    spec.seed = 2024;
    const auto direct = pir::run_sweep(pir::sir_model(5.7e6), spec, c, {1, 50});
    const auto t = read_json(dir / "thresholds.json");
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(t["plain"][k]["max"].get<double>(), direct.plain.max_below[k]);
        EXPECT_EQ(t["plain"][k]["mean"].get<double>(), direct.plain.mean_below[k]);
    }
}

TEST(CliSweep, S3i3rMeanErrorFraction) {
    TempDir dir("sweep_s3i3r");
    ASSERT_EQ(run("sweep --config " + config("s3i3r_sweep") + " --out " + dir.str(), dir), 0);
    const auto t = read_json(dir / "thresholds.json");
    EXPECT_EQ(t["plain"][2]["threshold"].get<double>(), 0.1);
    EXPECT_GE(t["plain"][2]["mean"].get<double>(), 0.80);
    EXPECT_FALSE(t.contains("normalized"));
}

TEST(CliSweep, FailedDrawsAreLoggedAndTheRunContinues) {
    TempDir dir("sweep_failures");
    ASSERT_EQ(run("sweep --config " + config("sir_sweep") +
                      " --set sweep.samples=3 --set sweep.range.beta=0,0 --set sweep.range.gamma=0,0 --out " +
                      dir.str(),
                  dir),
              0);
    EXPECT_EQ(lines(dir / "histogram.csv").size(), 4u);
    EXPECT_NE(slurp(dir / "run.log").find("draw 2 failed"), std::string::npos);
    EXPECT_EQ(read_json(dir / "thresholds.json")["plain_failures"].get<int>(), 3);
}

TEST(CliSweep, ZeroSamplesIsUsageError) {
    TempDir dir("sweep_zero");
    EXPECT_EQ(run("sweep --config " + config("sir_sweep") + " --set sweep.samples=0 --out " + (dir / "o"), dir), 2);
}

TEST(CliCovid, SyntheticSeriesWindowArithmetic) {
    TempDir dir("covid_synthetic");
    ASSERT_EQ(run("covid --config " + config("covid_synthetic") + " --out " + dir.str(), dir), 0);
    EXPECT_EQ(lines(dir / "states.csv").size(), 101u);
    EXPECT_EQ(lines(dir / "beta.csv").size(), 88u);
    EXPECT_EQ(lines(dir / "resimulation.csv").size(), 101u);
    const auto summary = read_json(dir / "summary.json");
    EXPECT_EQ(summary["estimates"].get<int>(), 87);
    EXPECT_TRUE(summary.contains("max_beta_relative_error"));
}

TEST(CliCovid, WhoFileWithDates) {
    TempDir dir("covid_who");
    pir::RawDailySeries raw;
    raw.new_cases = pir::Counts{};
    for (int d = 0; d < 40; ++d) {
        char date[16];
        std::snprintf(date, sizeof date, "2021-01-%02d", d % 31 + 1);
        if (d >= 31) std::snprintf(date, sizeof date, "2021-02-%02d", d - 30);
        raw.dates.emplace_back(date);
        raw.new_cases->push_back(1000 + 20 * d);
    }
    pir::write_who_csv(dir / "who.csv", raw);
    ASSERT_EQ(run("covid --config " + config("covid_who") + " --set covid.days=40 --data " + (dir / "who.csv") +
                      " --out " + (dir / "out"),
                  dir),
              0);
    const auto rows = lines(dir / "out/beta.csv");
    ASSERT_EQ(rows.size(), 28u);
    EXPECT_NE(rows[1].find("2021-01-14"), std::string::npos);
}

TEST(CliCovid, EmptyFileIsDataError) {
    TempDir dir("covid_empty");
    write_text(dir / "empty.csv", "");
    EXPECT_EQ(run("covid --config " + config("covid_who") + " --data " + (dir / "empty.csv") + " --out " +
                      (dir / "out"),
                  dir),
              3);
    EXPECT_NE(slurp(dir / "console.txt").find("ParseError"), std::string::npos);
}

TEST(CliReynolds, ManufacturedFlowWithinOnePercent) {
    TempDir dir("reynolds");
    ASSERT_EQ(run("reynolds --config " + config("reynolds_manufactured") + " --out " + dir.str(), dir), 0);
    const auto rows = lines(dir / "convergence.csv");
    ASSERT_EQ(rows.size(), 11u);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto cells = pir::csv::split_line(rows[r]);
        ASSERT_EQ(cells.size(), 12u);
        EXPECT_EQ(cells[11], "ok");
        EXPECT_LE(pir::csv::parse_number(cells[10], "error"), 0.01) << rows[r];
    }
    EXPECT_EQ(pir::csv::split_line(rows[1])[0], "plain");
    EXPECT_EQ(pir::csv::split_line(rows.back())[0], "ridge");
}

TEST(CliReynolds, CommandLineViscosity) {
    TempDir dir("reynolds_flag");
    ASSERT_EQ(run("reynolds --manufactured 0.02 --set reynolds.manufactured.nx=65 --set "
                  "reynolds.manufactured.ny=65 --set reynolds.sensor_counts=8 --set reynolds.repeats=3 --out " +
                      dir.str(),
                  dir),
              0);
    const auto cells = pir::csv::split_line(lines(dir / "convergence.csv")[1]);
    EXPECT_EQ(cells[9], "50");
}

TEST(CliReynolds, ValidationHappensBeforeAnyWork) {
    TempDir dir("reynolds_invalid");
    const std::string base = "reynolds --config " + config("reynolds_manufactured") + " --out " + (dir / "o");
    EXPECT_EQ(run(base + " --set reynolds.repeats=0", dir), 2);
    EXPECT_EQ(run(base + " --set reynolds.sensor_counts=4,0", dir), 2);
    EXPECT_EQ(run("reynolds --out " + (dir / "o"), dir), 2);
    EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST(CliConvert, ColumnTextToManifest) {
    TempDir dir("convert");
    const std::size_t nx = 5, ny = 4, snapshots = 3;
    for (const char* name : {"u", "v", "w"}) {
        std::ofstream out(dir / (std::string(name) + ".txt"));
        for (std::size_t k = 0; k < nx * ny; ++k) {
            for (std::size_t s = 0; s < snapshots; ++s) out << (s ? " " : "") << static_cast<double>(k + 100 * s);
            out << "\n";
        }
    }
    ASSERT_EQ(run("convert --set convert.nx=5 --set convert.ny=4 --u " + (dir / "u.txt") + " --v " +
                      (dir / "v.txt") + " --w " + (dir / "w.txt") + " --out " + (dir / "out"),
                  dir),
              0);
    const auto stack = pir::load_snapshot_stack(dir / "out/manifest.txt");
    EXPECT_EQ(stack.nx, nx);
    EXPECT_EQ(stack.ny, ny);
    ASSERT_EQ(stack.snapshot_count(), snapshots);
    EXPECT_EQ(stack.w[2](1, 0), 201.0);
    EXPECT_EQ(stack.w[0](0, 1), 5.0);
}

// Every command body is byte-identical across reruns; only run.log differs.
TEST(CliProperties, RerunsAreByteIdentical) {
    TempDir dir("rerun");
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands = {
        {"simulate --config " + config("lotka_volterra"), {"trajectory.csv", "summary.json"}},
        {"estimate --config " + config("sir_varying"), {"estimates.csv", "summary.json"}},
        {"sweep --config " + config("sir_sweep") + " --set sweep.samples=50", {"histogram.csv", "thresholds.json"}},
        {"covid --config " + config("covid_synthetic"), {"states.csv", "beta.csv", "resimulation.csv"}},
        {"reynolds --config " + config("reynolds_manufactured") + " --set reynolds.sensor_counts=4,8",
         {"convergence.csv", "summary.json"}},
    };
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto a = dir / ("a" + std::to_string(i)), b = dir / ("b" + std::to_string(i));
        ASSERT_EQ(run(commands[i].first + " --out " + a, dir), 0) << commands[i].first;
        ASSERT_EQ(run(commands[i].first + " --out " + b, dir), 0) << commands[i].first;
        for (const auto& file : commands[i].second) {
            const auto body = slurp(a + "/" + file);
            EXPECT_FALSE(body.empty()) << file;
            EXPECT_EQ(body, slurp(b + "/" + file)) << commands[i].first << " " << file;
        }
        EXPECT_TRUE(fs::exists(a + "/run.log"));
    }
}

TEST(CliProperties, EveryFixtureConfigIsAccepted) {
    TempDir dir("fixtures");
    // Each fixture must pass validation for the command that owns it. Heavy
    // runs are shrunk with overrides; data-driven fixtures get a data file.
    pir::RawDailySeries raw;
    raw.new_cases = pir::Counts(120, 1500);
    for (int d = 0; d < 120; ++d) {
        char date[16];
        const int month = d < 31 ? 1 : d < 59 ? 2 : d < 90 ? 3 : 4;
        const int day = d < 31 ? d + 1 : d < 59 ? d - 30 : d < 90 ? d - 58 : d - 89;
        std::snprintf(date, sizeof date, "2021-%02d-%02d", month, day);
        raw.dates.emplace_back(date);
    }
    pir::write_who_csv(dir / "who.csv", raw);
    const auto manifest = pir::write_snapshot_stack(dir / "flow", pir::manufactured_diffusion_stack(0.01, 33, 33, 5, 0.05));
    const std::vector<std::string> commands = {
        "simulate --config " + config("sir_constant"),
        "simulate --config " + config("s3i3r_constant"),
        "estimate --config " + config("s3i3r_constant"),
        "estimate --config " + config("lotka_volterra"),
        "estimate --config " + config("s3i3r_varying"),
        "sweep --config " + config("s3i3r_sweep") + " --set sweep.samples=5",
        "covid --config " + config("covid_who") + " --data " + (dir / "who.csv"),
        "reynolds --config " + config("reynolds_manufactured") + " --set reynolds.repeats=2",
        "reynolds --config " + config("reynolds_cylinder") + " --manifest " + manifest + " --set reynolds.repeats=2",
    };
    for (std::size_t i = 0; i < commands.size(); ++i) {
        EXPECT_EQ(run(commands[i] + " --out " + (dir / std::to_string(i)), dir), 0)
            << commands[i] << "\n" << slurp(dir / "console.txt");
    }
}
