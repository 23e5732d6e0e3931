#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pir/pir.hpp"

namespace pir::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string num(double v) { return std::isfinite(v) ? csv::format_number(v) : "nan"; }

ordered_json json_number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

std::string join(const std::vector<std::string>& parts, const std::string& sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
    return out;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

/// Collects output files in memory and writes them together at the end, with
/// a run.log sidecar holding the only non-deterministic content.
class Outputs {
public:
    explicit Outputs(const CommandContext& ctx) : dir_(ctx.out_dir), started_(utc_timestamp()) {
        log_ << "command: " << ctx.command_line << "\n";
    }

    std::ostringstream& file(const std::string& name) {
        order_.push_back(name);
        return files_[name];
    }

    void json(const std::string& name, const ordered_json& j) { file(name) << j.dump(2) << "\n"; }

    void note(const std::string& line) { log_ << line << "\n"; }

    void write() {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorKind::IoError, "cannot create output directory '" + dir_ + "': " + ec.message());
        for (const auto& name : order_) write_file(name, files_[name].str());
        std::ostringstream log;
        log << "started: " << started_ << "\nfinished: " << utc_timestamp() << "\n" << log_.str();
        for (const auto& name : order_) log << "wrote: " << name << "\n";
        write_file("run.log", log.str());
    }

private:
    void write_file(const std::string& name, const std::string& body) const {
        const auto path = fs::path(dir_) / name;
        std::ofstream out(path, std::ios::binary);
        out << body;
        if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    }

    std::string dir_;
    std::string started_;
    std::ostringstream log_;
    std::vector<std::string> order_;
    std::map<std::string, std::ostringstream> files_;
};

std::uint64_t seed_of(const CommandContext& ctx) {
    if (ctx.seed) {
        (void)ctx.config.has("seed");
        return *ctx.seed;
    }
    return static_cast<std::uint64_t>(ctx.config.count("seed", 0));
}

DerivativeScheme scheme_of(const Config& c, const std::string& key, DerivativeScheme fallback) {
    if (!c.has(key)) return fallback;
    const auto v = c.text(key);
    if (v == "interior") return DerivativeScheme::Interior;
    if (v == "full_length") return DerivativeScheme::FullLength;
    throw ConfigError("key '" + key + "' must be interior or full_length, got '" + v + "'");
}

// Sections read by other subcommands; a shared config may carry them.
const std::vector<std::string> kForSimulate{"estimate", "sweep", "covid", "reynolds", "convert"};
const std::vector<std::string> kForEstimate{"sweep", "covid", "reynolds", "convert"};
const std::vector<std::string> kForSweep{"params", "schedule", "noise", "estimate", "covid", "reynolds", "convert"};
const std::vector<std::string> kForCovid{"noise", "estimate", "sweep", "reynolds", "convert"};
const std::vector<std::string> kForReynolds{"model", "sim", "params", "schedule", "noise", "estimate", "sweep", "covid", "convert"};
const std::vector<std::string> kForConvert{"model", "sim", "params", "schedule", "noise", "seed", "estimate", "sweep", "covid", "reynolds"};

std::string scheme_name(DerivativeScheme s) { return s == DerivativeScheme::Interior ? "interior" : "full_length"; }

// Model, simulation horizon and parameter schedule shared by simulate,
// estimate and sweep.
struct Experiment {
    std::string model_name;
    ParameterLinearModel model = lotka_volterra_model();
    SimulationConfig sim;
    bool epidemic = false;
    double population = 1.0;
};

Experiment read_model(const Config& c) {
    if (!c.has("model")) throw ConfigError("missing key 'model' (one of lotka_volterra, sir, s3i3r)");
    Experiment e;
    e.model_name = c.text("model");
    const auto registry = ModelRegistry::with_builtin_models();
    if (!registry.contains(e.model_name)) {
        throw ConfigError("unknown model '" + e.model_name + "' (known: " + join(registry.names(), ", ") + ")");
    }
    e.epidemic = e.model_name != "lotka_volterra";
    return e;
}

/// sim.t0, sim.t_end, sim.step or sim.points, sim.initial_state.
void read_horizon(const Config& c, Experiment& e) {
    e.sim.t0 = c.number("sim.t0", 0.0);
    e.sim.t_end = c.number("sim.t_end");
    if (!(e.sim.t_end > e.sim.t0)) throw ConfigError("sim.t_end must exceed sim.t0");
    const bool has_step = c.has("sim.step"), has_points = c.has("sim.points");
    if (has_step == has_points) throw ConfigError("give exactly one of sim.step and sim.points");
    if (has_step) {
        e.sim.step = c.number("sim.step");
        if (!(e.sim.step > 0.0)) throw ConfigError("sim.step must be positive");
    } else {
        const auto points = c.count("sim.points");
        if (points < 2) throw ConfigError("sim.points must be at least 2");
        e.sim.step = (e.sim.t_end - e.sim.t0) / static_cast<double>(points - 1);
    }
    const auto x0 = c.numbers("sim.initial_state");
    e.sim.initial_state = Eigen::Map<const Vector>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    if (e.epidemic) {
        e.population = c.number("model.population", e.sim.initial_state.sum());
        if (!(e.population > 0.0)) throw ConfigError("model.population must be positive");
    }
    e.model = ModelRegistry::with_builtin_models().create(e.model_name, e.population);
    if (static_cast<std::size_t>(e.sim.initial_state.size()) != e.model.state_count()) {
        throw ConfigError("sim.initial_state has " + std::to_string(x0.size()) + " entries, model '" + e.model_name +
                          "' has states " + join(e.model.state_names()));
    }
}

/// params.<name> for every parameter, optionally with schedule.* making one
/// of them sinusoidal in time.
void read_schedule(const Config& c, Experiment& e) {
    std::string varying;
    if (c.has("schedule.parameter")) {
        varying = c.text("schedule.parameter");
        (void)e.model.parameter_index(varying);
    }
    const auto& names = e.model.parameter_names();
    Vector omega(static_cast<Eigen::Index>(names.size()));
    for (std::size_t p = 0; p < names.size(); ++p) {
        const auto key = "params." + names[p];
        omega(static_cast<Eigen::Index>(p)) = names[p] == varying ? c.number(key, 0.0) : c.number(key);
    }
    for (const auto& [name, value] : c.section("params")) {
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            throw ConfigError("params." + name + ": model '" + e.model_name + "' has parameters " + join(names));
        }
    }
    if (varying.empty()) {
        e.sim.schedule = ParameterSchedule::constant(omega);
        return;
    }
    const double period = c.number("schedule.period");
    if (!(period > 0.0)) throw ConfigError("schedule.period must be positive");
    e.sim.schedule = ParameterSchedule::sinusoidal(omega, e.model.parameter_index(varying), c.number("schedule.mean"),
                                                   c.number("schedule.amplitude"), period);
}

Experiment read_experiment(const Config& c) {
    auto e = read_model(c);
    read_horizon(c, e);
    read_schedule(c, e);
    return e;
}

NoiseSpec read_noise(const CommandContext& ctx) {
    NoiseSpec noise{ctx.config.number("noise.epsilon", 0.0), seed_of(ctx)};
    if (!(noise.epsilon >= 0.0)) throw ConfigError("noise.epsilon must be nonnegative");
    return noise;
}

double conservation_drift(const TimeSeries& series) {
    const double n0 = series.states.row(0).sum();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < series.states.rows(); ++i) {
        worst = std::max(worst, std::abs(series.states.row(i).sum() - n0) / std::abs(n0));
    }
    return worst;
}

}  // namespace

int cmd_simulate(CommandContext& ctx) {
    const auto& c = ctx.config;
    const auto e = read_experiment(c);
    const auto noise = read_noise(ctx);
    c.require_all_used(kForSimulate);

    const auto clean = simulate(e.model, e.sim);
    const auto series = noise.epsilon > 0.0 ? add_noise(clean, noise) : clean;

    Outputs out(ctx);
    csv::write_series(out.file("trajectory.csv"), series, e.model.state_names());
    ordered_json summary{{"model", e.model_name},
                         {"rows", series.size()},
                         {"t0", e.sim.t0},
                         {"t_end", series.times.back()},
                         {"step", e.sim.step},
                         {"noise_epsilon", noise.epsilon},
                         {"seed", noise.seed}};
    std::cout << "simulated " << series.size() << " samples of model '" << e.model_name << "'\n";
    if (e.epidemic) {
        const double drift = conservation_drift(clean);
        summary["conservation_drift"] = drift;
        std::cout << "conservation: max |sum(x) - N| / N = " << num(drift) << "\n";
    }
    out.json("summary.json", summary);
    out.write();
    return 0;
}

namespace {

struct EstimateSettings {
    bool varying = false;
    DerivativeScheme scheme = DerivativeScheme::Interior;
    std::optional<EstimationWindow> window;
    std::size_t width = 1;
    Attribution attribution = Attribution::End;
    std::size_t points = 0;  // stride subsample, 0 keeps every sample
    double ridge_lambda = 0.0;
    bool normalize = false;
    std::vector<std::pair<std::string, double>> known;
};

EstimateSettings read_estimate_settings(const Config& c) {
    EstimateSettings s;
    const auto mode = c.text("estimate.mode", "constant");
    if (mode != "constant" && mode != "varying") throw ConfigError("estimate.mode must be constant or varying");
    s.varying = mode == "varying";
    s.scheme = scheme_of(c, "estimate.scheme", DerivativeScheme::Interior);
    if (c.has("estimate.first") || c.has("estimate.last")) {
        if (s.varying) throw ConfigError("estimate.first/last apply to constant mode; use estimate.width");
        s.window = EstimationWindow{c.count("estimate.first"), c.count("estimate.last")};
        if (s.window->last < s.window->first) throw ConfigError("estimate.last must not precede estimate.first");
    }
    s.width = c.count("estimate.width", 1);
    if (s.width < 1) throw ConfigError("estimate.width must be at least 1");
    const auto attribution = c.text("estimate.attribution", "end");
    if (attribution != "end" && attribution != "center") throw ConfigError("estimate.attribution must be end or center");
    s.attribution = attribution == "end" ? Attribution::End : Attribution::Center;
    s.points = c.count("estimate.points", 0);
    s.ridge_lambda = c.number("estimate.ridge_lambda", 0.0);
    if (!(s.ridge_lambda >= 0.0)) throw ConfigError("estimate.ridge_lambda must be nonnegative");
    s.normalize = c.flag("estimate.normalize", false);
    for (const auto& [name, value] : c.section("estimate.known")) {
        s.known.emplace_back(name, c.number("estimate.known." + name));
    }
    return s;
}

TimeSeries subsample(const TimeSeries& s, std::size_t points) {
    if (points == 0 || points == s.size()) return s;
    if (points > s.size()) {
        throw ConfigError("estimate.points=" + std::to_string(points) + " exceeds the " + std::to_string(s.size()) +
                          " samples");
    }
    const std::size_t stride = s.size() / points;
    TimeSeries out;
    out.states.resize(static_cast<Eigen::Index>(points), s.states.cols());
    for (std::size_t i = 0; i < points; ++i) {
        out.times.push_back(s.times[i * stride]);
        out.states.row(static_cast<Eigen::Index>(i)) = s.states.row(static_cast<Eigen::Index>(i * stride));
    }
    return out;
}

/// Truth rows either hold one parameter vector or one per data sample.
Matrix read_truth(const std::string& path, const ParameterLinearModel& model, std::size_t samples) {
    const auto named = csv::read_series_file(path);
    if (named.names != model.parameter_names()) {
        throw Error(ErrorKind::MissingColumn, path + ": columns must be " + join(model.parameter_names()) + ", got " +
                                                  join(named.names));
    }
    const auto rows = named.series.size();
    if (rows != 1 && rows != samples) {
        throw Error(ErrorKind::DimensionMismatch, path + ": " + std::to_string(rows) +
                                                      " truth rows, expected 1 or one per data sample (" +
                                                      std::to_string(samples) + ")");
    }
    return named.series.states;
}

Vector truth_row(const Matrix& truth, std::size_t index) {
    return truth.rows() == 1 ? Vector(truth.row(0).transpose())
                             : Vector(truth.row(static_cast<Eigen::Index>(index)).transpose());
}

ordered_json by_name(const std::vector<std::string>& names, const Vector& values) {
    ordered_json j = ordered_json::object();
    for (std::size_t p = 0; p < names.size(); ++p) j[names[p]] = json_number(values(static_cast<Eigen::Index>(p)));
    return j;
}

}  // namespace

int cmd_estimate(CommandContext& ctx) {
    const auto& c = ctx.config;
    auto e = read_model(c);
    const auto settings = read_estimate_settings(c);

    // Data either comes from --data or is generated from the sim.* section,
    // in which case the schedule doubles as ground truth.
    TimeSeries data;
    std::optional<Matrix> truth;
    if (!ctx.data.empty()) {
        // Generator sections are allowed so one config drives simulate and estimate.
        for (const char* section : {"sim", "params", "schedule", "noise"}) (void)c.section(section);
        (void)c.has("seed");
        const bool population_given = c.has("model.population");
        const double population = population_given ? c.number("model.population") : 0.0;
        c.require_all_used(kForEstimate);
        const auto named = csv::read_series_file(ctx.data);
        const auto& registry = ModelRegistry::with_builtin_models();
        const auto expected = registry.create(e.model_name).state_names();
        if (named.names != expected) {
            throw Error(ErrorKind::MissingColumn,
                        ctx.data + ": columns must be " + join(expected) + ", got " + join(named.names));
        }
        data = subsample(named.series, settings.points);
        // Epidemic data defaults to a closed population equal to the first row.
        e.population = population_given ? population : (e.epidemic ? data.states.row(0).sum() : 1.0);
        e.model = registry.create(e.model_name, e.population);
    } else {
        read_horizon(c, e);
        read_schedule(c, e);
        const auto noise = read_noise(ctx);
        c.require_all_used(kForEstimate);
        const auto clean = simulate(e.model, e.sim);
        data = subsample(noise.epsilon > 0.0 ? add_noise(clean, noise) : clean, settings.points);
        Matrix t(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(e.model.parameter_count()));
        for (std::size_t i = 0; i < data.size(); ++i) {
            t.row(static_cast<Eigen::Index>(i)) = e.sim.schedule.at(data.times[i]).transpose();
        }
        truth = t;
    }
    if (!ctx.truth.empty()) truth = read_truth(ctx.truth, e.model, data.size());

    std::vector<std::pair<std::size_t, double>> known;
    for (const auto& [name, value] : settings.known) known.emplace_back(e.model.parameter_index(name), value);
    const auto partition = ParameterPartition::with_known(e.model.parameter_count(), known);
    EstimationOptions opts;
    opts.scheme = settings.scheme;
    opts.ridge_lambda = settings.ridge_lambda;
    opts.solve.normalize_columns = settings.normalize;

    const auto& names = e.model.parameter_names();
    Outputs out(ctx);
    ordered_json summary{{"model", e.model_name},
                         {"mode", settings.varying ? "varying" : "constant"},
                         {"scheme", scheme_name(settings.scheme)},
                         {"samples", data.size()}};

    if (!settings.varying) {
        const auto window = settings.window.value_or(settings.scheme == DerivativeScheme::Interior
                                                         ? EstimationWindow::interior(data.size())
                                                         : EstimationWindow::all(data.size()));
        const auto est = estimate_constant(e.model, data, window, partition, opts);
        auto& csv_out = out.file("estimates.csv");
        csv_out << join(names) << ",residual_norm,condition\n";
        for (Eigen::Index p = 0; p < est.values.size(); ++p) csv_out << num(est.values(p)) << ",";
        csv_out << num(est.residual_norm) << "," << num(est.condition_estimate) << "\n";
        summary["window"] = {window.first, window.last};
        summary["estimate"] = by_name(names, est.values);
        summary["residual_norm"] = est.residual_norm;
        summary["condition"] = est.condition_estimate;
        if (truth) {
            const Vector re = relative_errors(truth_row(*truth, window.first), est.values);
            summary["relative_errors"] = by_name(names, re);
            std::cout << "relative errors:";
            for (std::size_t p = 0; p < names.size(); ++p) {
                std::cout << " " << names[p] << "=" << num(re(static_cast<Eigen::Index>(p)));
            }
            std::cout << "\n";
        }
    } else {
        TimeVaryingOptions tv;
        tv.estimation = opts;
        tv.attribution = settings.attribution;
        const auto estimates = estimate_time_varying(e.model, data, settings.width, partition, tv);
        auto& csv_out = out.file("estimates.csv");
        csv_out << "index,t,width,widened," << join(names) << ",residual_norm,condition\n";
        Matrix est(static_cast<Eigen::Index>(estimates.size()), static_cast<Eigen::Index>(names.size()));
        for (std::size_t r = 0; r < estimates.size(); ++r) {
            const auto& te = estimates[r];
            csv_out << te.index << "," << num(te.time) << "," << te.width << "," << (te.widened ? 1 : 0) << ",";
            for (Eigen::Index p = 0; p < te.estimate.values.size(); ++p) csv_out << num(te.estimate.values(p)) << ",";
            csv_out << num(te.estimate.residual_norm) << "," << num(te.estimate.condition_estimate) << "\n";
            est.row(static_cast<Eigen::Index>(r)) = te.estimate.values.transpose();
        }
        summary["width"] = settings.width;
        summary["attribution"] = settings.attribution == Attribution::End ? "end" : "center";
        summary["estimates"] = estimates.size();
        std::cout << estimates.size() << " rolling estimates (width " << settings.width << ")\n";
        if (truth && !estimates.empty()) {
            // Ground truth at the attributed time; per-sample truth files are
            // read at the window end index.
            Matrix t(est.rows(), est.cols());
            for (std::size_t r = 0; r < estimates.size(); ++r) {
                t.row(static_cast<Eigen::Index>(r)) =
                    ctx.truth.empty() ? e.sim.schedule.at(estimates[r].time).transpose()
                                      : truth_row(*truth, estimates[r].index).transpose();
            }
            const auto metrics = relative_error_metrics(t, est);
            summary["signed_mre"] = by_name(names, metrics.signed_mre);
            summary["mean_abs_re"] = by_name(names, metrics.mean_abs_re);
        }
    }
    out.json("summary.json", summary);
    out.write();
    return 0;
}

int cmd_sweep(CommandContext& ctx) {
    const auto& c = ctx.config;
    auto e = read_model(c);
    read_horizon(c, e);
    SweepSpec spec;
    spec.sample_count = c.count("sweep.samples");
    if (spec.sample_count == 0) throw ConfigError("sweep.samples must be at least 1");
    for (const auto& [name, value] : c.section("sweep.range")) {
        const auto bounds = c.numbers("sweep.range." + name);
        if (bounds.size() != 2) throw ConfigError("sweep.range." + name + " must be low,high");
        spec.domain.push_back({name, bounds[0], bounds[1]});
    }
    // Keep the domain in model parameter order regardless of key order.
    std::stable_sort(spec.domain.begin(), spec.domain.end(), [&](const auto& a, const auto& b) {
        return e.model.parameter_index(a.name) < e.model.parameter_index(b.name);
    });
    for (const auto& [name, value] : c.section("sweep.fixed")) {
        spec.fixed_parameters.emplace_back(name, c.number("sweep.fixed." + name));
    }
    spec.seed = seed_of(ctx);
    spec.include_normalized = c.flag("sweep.normalized", true);
    spec.threads = c.count("sweep.threads", 0);
    const auto scheme = scheme_of(c, "sweep.scheme", DerivativeScheme::Interior);
    const EstimationWindow window{c.count("sweep.first", 1), c.count("sweep.last")};
    c.require_all_used(kForSweep);

    const auto result = run_sweep(e.model, spec, e.sim, window, scheme);

    Outputs out(ctx);
    const auto& names = e.model.parameter_names();
    auto& hist = out.file("histogram.csv");
    hist << "draw";
    for (const auto& n : names) hist << "," << n;
    for (const char* solver : {"plain", "normalized"}) {
        hist << "," << solver << "_ok," << solver << "_max_error," << solver << "_mean_error";
        for (const auto& n : result.unknown_names) hist << "," << solver << "_error_" << n;
    }
    hist << ",failure\n";
    std::size_t logged = 0;
    for (const auto& d : result.draws) {
        hist << d.index;
        for (Eigen::Index p = 0; p < d.omega.size(); ++p) hist << "," << num(d.omega(p));
        for (const auto* r : {&d.plain, &d.normalized}) {
            hist << "," << (r->ok ? 1 : 0) << "," << (r->ok ? num(r->max_error) : "nan") << ","
                 << (r->ok ? num(r->mean_error) : "nan");
            for (std::size_t p = 0; p < result.unknown_names.size(); ++p) {
                hist << "," << (r->ok ? num(r->errors(static_cast<Eigen::Index>(p))) : "nan");
            }
        }
        std::string failure = d.plain.ok ? "" : d.plain.failure;
        std::replace(failure.begin(), failure.end(), ',', ';');
        hist << "," << failure << "\n";
        if (!d.plain.ok) {
            out.note("draw " + std::to_string(d.index) + " failed: " + d.plain.failure);
            ++logged;
        }
    }

    auto table_json = [](const ThresholdTable& t) {
        ordered_json j = ordered_json::array();
        for (std::size_t k = 0; k < kSweepThresholds.size(); ++k) {
            j.push_back({{"threshold", kSweepThresholds[k]}, {"max", t.max_below[k]}, {"mean", t.mean_below[k]}});
        }
        return j;
    };
    ordered_json thresholds{{"model", e.model_name},
                            {"samples", spec.sample_count},
                            {"seed", spec.seed},
                            {"window", {window.first, window.last}},
                            {"scheme", scheme_name(scheme)},
                            {"plain_failures", result.plain_failures},
                            {"plain", table_json(result.plain)}};
    if (spec.include_normalized) {
        thresholds["normalized_failures"] = result.normalized_failures;
        thresholds["normalized"] = table_json(result.normalized);
    }
    out.json("thresholds.json", thresholds);
    out.write();

    std::cout << "threshold  max<t   mean<t" << (spec.include_normalized ? "   norm max<t  norm mean<t" : "") << "\n";
    for (std::size_t k = 0; k < kSweepThresholds.size(); ++k) {
        std::cout << std::setw(9) << kSweepThresholds[k] << std::fixed << std::setprecision(3) << std::setw(8)
                  << result.plain.max_below[k] << std::setw(9) << result.plain.mean_below[k];
        if (spec.include_normalized) {
            std::cout << std::setw(13) << result.normalized.max_below[k] << std::setw(13)
                      << result.normalized.mean_below[k];
        }
        std::cout << std::defaultfloat << std::setprecision(6) << "\n";
    }
    if (logged) std::cout << logged << " draws failed; see run.log\n";
    return 0;
}

int cmd_covid(CommandContext& ctx) {
    const auto& c = ctx.config;
    CovidOptions opts;
    opts.model = c.text("covid.model", opts.model);
    if (opts.model != "sir" && opts.model != "s3i3r") throw ConfigError("covid.model must be sir or s3i3r");
    opts.population = static_cast<std::int64_t>(c.count("covid.population", static_cast<std::size_t>(opts.population)));
    opts.window = c.count("covid.window", opts.window);
    opts.rates.gamma1 = c.number("covid.gamma1", opts.rates.gamma1);
    opts.rates.gamma2 = c.number("covid.gamma2", opts.rates.gamma2);
    opts.rates.gamma3 = c.number("covid.gamma3", opts.rates.gamma3);
    opts.scheme = scheme_of(c, "covid.scheme", opts.scheme);
    const auto first_day = c.count("covid.first_day", 0);
    const bool has_days = c.has("covid.days");
    const auto days = has_days ? c.count("covid.days") : 0;

    // Without --data a synthetic case series is derived from an SIR run
    // described by the sim.* section; its schedule is the ground truth.
    RawDailySeries raw;
    std::optional<Experiment> synthetic;
    if (!ctx.data.empty()) {
        c.require_all_used(kForCovid);
        raw = load_who_csv(ctx.data);
    } else {
        auto e = read_model(c);
        if (e.model_name != "sir") throw ConfigError("synthetic covid data needs model=sir");
        read_horizon(c, e);
        read_schedule(c, e);
        c.require_all_used(kForCovid);
        raw = daily_cases_from_sir(simulate(e.model, e.sim));
        synthetic = std::move(e);
    }
    if (first_day > 0 || has_days) raw = raw.slice(first_day, has_days ? days : raw.size() - first_day);

    const auto analysis = analyze_covid(raw, opts);

    auto day_cells = [&](std::size_t t) {
        return std::to_string(first_day + t) + "," + (raw.dates.empty() ? "" : raw.dates[t]);
    };
    Outputs out(ctx);
    auto& states = out.file("states.csv");
    states << "day,date," << join(analysis.state_names) << "\n";
    for (std::size_t t = 0; t < analysis.states.size(); ++t) {
        states << day_cells(t);
        for (Eigen::Index k = 0; k < analysis.states.states.cols(); ++k) {
            states << "," << num(analysis.states.states(static_cast<Eigen::Index>(t), k));
        }
        states << "\n";
    }

    auto& params = out.file("beta.csv");
    params << "index,day,date,t," << join(analysis.parameter_names) << ",residual_norm,condition"
           << (synthetic ? ",beta_true,beta_relative_error" : "") << "\n";
    double worst = 0.0;
    for (const auto& est : analysis.estimates) {
        params << est.index << "," << day_cells(est.index) << "," << num(est.time);
        for (Eigen::Index p = 0; p < est.estimate.values.size(); ++p) params << "," << num(est.estimate.values(p));
        params << "," << num(est.estimate.residual_norm) << "," << num(est.estimate.condition_estimate);
        if (synthetic) {
            const double truth = synthetic->sim.schedule.at(est.time + static_cast<double>(first_day))(0);
            const double err = std::abs(est.estimate.values(0) - truth) / std::abs(truth);
            worst = std::max(worst, err);
            params << "," << num(truth) << "," << num(err);
        }
        params << "\n";
    }

    auto& resim = out.file("resimulation.csv");
    resim << "day,date,infected_data,infected_sim,ratio\n";
    const std::size_t start = analysis.states.size() - analysis.resimulated.size();
    const auto col = static_cast<Eigen::Index>(analysis.infected_column);
    for (std::size_t t = 0; t < analysis.resimulated.size(); ++t) {
        const double data = analysis.states.states(static_cast<Eigen::Index>(start + t), col);
        const double sim = analysis.resimulated.states(static_cast<Eigen::Index>(t), col);
        resim << day_cells(start + t) << "," << num(data) << "," << num(sim) << ","
              << (data != 0.0 ? num(sim / data) : "nan") << "\n";
    }

    ordered_json summary{{"model", opts.model},
                         {"population", opts.population},
                         {"window", opts.window},
                         {"scheme", scheme_name(opts.scheme)},
                         {"days", raw.size()},
                         {"estimates", analysis.estimates.size()},
                         {"resimulated_days", analysis.resimulated.size()}};
    if (!raw.dates.empty()) summary["dates"] = {raw.dates.front(), raw.dates.back()};
    if (synthetic) summary["max_beta_relative_error"] = worst;
    out.json("summary.json", summary);
    out.write();
    std::cout << analysis.estimates.size() << " parameter estimates over " << raw.size() << " days\n";
    return 0;
}

int cmd_reynolds(CommandContext& ctx) {
    const auto& c = ctx.config;
    std::string manifest = ctx.manifest.empty() ? c.text("reynolds.manifest", "") : ctx.manifest;
    std::optional<double> nu = ctx.manufactured_nu;
    if (!nu && c.has("reynolds.manufactured.nu")) nu = c.number("reynolds.manufactured.nu");
    if (manifest.empty() == !nu.has_value()) {
        throw ConfigError("give exactly one of --manifest (reynolds.manifest) and --manufactured (reynolds.manufactured.nu)");
    }
    ReynoldsOptions opts;
    std::vector<std::size_t> counts;
    for (double v : c.numbers("reynolds.sensor_counts", {4, 8, 16, 32, 64})) {
        if (v < 1 || v != std::floor(v)) throw ConfigError("reynolds.sensor_counts must be positive integers");
        counts.push_back(static_cast<std::size_t>(v));
    }
    opts.repeats = c.count("reynolds.repeats", 20);
    if (opts.repeats == 0) throw ConfigError("reynolds.repeats must be at least 1");
    const double ridge = c.number("reynolds.ridge_lambda", 0.0);
    if (!(ridge >= 0.0)) throw ConfigError("reynolds.ridge_lambda must be nonnegative");
    opts.seed = seed_of(ctx);
    opts.threads = c.count("reynolds.threads", 0);
    std::optional<double> target;
    if (c.has("reynolds.target")) target = c.number("reynolds.target");
    std::optional<std::vector<double>> region_box;
    if (c.has("reynolds.region")) {
        region_box = c.numbers("reynolds.region");
        if (region_box->size() != 4) throw ConfigError("reynolds.region must be i_min,i_max,j_min,j_max");
    }
    std::size_t mnx = 0, mny = 0, msnap = 0;
    double mdt = 0.0, mu0 = 0.0, mv0 = 0.0;
    if (nu) {
        if (!(*nu > 0.0)) throw ConfigError("manufactured viscosity must be positive");
        mnx = c.count("reynolds.manufactured.nx", 129);
        mny = c.count("reynolds.manufactured.ny", 129);
        msnap = c.count("reynolds.manufactured.snapshots", 51);
        mdt = c.number("reynolds.manufactured.dt", 0.05);
        mu0 = c.number("reynolds.manufactured.u0", 0.0);
        mv0 = c.number("reynolds.manufactured.v0", 0.0);
    }
    c.require_all_used(kForReynolds);

    const auto stack = nu ? manufactured_diffusion_stack(*nu, mnx, mny, msnap, mdt, mu0, mv0)
                          : load_snapshot_stack(manifest);
    const double re_target = target.value_or(nu ? 1.0 / *nu : 100.0);
    WakeRegion region = default_wake_region(stack);
    if (region_box) {
        const auto& b = *region_box;
        region = {static_cast<std::size_t>(b[0]), static_cast<std::size_t>(b[1]), static_cast<std::size_t>(b[2]),
                  static_cast<std::size_t>(b[3])};
    }

    Outputs out(ctx);
    auto& conv = out.file("convergence.csv");
    conv << "solver,lambda,sensors,repeats,mean_re,harmonic_re,std_re,min_re,max_re,target,relative_error,status\n";
    std::vector<double> lambdas{0.0};
    if (ridge > 0.0) lambdas.push_back(ridge);
    double worst = 0.0, total = 0.0;
    std::size_t rows_ok = 0;
    for (double lambda : lambdas) {
        for (std::size_t count : counts) {
            auto row_opts = opts;
            row_opts.lambda = lambda;
            row_opts.sensor_counts = {count};
            const std::string solver = lambda == 0.0 ? "plain" : "ridge";
            conv << solver << "," << num(lambda) << "," << count << "," << opts.repeats << ",";
            try {
                const auto est = estimate_reynolds(stack, region, row_opts).front();
                const auto& per = est.per_seed_re;
                const double mean = est.re;
                double var = 0.0;
                for (double r : per) var += (r - mean) * (r - mean);
                const double sd = per.size() > 1 ? std::sqrt(var / static_cast<double>(per.size() - 1)) : 0.0;
                const double err = std::abs(mean - re_target) / re_target;
                worst = std::max(worst, err);
                total += err;
                ++rows_ok;
                conv << num(mean) << "," << num(est.harmonic_re) << "," << num(sd) << ","
                     << num(*std::min_element(per.begin(), per.end())) << ","
                     << num(*std::max_element(per.begin(), per.end())) << "," << num(re_target) << "," << num(err)
                     << ",ok\n";
            } catch (const Error& err) {
                if (err.kind() != ErrorKind::NonPhysical && err.kind() != ErrorKind::RankDeficient) throw;
                conv << "nan,nan,nan,nan,nan," << num(re_target) << ",nan," << to_string(err.kind()) << "\n";
                out.note(solver + " row with " + std::to_string(count) + " sensors: " + err.what());
            }
        }
    }
    ordered_json summary{{"source", nu ? "manufactured" : manifest},
                         {"grid", {stack.nx, stack.ny}},
                         {"snapshots", stack.snapshot_count()},
                         {"region", {region.i_min, region.i_max, region.j_min, region.j_max}},
                         {"target", re_target},
                         {"seed", opts.seed},
                         {"rows_ok", rows_ok},
                         {"max_relative_error", rows_ok ? json_number(worst) : ordered_json(nullptr)},
                         {"mean_relative_error", rows_ok ? json_number(total / rows_ok) : ordered_json(nullptr)}};
    if (stack.curl_rms) summary["curl_residual_rms"] = *stack.curl_rms;
    out.json("summary.json", summary);
    out.write();
    std::cout << rows_ok << " convergence rows, mean relative error " << (rows_ok ? num(total / rows_ok) : "nan")
              << "\n";
    return 0;
}

int cmd_convert(CommandContext& ctx) {
    const auto& c = ctx.config;
    ColumnTextLayout layout;
    layout.nx = c.count("convert.nx", layout.nx);
    layout.ny = c.count("convert.ny", layout.ny);
    layout.dx = c.number("convert.dx", layout.dx);
    layout.dy = c.number("convert.dy", layout.dy);
    layout.dt = c.number("convert.dt", layout.dt);
    layout.cylinder.x = c.number("convert.cylinder_x", layout.cylinder.x);
    layout.cylinder.y = c.number("convert.cylinder_y", layout.cylinder.y);
    layout.cylinder.diameter = c.number("convert.diameter", layout.cylinder.diameter);
    c.require_all_used(kForConvert);
    if (ctx.u_path.empty() || ctx.v_path.empty() || ctx.w_path.empty()) {
        throw ConfigError("convert needs --u, --v and --w");
    }
    const auto manifest = convert_column_text(ctx.u_path, ctx.v_path, ctx.w_path, layout, ctx.out_dir);
    std::cout << "wrote " << manifest << "\n";
    return 0;
}

}  // namespace pir::cli
