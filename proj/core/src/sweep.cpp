#include "pir/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "pir/error.hpp"

namespace pir {

namespace {

struct PreparedSweep {
    ParameterPartition partition;
    std::vector<std::size_t> range_index;  ///< parameter index of each domain entry
};

PreparedSweep prepare(const ParameterLinearModel& model, const SweepSpec& spec) {
    if (spec.sample_count < 1) throw Error(ErrorKind::InvalidArgument, "sample_count must be at least 1");
    const std::size_t k = model.parameter_count();
    std::vector<std::pair<std::size_t, double>> known;
    for (const auto& [name, value] : spec.fixed_parameters) {
        known.emplace_back(model.parameter_index(name), value);
    }
    PreparedSweep p{ParameterPartition::with_known(k, known), {}};

    std::vector<bool> covered(k, false);
    for (const auto& range : spec.domain) {
        const std::size_t idx = model.parameter_index(range.name);
        if (!(range.low <= range.high) || !std::isfinite(range.low) || !std::isfinite(range.high)) {
            throw Error(ErrorKind::InvalidArgument, "range for '" + range.name + "' is not an ordered interval");
        }
        if (covered[idx]) throw Error(ErrorKind::InvalidArgument, "parameter '" + range.name + "' has two ranges");
        if (std::find(p.partition.known_indices.begin(), p.partition.known_indices.end(), idx) !=
            p.partition.known_indices.end()) {
            throw Error(ErrorKind::InvalidArgument, "parameter '" + range.name + "' is both fixed and swept");
        }
        covered[idx] = true;
        p.range_index.push_back(idx);
    }
    for (auto idx : p.partition.unknown_indices) {
        if (!covered[idx]) {
            throw Error(ErrorKind::InvalidArgument,
                        "no range for unknown parameter '" + model.parameter_names()[idx] + "'");
        }
    }
    return p;
}

DrawResult solve_draw(const StackedSystem& system, const ParameterPartition& partition, const Vector& omega,
                      bool normalize) {
    DrawResult r;
    try {
        SolveOptions options;
        options.normalize_columns = normalize;
        const ParameterEstimate est = solve_partitioned(system, partition, 0.0, options);
        r.estimate = est.values;
        r.errors.resize(static_cast<Eigen::Index>(partition.unknown_indices.size()));
        for (std::size_t c = 0; c < partition.unknown_indices.size(); ++c) {
            const auto j = static_cast<Eigen::Index>(partition.unknown_indices[c]);
            r.errors(static_cast<Eigen::Index>(c)) = std::abs(est.values(j) - omega(j)) / std::abs(omega(j));
        }
        if (!r.errors.allFinite()) {
            r.failure = "relative error undefined (true parameter is zero)";
            return r;
        }
        r.max_error = r.errors.size() ? r.errors.maxCoeff() : 0.0;
        r.mean_error = r.errors.size() ? r.errors.mean() : 0.0;
        r.ok = true;
    } catch (const Error& e) {
        r.failure = e.what();
    }
    return r;
}

SweepDraw run_draw(const ParameterLinearModel& model, const SweepSpec& spec, const PreparedSweep& prepared,
                   const SimulationConfig& simulation, const EstimationWindow& window, DerivativeScheme scheme,
                   std::size_t index) {
    SweepDraw draw;
    draw.index = index;
    std::seed_seq seq{static_cast<std::uint64_t>(spec.seed), static_cast<std::uint64_t>(index)};
    std::mt19937_64 rng(seq);
    draw.omega = Vector::Zero(static_cast<Eigen::Index>(model.parameter_count()));
    for (std::size_t c = 0; c < prepared.partition.known_indices.size(); ++c) {
        draw.omega(static_cast<Eigen::Index>(prepared.partition.known_indices[c])) =
            prepared.partition.known_values[c];
    }
    for (std::size_t r = 0; r < spec.domain.size(); ++r) {
        std::uniform_real_distribution<double> uniform(spec.domain[r].low, spec.domain[r].high);
        draw.omega(static_cast<Eigen::Index>(prepared.range_index[r])) = uniform(rng);
    }

    StackedSystem system;
    try {
        SimulationConfig config = simulation;
        config.schedule = ParameterSchedule::constant(draw.omega);
        const TimeSeries series = simulate(model, config);
        system = assemble_from_series(model, series, window, scheme);
    } catch (const Error& e) {
        draw.plain.failure = e.what();
        draw.normalized.failure = e.what();
        return draw;
    }
    draw.plain = solve_draw(system, prepared.partition, draw.omega, false);
    if (spec.include_normalized) {
        draw.normalized = solve_draw(system, prepared.partition, draw.omega, true);
    } else {
        draw.normalized.failure = "not run";
    }
    return draw;
}

}  // namespace

ThresholdTable threshold_table(const std::vector<SweepDraw>& draws, bool normalized) {
    ThresholdTable table;
    if (draws.empty()) return table;
    for (std::size_t t = 0; t < kSweepThresholds.size(); ++t) {
        std::size_t max_hits = 0;
        std::size_t mean_hits = 0;
        for (const auto& d : draws) {
            const DrawResult& r = normalized ? d.normalized : d.plain;
            if (!r.ok) continue;
            if (r.max_error < kSweepThresholds[t]) ++max_hits;
            if (r.mean_error < kSweepThresholds[t]) ++mean_hits;
        }
        table.max_below[t] = static_cast<double>(max_hits) / static_cast<double>(draws.size());
        table.mean_below[t] = static_cast<double>(mean_hits) / static_cast<double>(draws.size());
    }
    return table;
}

SweepResult run_sweep(const ParameterLinearModel& model, const SweepSpec& spec, const SimulationConfig& simulation,
                      const EstimationWindow& window, DerivativeScheme scheme) {
    const PreparedSweep prepared = prepare(model, spec);
    SweepResult result;
    for (auto idx : prepared.partition.unknown_indices) result.unknown_names.push_back(model.parameter_names()[idx]);
    result.draws.resize(spec.sample_count);

    std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, spec.sample_count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < spec.sample_count; i = next.fetch_add(1)) {
            result.draws[i] = run_draw(model, spec, prepared, simulation, window, scheme, i);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (const auto& d : result.draws) {
        if (!d.plain.ok) ++result.plain_failures;
        if (spec.include_normalized && !d.normalized.ok) ++result.normalized_failures;
    }
    result.plain = threshold_table(result.draws, false);
    if (spec.include_normalized) result.normalized = threshold_table(result.draws, true);
    return result;
}

}  // namespace pir
