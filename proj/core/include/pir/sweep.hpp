#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pir/estimation.hpp"
#include "pir/integrator.hpp"

namespace pir {

/// Closed interval a parameter is drawn from, uniformly.
struct ParameterRange {
    std::string name;
    double low = 0.0;
    double high = 0.0;
};

struct SweepSpec {
    /// One range per unknown parameter, keyed by parameter name.
    std::vector<ParameterRange> domain;
    std::size_t sample_count = 1;
    /// Parameters held at fixed values (for example tau = 0).
    std::vector<std::pair<std::string, double>> fixed_parameters;
    std::uint64_t seed = 0;
    /// Also solve with unit-norm column scaling.
    bool include_normalized = true;
    /// Worker threads; 0 uses the hardware concurrency.
    std::size_t threads = 0;
};

/// Outcome of one solve of one draw.
struct DrawResult {
    bool ok = false;
    std::string failure;
    Vector estimate;
    Vector errors;  ///< relative errors of the unknown parameters, partition order
    double max_error = 0.0;
    double mean_error = 0.0;
};

struct SweepDraw {
    std::size_t index = 0;
    Vector omega;
    DrawResult plain;
    DrawResult normalized;
};

inline constexpr std::array<double, 5> kSweepThresholds{1.0, 0.5, 0.1, 0.05, 0.01};

/// Fraction of all draws (failures count as misses) whose max / mean error
/// is strictly below each threshold in kSweepThresholds.
struct ThresholdTable {
    std::array<double, kSweepThresholds.size()> max_below{};
    std::array<double, kSweepThresholds.size()> mean_below{};
};

struct SweepResult {
    std::vector<std::string> unknown_names;
    std::vector<SweepDraw> draws;  ///< ordered by draw index
    ThresholdTable plain;
    ThresholdTable normalized;     ///< zeros unless include_normalized
    std::size_t plain_failures = 0;
    std::size_t normalized_failures = 0;
};

/// Draws parameters from the domain, simulates each draw with the template's
/// horizon and initial state, estimates over `window` and records relative
/// errors. Draw i uses a generator seeded with seed_seq{seed, i}, so results
/// do not depend on the thread count.
[[nodiscard]] SweepResult run_sweep(const ParameterLinearModel& model, const SweepSpec& spec,
                                    const SimulationConfig& simulation, const EstimationWindow& window,
                                    DerivativeScheme scheme = DerivativeScheme::Interior);

[[nodiscard]] ThresholdTable threshold_table(const std::vector<SweepDraw>& draws, bool normalized);

}  // namespace pir
