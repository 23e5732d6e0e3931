#pragma once

#include <cstddef>
#include <vector>

#include "pir/differentiation.hpp"
#include "pir/models.hpp"

namespace pir {

/// Parameter vector as a function of time.
class ParameterSchedule {
public:
    enum class Kind { Constant, PiecewisePerStep, Sinusoidal };

    /// ω(t) = omega for all t.
    static ParameterSchedule constant(Vector omega);

    /// ω(t) = values[i] for the last i with times[i] ≤ t (values[0] before
    /// times[0]). Times must be strictly increasing.
    static ParameterSchedule piecewise(std::vector<double> times, std::vector<Vector> values);

    /// base with entry `index` replaced by amplitude·sin(2πt/period) + mean.
    static ParameterSchedule sinusoidal(Vector base, std::size_t index, double mean, double amplitude,
                                        double period);

    [[nodiscard]] Vector at(double t) const;
    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t parameter_count() const noexcept;

private:
    Kind kind_ = Kind::Constant;
    Vector base_;
    std::vector<double> times_;
    std::vector<Vector> values_;
    std::size_t index_ = 0;
    double mean_ = 0.0;
    double amplitude_ = 0.0;
    double period_ = 1.0;
};

struct SimulationConfig {
    double t0 = 0.0;
    double t_end = 1.0;
    double step = 0.1;
    Vector initial_state;
    ParameterSchedule schedule = ParameterSchedule::constant(Vector());
};

/// One classical RK4 step with ω held fixed. The returned state carries
/// time state.time + h. Throws NonFiniteState when a stage overflows.
[[nodiscard]] ModelState erk4_step(const ParameterLinearModel& model, const ModelState& state, const Vector& omega,
                                   double h);

/// Number of RK4 steps simulate() takes: round((t_end - t0) / step).
[[nodiscard]] std::size_t step_count(const SimulationConfig& config);

/// States at t0, t0 + h, ..., t0 + n·h with n = step_count(config). The
/// schedule is evaluated once per step, at the step start.
[[nodiscard]] TimeSeries simulate(const ParameterLinearModel& model, const SimulationConfig& config);

}  // namespace pir
