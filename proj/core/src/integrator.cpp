#include "pir/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pir/error.hpp"

namespace pir {

ParameterSchedule ParameterSchedule::constant(Vector omega) {
    ParameterSchedule s;
    s.kind_ = Kind::Constant;
    s.base_ = std::move(omega);
    return s;
}

ParameterSchedule ParameterSchedule::piecewise(std::vector<double> times, std::vector<Vector> values) {
    if (times.empty() || times.size() != values.size()) {
        throw Error(ErrorKind::ShapeMismatch, "piecewise schedule needs one parameter vector per time");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw Error(ErrorKind::InvalidArgument, "piecewise schedule times must be strictly increasing");
        }
    }
    for (const auto& v : values) {
        if (v.size() != values.front().size()) {
            throw Error(ErrorKind::ShapeMismatch, "piecewise schedule entries differ in length");
        }
    }
    ParameterSchedule s;
    s.kind_ = Kind::PiecewisePerStep;
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    return s;
}

ParameterSchedule ParameterSchedule::sinusoidal(Vector base, std::size_t index, double mean, double amplitude,
                                                double period) {
    if (index >= static_cast<std::size_t>(base.size())) {
        throw Error(ErrorKind::IndexOutOfRange, "sinusoidal parameter index out of range");
    }
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "sinusoid period must be positive");
    ParameterSchedule s;
    s.kind_ = Kind::Sinusoidal;
    s.base_ = std::move(base);
    s.index_ = index;
    s.mean_ = mean;
    s.amplitude_ = amplitude;
    s.period_ = period;
    return s;
}

Vector ParameterSchedule::at(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return base_;
        case Kind::PiecewisePerStep: {
            const auto it = std::upper_bound(times_.begin(), times_.end(), t);
            const auto pos = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
            return values_[pos];
        }
        case Kind::Sinusoidal: {
            Vector w = base_;
            w(static_cast<Eigen::Index>(index_)) =
                amplitude_ * std::sin(2.0 * std::numbers::pi * t / period_) + mean_;
            return w;
        }
    }
    return base_;
}

std::size_t ParameterSchedule::parameter_count() const noexcept {
    if (kind_ == Kind::PiecewisePerStep) return static_cast<std::size_t>(values_.front().size());
    return static_cast<std::size_t>(base_.size());
}

ModelState erk4_step(const ParameterLinearModel& model, const ModelState& state, const Vector& omega, double h) {
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, "step size must be positive");
    const double t = state.time;
    const Vector& x = state.values;
    const Vector k1 = eval_rhs(model, {x, t}, omega);
    const Vector k2 = eval_rhs(model, {x + 0.5 * h * k1, t + 0.5 * h}, omega);
    const Vector k3 = eval_rhs(model, {x + 0.5 * h * k2, t + 0.5 * h}, omega);
    const Vector k4 = eval_rhs(model, {x + h * k3, t + h}, omega);
    ModelState next{x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4), t + h};
    if (!next.values.allFinite()) {
        throw Error(ErrorKind::NonFiniteState, "RK4 step from t=" + std::to_string(t) + " produced a non-finite state");
    }
    return next;
}

std::size_t step_count(const SimulationConfig& config) {
    const double span = config.t_end - config.t0;
    if (!(config.step > 0.0) || !std::isfinite(config.step)) {
        throw Error(ErrorKind::InvalidArgument, "step must be positive");
    }
    if (!(span > 0.0)) throw Error(ErrorKind::InvalidArgument, "t_end must exceed t0");
    if (config.step > span * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InvalidArgument, "step is longer than the simulated interval");
    }
    return static_cast<std::size_t>(std::llround(span / config.step));
}

TimeSeries simulate(const ParameterLinearModel& model, const SimulationConfig& config) {
    const std::size_t n = step_count(config);
    if (config.initial_state.size() != static_cast<Eigen::Index>(model.state_count())) {
        throw Error(ErrorKind::ShapeMismatch, "initial state has " + std::to_string(config.initial_state.size()) +
                                                  " components, model '" + model.name() + "' has " +
                                                  std::to_string(model.state_count()));
    }
    if (!config.initial_state.allFinite()) {
        throw Error(ErrorKind::NonFiniteState, "initial state is not finite");
    }
    if (config.schedule.parameter_count() != model.parameter_count()) {
        throw Error(ErrorKind::ShapeMismatch, "schedule has " + std::to_string(config.schedule.parameter_count()) +
                                                  " parameters, model '" + model.name() + "' has " +
                                                  std::to_string(model.parameter_count()));
    }

    TimeSeries out;
    out.times.resize(n + 1);
    out.states.resize(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(model.state_count()));
    ModelState state{config.initial_state, config.t0};
    out.times[0] = config.t0;
    out.states.row(0) = state.values.transpose();
    for (std::size_t i = 0; i < n; ++i) {
        // Times are t0 + i·h rather than accumulated sums so they stay exact.
        state.time = config.t0 + static_cast<double>(i) * config.step;
        try {
            state = erk4_step(model, state, config.schedule.at(state.time), config.step);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonFiniteState) throw;
            throw Error(ErrorKind::NonFiniteState, "non-finite state at step " + std::to_string(i + 1));
        }
        out.times[i + 1] = config.t0 + static_cast<double>(i + 1) * config.step;
        out.states.row(static_cast<Eigen::Index>(i + 1)) = state.values.transpose();
    }
    return out;
}

}  // namespace pir
