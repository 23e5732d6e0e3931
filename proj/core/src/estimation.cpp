#include "pir/estimation.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "pir/error.hpp"

namespace pir {

namespace {

std::string window_string(const EstimationWindow& w) {
    return "[" + std::to_string(w.first) + ", " + std::to_string(w.last) + "]";
}

void check_window(const EstimationWindow& window, std::size_t n, DerivativeScheme scheme) {
    if (window.first > window.last) {
        throw Error(ErrorKind::InvalidArgument, "window " + window_string(window) + " is empty");
    }
    if (scheme == DerivativeScheme::Interior) {
        if (n < 3) throw Error(ErrorKind::TooFewPoints, "central differences need at least 3 samples");
        if (window.first < 1 || window.last + 2 > n) {
            throw Error(ErrorKind::IndexOutOfRange, "window " + window_string(window) +
                                                        " needs both neighbours inside a series of length " +
                                                        std::to_string(n));
        }
    } else {
        if (window.last >= n) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "window " + window_string(window) + " outside series of length " + std::to_string(n));
        }
        if (window.size() < 2) {
            throw Error(ErrorKind::TooFewPoints, "full-length differences need at least 2 samples in the window");
        }
    }
}

StackedSystem assemble_rows(const ParameterLinearModel& model, const TimeSeries& series, const Matrix& derivatives,
                            std::size_t derivative_offset, const EstimationWindow& window) {
    const auto m = static_cast<Eigen::Index>(model.state_count());
    const auto k = static_cast<Eigen::Index>(model.parameter_count());
    const auto blocks = static_cast<Eigen::Index>(window.size());
    StackedSystem out{Matrix(m * blocks, k), Vector(m * blocks)};
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const auto i = static_cast<Eigen::Index>(window.first) + b;
        const Vector x = series.states.row(i).transpose();
        out.matrix.middleRows(b * m, m) = model.build_matrix(x, series.times[static_cast<std::size_t>(i)]);
        out.rhs.segment(b * m, m) =
            derivatives.row(i - static_cast<Eigen::Index>(derivative_offset)).transpose();
    }
    return out;
}

std::size_t unknown_count(const ParameterPartition& partition) { return partition.unknown_indices.size(); }

}  // namespace

EstimationWindow EstimationWindow::interior(std::size_t series_length) {
    if (series_length < 3) throw Error(ErrorKind::TooFewPoints, "series has no interior samples");
    return {1, series_length - 2};
}

EstimationWindow EstimationWindow::all(std::size_t series_length) {
    if (series_length < 1) throw Error(ErrorKind::TooFewPoints, "series is empty");
    return {0, series_length - 1};
}

StackedSystem assemble_from_series(const ParameterLinearModel& model, const TimeSeries& series,
                                   const EstimationWindow& window, DerivativeScheme scheme) {
    series.validate();
    if (series.dim() != model.state_count()) {
        throw Error(ErrorKind::ShapeMismatch, "series has " + std::to_string(series.dim()) + " columns, model '" +
                                                  model.name() + "' has " + std::to_string(model.state_count()) +
                                                  " states");
    }
    check_window(window, series.size(), scheme);
    if (scheme == DerivativeScheme::Interior) {
        // Derivatives only over the rows that are needed: [first-1, last+1].
        const TimeSeries local = series.slice(window.first - 1, window.last + 1);
        const TimeSeries deriv = central_diff(local);
        return assemble_rows(model, series, deriv.states, window.first, window);
    }
    const TimeSeries deriv = full_length_diff(series.slice(window.first, window.last));
    return assemble_rows(model, series, deriv.states, window.first, window);
}

StackedSystem assemble_with_derivatives(const ParameterLinearModel& model, const TimeSeries& series,
                                        const Matrix& derivatives, const EstimationWindow& window) {
    series.validate();
    if (derivatives.rows() != series.states.rows() || derivatives.cols() != series.states.cols() ||
        series.dim() != model.state_count()) {
        throw Error(ErrorKind::ShapeMismatch, "derivatives must match the series shape and the model state count");
    }
    if (window.first > window.last || window.last >= series.size()) {
        throw Error(ErrorKind::IndexOutOfRange, "window " + window_string(window) + " outside series");
    }
    return assemble_rows(model, series, derivatives, 0, window);
}

ParameterEstimate estimate_constant(const ParameterLinearModel& model, const TimeSeries& series,
                                    const EstimationWindow& window, const ParameterPartition& partition,
                                    const EstimationOptions& options) {
    const StackedSystem system = assemble_from_series(model, series, window, options.scheme);
    return solve_partitioned(system, partition, options.ridge_lambda, options.solve);
}

std::vector<TimeVaryingEstimate> estimate_time_varying(const ParameterLinearModel& model, const TimeSeries& series,
                                                       std::size_t width, const ParameterPartition& partition,
                                                       const TimeVaryingOptions& options) {
    if (width < 1) throw Error(ErrorKind::InvalidArgument, "window width must be at least 1");
    partition.validate(model.parameter_count());
    if (model.state_count() * width < unknown_count(partition)) {
        throw Error(ErrorKind::UnderDetermined, std::to_string(model.state_count() * width) + " equations for " +
                                                    std::to_string(unknown_count(partition)) +
                                                    " unknown parameters");
    }
    const auto scheme = options.estimation.scheme;
    const std::size_t n = series.size();
    std::size_t first_end = 0;
    std::size_t last_end = 0;
    if (scheme == DerivativeScheme::Interior) {
        first_end = width;
        if (n < 3 || n - 2 < first_end) {
            throw Error(ErrorKind::TooFewPoints, "series too short for window width " + std::to_string(width));
        }
        last_end = n - 2;
    } else {
        if (width < 2) {
            throw Error(ErrorKind::TooFewPoints, "full-length differences need a window of at least 2 samples");
        }
        first_end = width - 1;
        if (n < width) {
            throw Error(ErrorKind::TooFewPoints, "series too short for window width " + std::to_string(width));
        }
        last_end = n - 1;
    }

    std::vector<TimeVaryingEstimate> out;
    out.reserve(last_end - first_end + 1);
    for (std::size_t i = first_end; i <= last_end; ++i) {
        EstimationWindow window{i + 1 - width, i};
        TimeVaryingEstimate entry;
        entry.index = i;
        try {
            entry.estimate = estimate_constant(model, series, window, partition, options.estimation);
        } catch (const Error& e) {
            const bool can_widen = e.kind() == ErrorKind::RankDeficient && width == 1 &&
                                   options.widen_on_rank_deficiency;
            if (!can_widen) {
                throw Error(e.kind(), std::string(e.what()) + " (window ending at index " + std::to_string(i) + ")");
            }
            // Prefer the earlier neighbour; fall back to the later one at the start.
            const std::size_t lowest = scheme == DerivativeScheme::Interior ? 1 : 0;
            window = i > lowest ? EstimationWindow{i - 1, i} : EstimationWindow{i, i + 1};
            entry.estimate = estimate_constant(model, series, window, partition, options.estimation);
            entry.widened = true;
        }
        entry.width = window.size();
        if (options.attribution == Attribution::End) {
            entry.time = series.times[i];
        } else {
            entry.time = 0.5 * (series.times[window.first] + series.times[window.last]);
        }
        out.push_back(std::move(entry));
    }
    return out;
}

TimeSeries add_noise(const TimeSeries& series, const NoiseSpec& spec) {
    if (!(spec.epsilon >= 0.0) || !std::isfinite(spec.epsilon)) {
        throw Error(ErrorKind::InvalidArgument, "noise level must be a finite nonnegative number");
    }
    TimeSeries out = series;
    if (spec.epsilon == 0.0) return out;
    const Vector scale = spec.epsilon * series.states.cwiseAbs().colwise().maxCoeff().transpose();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < out.states.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.states.cols(); ++j) {
            out.states(i, j) += scale(j) * normal(rng);
        }
    }
    return out;
}

ErrorMetrics relative_error_metrics(const Matrix& truth, const Matrix& estimates) {
    if (truth.rows() != estimates.rows() || truth.cols() != estimates.cols()) {
        throw Error(ErrorKind::ShapeMismatch, "truth and estimates must have the same shape");
    }
    const auto k = truth.cols();
    ErrorMetrics m;
    m.signed_mre = Vector::Constant(k, std::numeric_limits<double>::quiet_NaN());
    m.mean_abs_re = m.signed_mre;
    m.skipped.assign(static_cast<std::size_t>(k), 0);
    for (Eigen::Index j = 0; j < k; ++j) {
        double sum = 0.0;
        double abs_sum = 0.0;
        std::size_t used = 0;
        for (Eigen::Index i = 0; i < truth.rows(); ++i) {
            const double p = truth(i, j);
            if (p == 0.0) {
                ++m.skipped[static_cast<std::size_t>(j)];
                continue;
            }
            const double r = (p - estimates(i, j)) / p;
            sum += r;
            abs_sum += std::abs(r);
            ++used;
        }
        if (used > 0) {
            m.signed_mre(j) = sum / static_cast<double>(used);
            m.mean_abs_re(j) = abs_sum / static_cast<double>(used);
        }
    }
    return m;
}

Vector relative_errors(const Vector& truth, const Vector& estimate) {
    if (truth.size() != estimate.size()) {
        throw Error(ErrorKind::ShapeMismatch, "truth and estimate differ in length");
    }
    Vector out(truth.size());
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        out(i) = truth(i) == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                 : std::abs(estimate(i) - truth(i)) / std::abs(truth(i));
    }
    return out;
}

}  // namespace pir
