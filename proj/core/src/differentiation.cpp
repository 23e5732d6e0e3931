#include "pir/differentiation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "pir/error.hpp"

namespace pir {

namespace {

void require_grid(const GridField& field) {
    if (field.values.rows() < 3 || field.values.cols() < 3) {
        throw Error(ErrorKind::TooFewPoints, "interior stencils need at least a 3x3 grid, got " +
                                                 std::to_string(field.values.rows()) + "x" +
                                                 std::to_string(field.values.cols()));
    }
    if (!(field.dx > 0.0) || !(field.dy > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "grid spacing must be positive");
    }
}

GridField invalid_like(const GridField& field) {
    GridField out;
    out.dx = field.dx;
    out.dy = field.dy;
    out.values = Matrix::Constant(field.values.rows(), field.values.cols(),
                                  std::numeric_limits<double>::quiet_NaN());
    return out;
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> t, Matrix x) : times(std::move(t)), states(std::move(x)) {}

void TimeSeries::validate() const {
    if (static_cast<std::size_t>(states.rows()) != times.size()) {
        throw Error(ErrorKind::ShapeMismatch, "time series has " + std::to_string(times.size()) + " times but " +
                                                  std::to_string(states.rows()) + " state rows");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) {
            throw Error(ErrorKind::InvalidArgument,
                        "times must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
    if (!states.allFinite()) {
        throw Error(ErrorKind::InvalidArgument, "time series contains non-finite states");
    }
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t last) const {
    if (first > last || last >= times.size()) {
        throw Error(ErrorKind::IndexOutOfRange, "slice [" + std::to_string(first) + ", " + std::to_string(last) +
                                                    "] outside series of length " + std::to_string(times.size()));
    }
    const auto n = static_cast<Eigen::Index>(last - first + 1);
    return TimeSeries(std::vector<double>(times.begin() + static_cast<std::ptrdiff_t>(first),
                                          times.begin() + static_cast<std::ptrdiff_t>(last) + 1),
                      states.middleRows(static_cast<Eigen::Index>(first), n));
}

TimeSeries central_diff(const TimeSeries& series) {
    series.validate();
    const std::size_t n = series.size();
    if (n < 3) {
        throw Error(ErrorKind::TooFewPoints, "central differences need at least 3 samples, got " + std::to_string(n));
    }
    TimeSeries out;
    out.times.assign(series.times.begin() + 1, series.times.end() - 1);
    out.states.resize(static_cast<Eigen::Index>(n - 2), series.states.cols());
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out.states.row(r - 1) =
            (series.states.row(r + 1) - series.states.row(r - 1)) / (series.times[i + 1] - series.times[i - 1]);
    }
    return out;
}

TimeSeries full_length_diff(const TimeSeries& series) {
    series.validate();
    const std::size_t n = series.size();
    if (n < 2) {
        throw Error(ErrorKind::TooFewPoints, "differences need at least 2 samples, got " + std::to_string(n));
    }
    TimeSeries out;
    out.times = series.times;
    out.states.resize(series.states.rows(), series.states.cols());
    const auto& x = series.states;
    const auto& t = series.times;
    const auto last = static_cast<Eigen::Index>(n - 1);
    out.states.row(0) = (x.row(1) - x.row(0)) / (t[1] - t[0]);
    out.states.row(last) = (x.row(last) - x.row(last - 1)) / (t[n - 1] - t[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out.states.row(r) = (x.row(r + 1) - x.row(r - 1)) / (t[i + 1] - t[i - 1]);
    }
    return out;
}

FieldGradient spatial_gradient(const GridField& field) {
    require_grid(field);
    FieldGradient out{invalid_like(field), invalid_like(field)};
    const auto nx = field.values.rows();
    const auto ny = field.values.cols();
    for (Eigen::Index j = 1; j + 1 < ny; ++j) {
        for (Eigen::Index i = 1; i + 1 < nx; ++i) {
            out.ddx.values(i, j) = stencil::ddx(field.values, i, j, field.dx);
            out.ddy.values(i, j) = stencil::ddy(field.values, i, j, field.dy);
        }
    }
    return out;
}

GridField spatial_laplacian(const GridField& field) {
    require_grid(field);
    GridField out = invalid_like(field);
    const auto nx = field.values.rows();
    const auto ny = field.values.cols();
    for (Eigen::Index j = 1; j + 1 < ny; ++j) {
        for (Eigen::Index i = 1; i + 1 < nx; ++i) {
            out.values(i, j) = stencil::laplacian(field.values, i, j, field.dx, field.dy);
        }
    }
    return out;
}

}  // namespace pir
