#pragma once

#include <cstddef>
#include <vector>

#include "pir/regression.hpp"

namespace pir {

/// Chronologically ordered states: row i of `states` is x(times[i]).
struct TimeSeries {
    std::vector<double> times;
    Matrix states;

    TimeSeries() = default;
    TimeSeries(std::vector<double> t, Matrix x);

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(states.cols()); }

    /// Strictly increasing times, matching row count, finite entries.
    void validate() const;

    /// Rows [first, last] inclusive as a standalone series.
    [[nodiscard]] TimeSeries slice(std::size_t first, std::size_t last) const;
};

/// Second-order central differences on the interior samples
/// (x[i+1] - x[i-1]) / (t[i+1] - t[i-1]). The result has n-2 rows whose times
/// are t[1..n-2]; endpoints are dropped. Throws TooFewPoints for n < 3.
[[nodiscard]] TimeSeries central_diff(const TimeSeries& series);

/// Full-length derivative: central differences inside, first-order one-sided
/// differences at both ends. Same length and times as the input. Needs n ≥ 2.
[[nodiscard]] TimeSeries full_length_diff(const TimeSeries& series);

/// Scalar field sampled on a regular grid; values(i, j) sits at (i*dx, j*dy).
struct GridField {
    Matrix values;
    double dx = 1.0;
    double dy = 1.0;

    [[nodiscard]] std::size_t nx() const noexcept { return static_cast<std::size_t>(values.rows()); }
    [[nodiscard]] std::size_t ny() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

struct FieldGradient {
    GridField ddx;
    GridField ddy;
};

/// Central first derivatives on interior nodes. The boundary ring of both
/// outputs is NaN (invalid). Throws TooFewPoints when nx or ny < 3.
[[nodiscard]] FieldGradient spatial_gradient(const GridField& field);

/// Five-point Laplacian on interior nodes; boundary ring is NaN.
[[nodiscard]] GridField spatial_laplacian(const GridField& field);

/// Point stencils shared by the field operators and the vorticity assembly.
/// (i, j) must be an interior node.
namespace stencil {

inline double ddx(const Matrix& f, Eigen::Index i, Eigen::Index j, double dx) {
    return (f(i + 1, j) - f(i - 1, j)) / (2.0 * dx);
}

inline double ddy(const Matrix& f, Eigen::Index i, Eigen::Index j, double dy) {
    return (f(i, j + 1) - f(i, j - 1)) / (2.0 * dy);
}

inline double laplacian(const Matrix& f, Eigen::Index i, Eigen::Index j, double dx, double dy) {
    const double c = f(i, j);
    return (f(i + 1, j) - 2.0 * c + f(i - 1, j)) / (dx * dx) +
           (f(i, j + 1) - 2.0 * c + f(i, j - 1)) / (dy * dy);
}

}  // namespace stencil

}  // namespace pir
