#include "pir/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "pir/error.hpp"

namespace pir {

namespace {

std::string shape_string(Eigen::Index r, Eigen::Index c) {
    std::ostringstream os;
    os << r << "x" << c;
    return os.str();
}

void check_consistent(const StackedSystem& system) {
    if (system.matrix.rows() != system.rhs.size()) {
        throw Error(ErrorKind::ShapeMismatch,
                    "matrix is " + shape_string(system.matrix.rows(), system.matrix.cols()) +
                        " but rhs has " + std::to_string(system.rhs.size()) + " rows");
    }
    if (!system.matrix.allFinite() || !system.rhs.allFinite()) {
        throw Error(ErrorKind::InvalidArgument, "system contains non-finite entries");
    }
}

double ratio_squared(const Vector& diagonal) {
    const Vector mag = diagonal.cwiseAbs();
    const double hi = mag.maxCoeff();
    const double lo = mag.minCoeff();
    if (lo == 0.0 || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
    const double r = hi / lo;
    return r * r;
}

struct RawSolution {
    Vector values;
    double condition = 1.0;
};

// QR on A (or on [A; sqrt(lambda) I] for ridge). The returned condition
// estimate is the squared |R| diagonal ratio, i.e. an estimate for the normal matrix.
RawSolution solve_qr(const Matrix& a, const Vector& b, double lambda) {
    const Eigen::Index n = a.cols();
    Matrix design = a;
    Vector rhs = b;
    if (lambda > 0.0) {
        design.resize(a.rows() + n, n);
        design.topRows(a.rows()) = a;
        design.bottomRows(n) = std::sqrt(lambda) * Matrix::Identity(n, n);
        rhs.resize(b.size() + n);
        rhs.head(b.size()) = b;
        rhs.tail(n).setZero();
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    RawSolution out;
    const Matrix r = qr.matrixR().topLeftCorner(n, n).template triangularView<Eigen::Upper>();
    out.condition = ratio_squared(r.diagonal());
    if (std::isfinite(out.condition)) {
        out.values = qr.solve(rhs);
    }
    return out;
}

ParameterEstimate solve_impl(const StackedSystem& system, double lambda, const SolveOptions& options) {
    check_consistent(system);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::InvalidArgument, "ridge lambda must be a finite nonnegative number");
    }
    const Eigen::Index cols = system.matrix.cols();
    const Eigen::Index rows = system.matrix.rows();

    ParameterEstimate est;
    est.ridge_lambda = lambda;
    if (cols == 0) {
        est.values = Vector(0);
        est.residual_norm = system.rhs.norm();
        est.condition_estimate = 1.0;
        return est;
    }
    if (rows == 0) {
        throw Error(ErrorKind::ShapeMismatch, "system has no rows");
    }
    if (lambda == 0.0 && rows < cols) {
        throw Error(ErrorKind::ShapeMismatch,
                    "least squares needs a tall system, got " + shape_string(rows, cols));
    }

    Vector scale = Vector::Ones(cols);
    Matrix a = system.matrix;
    if (options.normalize_columns) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double n = a.col(j).norm();
            if (n > 0.0) {
                scale(j) = n;
                a.col(j) /= n;
            }
        }
    }

    RawSolution sol;
    bool solved = false;
    if (static_cast<std::size_t>(cols) <= options.max_normal_equation_cols) {
        Matrix normal = a.transpose() * a;
        normal.diagonal().array() += lambda;
        Eigen::LLT<Matrix> llt(normal);
        if (llt.info() == Eigen::Success) {
            const Matrix l = llt.matrixL();
            sol.condition = ratio_squared(l.diagonal());
            if (sol.condition <= options.qr_threshold) {
                sol.values = llt.solve(a.transpose() * system.rhs);
                solved = true;
            }
        } else if (lambda == 0.0) {
            // A zero or negative pivot; let QR confirm before giving up so
            // that a barely-positive-definite matrix is not misreported.
            sol.condition = std::numeric_limits<double>::infinity();
        }
    }
    if (!solved) {
        sol = solve_qr(a, system.rhs, lambda);
    }
    if (lambda == 0.0 && !(sol.condition <= options.rank_threshold)) {
        std::ostringstream os;
        os << "normal matrix is singular or ill-conditioned (condition estimate " << sol.condition
           << " > " << options.rank_threshold << ")";
        throw Error(ErrorKind::RankDeficient, os.str());
    }
    if (sol.values.size() != cols || !sol.values.allFinite()) {
        throw Error(ErrorKind::RankDeficient, "solver produced a non-finite solution");
    }

    est.values = sol.values.cwiseQuotient(scale);
    est.condition_estimate = std::max(1.0, sol.condition);
    est.residual_norm = (system.matrix * est.values - system.rhs).norm();
    return est;
}

}  // namespace

StackedSystem::StackedSystem(Matrix m, Vector b) : matrix(std::move(m)), rhs(std::move(b)) {}

ParameterPartition ParameterPartition::all_unknown(std::size_t parameter_count) {
    ParameterPartition p;
    p.unknown_indices.resize(parameter_count);
    for (std::size_t i = 0; i < parameter_count; ++i) p.unknown_indices[i] = i;
    return p;
}

ParameterPartition ParameterPartition::with_known(std::size_t parameter_count,
                                                  std::vector<std::pair<std::size_t, double>> known) {
    std::sort(known.begin(), known.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ParameterPartition p;
    std::vector<bool> is_known(parameter_count, false);
    for (const auto& [index, value] : known) {
        if (index >= parameter_count) {
            throw Error(ErrorKind::IndexOutOfRange, "known parameter index " + std::to_string(index) +
                                                        " out of range for " +
                                                        std::to_string(parameter_count) + " parameters");
        }
        if (is_known[index]) {
            throw Error(ErrorKind::InvalidArgument, "parameter index " + std::to_string(index) +
                                                        " listed as known twice");
        }
        is_known[index] = true;
        p.known_indices.push_back(index);
        p.known_values.push_back(value);
    }
    for (std::size_t i = 0; i < parameter_count; ++i) {
        if (!is_known[i]) p.unknown_indices.push_back(i);
    }
    return p;
}

void ParameterPartition::validate(std::size_t k) const {
    if (known_indices.size() != known_values.size()) {
        throw Error(ErrorKind::ShapeMismatch, "known_indices and known_values differ in length");
    }
    std::vector<int> seen(k, 0);
    auto mark = [&](std::size_t i) {
        if (i >= k) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "parameter index " + std::to_string(i) + " out of range for " + std::to_string(k));
        }
        ++seen[i];
    };
    for (auto i : known_indices) mark(i);
    for (auto i : unknown_indices) mark(i);
    for (std::size_t i = 0; i < k; ++i) {
        if (seen[i] != 1) {
            throw Error(ErrorKind::ShapeMismatch,
                        "partition must cover every parameter exactly once (index " + std::to_string(i) + ")");
        }
    }
}

ParameterEstimate solve_ols(const StackedSystem& system, const SolveOptions& options) {
    return solve_impl(system, 0.0, options);
}

ParameterEstimate solve_ridge(const StackedSystem& system, double lambda, const SolveOptions& options) {
    return solve_impl(system, lambda, options);
}

StackedSystem stack_systems(std::span<const StackedSystem> blocks) {
    if (blocks.empty()) {
        throw Error(ErrorKind::InvalidArgument, "cannot stack an empty list of blocks");
    }
    const Eigen::Index cols = blocks.front().matrix.cols();
    Eigen::Index rows = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        if (b.matrix.cols() != cols) {
            throw Error(ErrorKind::ShapeMismatch, "block " + std::to_string(i) + " has " +
                                                      std::to_string(b.matrix.cols()) + " columns, expected " +
                                                      std::to_string(cols));
        }
        if (b.matrix.rows() != b.rhs.size()) {
            throw Error(ErrorKind::ShapeMismatch, "block " + std::to_string(i) + " rhs length mismatch");
        }
        rows += b.matrix.rows();
    }
    StackedSystem out{Matrix(rows, cols), Vector(rows)};
    Eigen::Index offset = 0;
    for (const auto& b : blocks) {
        out.matrix.middleRows(offset, b.matrix.rows()) = b.matrix;
        out.rhs.segment(offset, b.rhs.size()) = b.rhs;
        offset += b.matrix.rows();
    }
    return out;
}

StackedSystem apply_partition(const StackedSystem& system, const ParameterPartition& partition) {
    check_consistent(system);
    partition.validate(system.cols());
    const auto rows = system.matrix.rows();
    StackedSystem out{Matrix(rows, static_cast<Eigen::Index>(partition.unknown_indices.size())), system.rhs};
    for (std::size_t c = 0; c < partition.unknown_indices.size(); ++c) {
        out.matrix.col(static_cast<Eigen::Index>(c)) =
            system.matrix.col(static_cast<Eigen::Index>(partition.unknown_indices[c]));
    }
    for (std::size_t c = 0; c < partition.known_indices.size(); ++c) {
        out.rhs -= system.matrix.col(static_cast<Eigen::Index>(partition.known_indices[c])) *
                   partition.known_values[c];
    }
    return out;
}

ParameterEstimate recombine(const ParameterEstimate& unknown_estimate, const ParameterPartition& partition) {
    if (static_cast<std::size_t>(unknown_estimate.values.size()) != partition.unknown_indices.size()) {
        throw Error(ErrorKind::ShapeMismatch, "estimate length does not match the unknown parameter count");
    }
    ParameterEstimate full = unknown_estimate;
    full.values = Vector::Zero(static_cast<Eigen::Index>(partition.parameter_count()));
    for (std::size_t c = 0; c < partition.known_indices.size(); ++c) {
        full.values(static_cast<Eigen::Index>(partition.known_indices[c])) = partition.known_values[c];
    }
    for (std::size_t c = 0; c < partition.unknown_indices.size(); ++c) {
        full.values(static_cast<Eigen::Index>(partition.unknown_indices[c])) =
            unknown_estimate.values(static_cast<Eigen::Index>(c));
    }
    return full;
}

ParameterEstimate solve_partitioned(const StackedSystem& system, const ParameterPartition& partition,
                                    double lambda, const SolveOptions& options) {
    const StackedSystem reduced = apply_partition(system, partition);
    return recombine(solve_ridge(reduced, lambda, options), partition);
}

}  // namespace pir
