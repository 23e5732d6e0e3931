#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pir {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Vertically concatenated residual blocks: `matrix * omega ≈ rhs`.
struct StackedSystem {
    Matrix matrix;
    Vector rhs;

    StackedSystem() = default;
    StackedSystem(Matrix m, Vector b);

    [[nodiscard]] std::size_t rows() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
    [[nodiscard]] std::size_t cols() const noexcept { return static_cast<std::size_t>(matrix.cols()); }
};

/// Split of the parameter vector into a-priori known entries and the
/// entries left for the regression. Index lists are kept in ascending order.
struct ParameterPartition {
    std::vector<std::size_t> known_indices;
    std::vector<double> known_values;
    std::vector<std::size_t> unknown_indices;

    /// Partition with no known parameters.
    static ParameterPartition all_unknown(std::size_t parameter_count);

    /// Builds the complement automatically. Throws IndexOutOfRange for an index
    /// ≥ parameter_count and InvalidArgument for duplicates.
    static ParameterPartition with_known(std::size_t parameter_count,
                                         std::vector<std::pair<std::size_t, double>> known);

    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return known_indices.size() + unknown_indices.size();
    }

    /// Checks disjointness and coverage of {0..k-1}.
    void validate(std::size_t parameter_count) const;
};

struct ParameterEstimate {
    Vector values;                   ///< full length k; known entries copied through
    double residual_norm = 0.0;      ///< ||A w - b||_2 over the solved system
    double condition_estimate = 1.0; ///< cheap estimate of cond(A^T A + lambda I)
    double ridge_lambda = 0.0;
};

struct SolveOptions {
    /// Scale every column of A to unit 2-norm before solving and undo the
    /// scaling afterwards.
    bool normalize_columns = false;
    /// Above this condition estimate the system is declared rank deficient.
    double rank_threshold = 1e12;
    /// Above this condition estimate the normal-equation solution is replaced
    /// by a column-pivoted QR solve on the (augmented) design matrix.
    double qr_threshold = 1e8;
    /// Systems with more columns than this are solved by QR directly.
    std::size_t max_normal_equation_cols = 16;
};

/// Ordinary least squares, closed form. Throws ShapeMismatch for a wide
/// system and RankDeficient when the normal matrix is singular or its
/// condition estimate exceeds `rank_threshold`.
[[nodiscard]] ParameterEstimate solve_ols(const StackedSystem& system, const SolveOptions& options = {});

/// Ridge-regularized least squares, (A^T A + lambda I)^{-1} A^T b.
/// lambda = 0 reduces to solve_ols; lambda > 0 never raises RankDeficient.
[[nodiscard]] ParameterEstimate solve_ridge(const StackedSystem& system, double lambda,
                                            const SolveOptions& options = {});

[[nodiscard]] StackedSystem stack_systems(std::span<const StackedSystem> blocks);

/// Removes the known columns and moves their contribution to the right-hand
/// side: rhs' = rhs - A_known * known_values. The result has one column per
/// unknown index, in partition order. With every parameter known the result
/// has zero columns and rhs' is the residual b - A w_known.
[[nodiscard]] StackedSystem apply_partition(const StackedSystem& system, const ParameterPartition& partition);

/// Reassembles a full-length estimate from the solution of a partitioned
/// system. Known values are copied verbatim.
[[nodiscard]] ParameterEstimate recombine(const ParameterEstimate& unknown_estimate,
                                          const ParameterPartition& partition);

/// apply_partition + solve_ridge (lambda = 0 means OLS) + recombine.
[[nodiscard]] ParameterEstimate solve_partitioned(const StackedSystem& system,
                                                  const ParameterPartition& partition,
                                                  double lambda = 0.0,
                                                  const SolveOptions& options = {});

}  // namespace pir
