#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pir/differentiation.hpp"
#include "pir/models.hpp"
#include "pir/regression.hpp"

namespace pir {

/// How the derivative rows of the residual system are obtained.
enum class DerivativeScheme {
    /// Central differences using the neighbours i-1 and i+1 from the full
    /// series. Window indices must be interior.
    Interior,
    /// Derivatives computed only from the samples inside the window:
    /// central inside, first-order one-sided at the two window ends.
    FullLength,
};

/// Consecutive sample indices [first, last] (inclusive).
struct EstimationWindow {
    std::size_t first = 1;
    std::size_t last = 1;

    [[nodiscard]] std::size_t size() const noexcept { return last - first + 1; }

    /// Every index with two neighbours: [1, n-2].
    static EstimationWindow interior(std::size_t series_length);
    /// Every index: [0, n-1].
    static EstimationWindow all(std::size_t series_length);
};

struct EstimationOptions {
    DerivativeScheme scheme = DerivativeScheme::Interior;
    double ridge_lambda = 0.0;
    SolveOptions solve;
};

/// Stacks A(x_i) and dx_i/dt for every i in the window, in index order.
/// Throws TooFewPoints or IndexOutOfRange when the window does not fit.
[[nodiscard]] StackedSystem assemble_from_series(const ParameterLinearModel& model, const TimeSeries& series,
                                                 const EstimationWindow& window,
                                                 DerivativeScheme scheme = DerivativeScheme::Interior);

/// Stacks A(x_i) against caller-supplied derivatives (same row layout as the
/// series).
[[nodiscard]] StackedSystem assemble_with_derivatives(const ParameterLinearModel& model, const TimeSeries& series,
                                                      const Matrix& derivatives, const EstimationWindow& window);

/// One estimate over the whole window; known parameters are passed through.
[[nodiscard]] ParameterEstimate estimate_constant(const ParameterLinearModel& model, const TimeSeries& series,
                                                  const EstimationWindow& window,
                                                  const ParameterPartition& partition,
                                                  const EstimationOptions& options = {});

enum class Attribution { End, Center };

struct TimeVaryingOptions {
    EstimationOptions estimation;
    Attribution attribution = Attribution::End;
    /// With width 1, a rank-deficient per-point system is retried with the
    /// two-sample window ending at the same index.
    bool widen_on_rank_deficiency = true;
};

struct TimeVaryingEstimate {
    std::size_t index = 0;     ///< window end index
    double time = 0.0;         ///< attributed time (window end or centre)
    std::size_t width = 0;     ///< samples actually used
    bool widened = false;
    ParameterEstimate estimate;
};

/// Rolling estimates over windows {i-d+1, ..., i} for every admissible i.
/// With the interior scheme i runs over [d, n-2]; with the full-length scheme
/// over [d-1, n-1]. Throws UnderDetermined when m·d is below the number of
/// unknown parameters.
[[nodiscard]] std::vector<TimeVaryingEstimate> estimate_time_varying(const ParameterLinearModel& model,
                                                                     const TimeSeries& series, std::size_t width,
                                                                     const ParameterPartition& partition,
                                                                     const TimeVaryingOptions& options = {});

struct NoiseSpec {
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

/// x_ij + ε·max_t|x_j(t)|·z_ij with z_ij iid standard normal, drawn row by
/// row from a generator seeded with spec.seed.
[[nodiscard]] TimeSeries add_noise(const TimeSeries& series, const NoiseSpec& spec);

struct ErrorMetrics {
    Vector signed_mre;                 ///< (1/n) Σ (p - p̂) / p, per parameter
    Vector mean_abs_re;                ///< (1/n) Σ |p - p̂| / |p|
    std::vector<std::size_t> skipped;  ///< entries with p = 0, per parameter
};

/// Rows are time points, columns are parameters. Entries with a zero true
/// value are skipped and counted; a column with no usable entries gets NaN.
[[nodiscard]] ErrorMetrics relative_error_metrics(const Matrix& truth, const Matrix& estimates);

/// |ω̂ - ω| / |ω| entry by entry (NaN where ω = 0).
[[nodiscard]] Vector relative_errors(const Vector& truth, const Vector& estimate);

}  // namespace pir
