#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pir/regression.hpp"

namespace pir {

struct Cylinder {
    double x = 0.0;  ///< centre, same units as the grid spacing
    double y = 0.0;
    double diameter = 1.0;
};

/// Velocity and vorticity snapshots on a regular nx×ny grid. Node (i, j)
/// sits at (i·dx, j·dy); every field matrix is nx×ny.
struct SnapshotStack {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double dx = 1.0;
    double dy = 1.0;
    double dt = 1.0;
    std::vector<Matrix> u;
    std::vector<Matrix> v;
    std::vector<Matrix> w;
    std::optional<Cylinder> cylinder;
    /// RMS of ω - (∂v/∂x - ∂u/∂y) over interior nodes, filled by the loader.
    std::optional<double> curl_rms;

    [[nodiscard]] std::size_t snapshot_count() const noexcept { return w.size(); }

    /// Shapes, spacings and snapshot counts. Throws DimensionMismatch,
    /// InvalidArgument or TooFewPoints.
    void validate() const;
};

/// Inclusive box of grid indices.
struct WakeRegion {
    std::size_t i_min = 0;
    std::size_t i_max = 0;
    std::size_t j_min = 0;
    std::size_t j_max = 0;
};

/// From one diameter behind the cylinder's trailing edge to one diameter
/// before the outflow boundary, |y - y_c| ≤ 2D. Without a cylinder the
/// whole interior.
[[nodiscard]] WakeRegion default_wake_region(const SnapshotStack& stack);

using GridIndex = std::pair<std::size_t, std::size_t>;

struct SensorSet {
    std::vector<GridIndex> positions;
    WakeRegion region;
    std::uint64_t seed = 0;
};

/// Interior nodes of `region` outside the cylinder disk, in (j, i) order.
[[nodiscard]] std::vector<GridIndex> admissible_nodes(const SnapshotStack& stack, const WakeRegion& region);

/// periods / (strouhal · snapshots).
[[nodiscard]] double shedding_time_step(double strouhal, double periods, double snapshots);

/// `count` distinct admissible nodes drawn uniformly. Throws RegionTooSmall.
[[nodiscard]] SensorSet sample_sensors(const SnapshotStack& stack, const WakeRegion& region, std::size_t count,
                                       std::uint64_t seed);

/// One row per sensor and interior snapshot n (sensor-major):
/// matrix = ∇²ω, rhs = ∂ω/∂t + u ∂ω/∂x + v ∂ω/∂y, all by central differences.
[[nodiscard]] StackedSystem assemble_vorticity_system(const SnapshotStack& stack, const SensorSet& sensors);

struct ReynoldsEstimate {
    std::size_t sensor_count = 0;
    double lambda = 0.0;
    double re = 0.0;                 ///< mean of the per-seed Re values
    double inverse_re = 0.0;         ///< 1 / re
    double mean_inverse_re = 0.0;    ///< mean of the per-seed 1/Re values
    double harmonic_re = 0.0;        ///< 1 / mean_inverse_re
    std::vector<double> per_seed_re;
    std::vector<double> per_seed_inverse_re;
};

struct ReynoldsOptions {
    std::vector<std::size_t> sensor_counts{4};
    std::size_t repeats = 20;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    std::size_t threads = 0;  ///< 0 uses the hardware concurrency
};

/// Seed of repeat r for sensor count c, derived from seed_seq{base, c, r}.
[[nodiscard]] std::uint64_t sensor_seed(std::uint64_t base, std::size_t count, std::size_t repeat);

/// For every sensor count, `repeats` independent sensor draws (repeat r for
/// count c uses sensor_seed(seed, c, r)), each solved by ridge regression
/// (λ = 0 is OLS). Throws AllZeroColumn for a degenerate field and
/// NonPhysical when the mean 1/Re is not positive.
[[nodiscard]] std::vector<ReynoldsEstimate> estimate_reynolds(const SnapshotStack& stack, const WakeRegion& region,
                                                              const ReynoldsOptions& options);

/// ω = e^{-2νt} sin(x - u0 t) sin(y - v0 t) with uniform velocity (u0, v0) on
/// [0, π]², t = n·dt. Solves the vorticity transport equation with 1/Re = ν.
[[nodiscard]] SnapshotStack manufactured_diffusion_stack(double nu, std::size_t nx, std::size_t ny,
                                                         std::size_t snapshots, double dt, double u0 = 0.0,
                                                         double v0 = 0.0);

/// RMS of ω - (∂v/∂x - ∂u/∂y) over the interior nodes of every snapshot.
[[nodiscard]] double curl_residual_rms(const SnapshotStack& stack);

}  // namespace pir
