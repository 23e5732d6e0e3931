#include "pir/reynolds.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "pir/differentiation.hpp"
#include "pir/error.hpp"

namespace pir {

namespace {

void check_fields(const std::vector<Matrix>& fields, const char* name, const SnapshotStack& s) {
    if (fields.size() != s.w.size()) {
        throw Error(ErrorKind::DimensionMismatch, std::string(name) + " has " + std::to_string(fields.size()) +
                                                      " snapshots, vorticity has " + std::to_string(s.w.size()));
    }
    for (std::size_t n = 0; n < fields.size(); ++n) {
        if (fields[n].rows() != static_cast<Eigen::Index>(s.nx) ||
            fields[n].cols() != static_cast<Eigen::Index>(s.ny)) {
            throw Error(ErrorKind::DimensionMismatch, std::string(name) + " snapshot " + std::to_string(n) +
                                                          " is not " + std::to_string(s.nx) + "x" +
                                                          std::to_string(s.ny));
        }
    }
}

bool inside_cylinder(const SnapshotStack& s, std::size_t i, std::size_t j) {
    if (!s.cylinder) return false;
    const double x = static_cast<double>(i) * s.dx - s.cylinder->x;
    const double y = static_cast<double>(j) * s.dy - s.cylinder->y;
    const double r = 0.5 * s.cylinder->diameter;
    return x * x + y * y <= r * r;
}

std::size_t clamp_index(double value, std::size_t lo, std::size_t hi) {
    if (value <= static_cast<double>(lo)) return lo;
    if (value >= static_cast<double>(hi)) return hi;
    return static_cast<std::size_t>(value);
}

}  // namespace

void SnapshotStack::validate() const {
    if (nx < 3 || ny < 3) throw Error(ErrorKind::TooFewPoints, "grid must be at least 3x3");
    if (!(dx > 0.0) || !(dy > 0.0) || !(dt > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "dx, dy and dt must be positive");
    }
    if (w.size() < 3) throw Error(ErrorKind::TooFewPoints, "need at least 3 snapshots");
    check_fields(w, "w", *this);
    check_fields(u, "u", *this);
    check_fields(v, "v", *this);
}

WakeRegion default_wake_region(const SnapshotStack& stack) {
    const std::size_t i_hi = stack.nx - 2;
    const std::size_t j_hi = stack.ny - 2;
    if (!stack.cylinder) return {1, i_hi, 1, j_hi};
    const Cylinder& c = *stack.cylinder;
    const double x_start = c.x + 0.5 * c.diameter + c.diameter;
    const double x_end = static_cast<double>(stack.nx - 1) * stack.dx - c.diameter;
    WakeRegion r;
    r.i_min = clamp_index(std::ceil(x_start / stack.dx - 1e-9), 1, i_hi);
    r.i_max = clamp_index(std::floor(x_end / stack.dx + 1e-9), 1, i_hi);
    r.j_min = clamp_index(std::ceil((c.y - 2.0 * c.diameter) / stack.dy - 1e-9), 1, j_hi);
    r.j_max = clamp_index(std::floor((c.y + 2.0 * c.diameter) / stack.dy + 1e-9), 1, j_hi);
    return r;
}

std::vector<GridIndex> admissible_nodes(const SnapshotStack& stack, const WakeRegion& region) {
    std::vector<GridIndex> out;
    if (stack.nx < 3 || stack.ny < 3) return out;
    const std::size_t i_lo = std::max<std::size_t>(region.i_min, 1);
    const std::size_t i_hi = std::min(region.i_max, stack.nx - 2);
    const std::size_t j_lo = std::max<std::size_t>(region.j_min, 1);
    const std::size_t j_hi = std::min(region.j_max, stack.ny - 2);
    for (std::size_t j = j_lo; j <= j_hi; ++j) {
        for (std::size_t i = i_lo; i <= i_hi; ++i) {
            if (!inside_cylinder(stack, i, j)) out.emplace_back(i, j);
        }
    }
    return out;
}

double shedding_time_step(double strouhal, double periods, double snapshots) {
    if (!(strouhal > 0.0) || !(periods > 0.0) || !(snapshots > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "Strouhal number, periods and snapshots must be positive");
    }
    return periods * (1.0 / strouhal) / snapshots;
}

SensorSet sample_sensors(const SnapshotStack& stack, const WakeRegion& region, std::size_t count,
                         std::uint64_t seed) {
    const auto nodes = admissible_nodes(stack, region);
    if (count == 0 || nodes.size() < count) {
        throw Error(ErrorKind::RegionTooSmall, "region has " + std::to_string(nodes.size()) +
                                                   " admissible nodes, " + std::to_string(count) + " requested");
    }
    SensorSet set;
    set.region = region;
    set.seed = seed;
    set.positions.reserve(count);
    std::mt19937_64 rng(seed);
    std::sample(nodes.begin(), nodes.end(), std::back_inserter(set.positions), count, rng);
    return set;
}

StackedSystem assemble_vorticity_system(const SnapshotStack& stack, const SensorSet& sensors) {
    stack.validate();
    for (const auto& [i, j] : sensors.positions) {
        if (i < 1 || j < 1 || i + 2 > stack.nx || j + 2 > stack.ny) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "sensor (" + std::to_string(i) + ", " + std::to_string(j) + ") is not an interior node");
        }
    }
    const std::size_t snapshots = stack.snapshot_count();
    const auto rows = static_cast<Eigen::Index>(sensors.positions.size() * (snapshots - 2));
    StackedSystem out{Matrix(rows, 1), Vector(rows)};
    Eigen::Index row = 0;
    for (const auto& [si, sj] : sensors.positions) {
        const auto i = static_cast<Eigen::Index>(si);
        const auto j = static_cast<Eigen::Index>(sj);
        for (std::size_t n = 1; n + 1 < snapshots; ++n) {
            const Matrix& w = stack.w[n];
            const double dwdt = (stack.w[n + 1](i, j) - stack.w[n - 1](i, j)) / (2.0 * stack.dt);
            const double advection = stack.u[n](i, j) * stencil::ddx(w, i, j, stack.dx) +
                                     stack.v[n](i, j) * stencil::ddy(w, i, j, stack.dy);
            out.matrix(row, 0) = stencil::laplacian(w, i, j, stack.dx, stack.dy);
            out.rhs(row) = dwdt + advection;
            ++row;
        }
    }
    return out;
}

std::uint64_t sensor_seed(std::uint64_t base, std::size_t count, std::size_t repeat) {
    std::seed_seq seq{static_cast<std::uint64_t>(base), static_cast<std::uint64_t>(count),
                      static_cast<std::uint64_t>(repeat)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::vector<ReynoldsEstimate> estimate_reynolds(const SnapshotStack& stack, const WakeRegion& region,
                                                const ReynoldsOptions& options) {
    if (options.repeats < 1) throw Error(ErrorKind::InvalidArgument, "repeats must be at least 1");
    if (options.sensor_counts.empty()) throw Error(ErrorKind::InvalidArgument, "no sensor counts given");
    if (!(options.lambda >= 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda must be nonnegative");
    stack.validate();

    const std::size_t counts = options.sensor_counts.size();
    const std::size_t tasks = counts * options.repeats;
    std::vector<double> inverse(tasks, 0.0);
    std::vector<std::string> failures(tasks);
    std::vector<ErrorKind> failure_kinds(tasks, ErrorKind::InvalidArgument);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1)) {
            const std::size_t c = t / options.repeats;
            const std::size_t r = t % options.repeats;
            const std::size_t count = options.sensor_counts[c];
            try {
                const SensorSet sensors = sample_sensors(stack, region, count, sensor_seed(options.seed, count, r));
                const StackedSystem system = assemble_vorticity_system(stack, sensors);
                if (system.matrix.isZero(0.0)) {
                    throw Error(ErrorKind::AllZeroColumn, "the Laplacian column is identically zero");
                }
                inverse[t] = solve_ridge(system, options.lambda).values(0);
            } catch (const Error& e) {
                failures[t] = e.what();
                failure_kinds[t] = e.kind();
            }
        }
    };
    std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, tasks);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    for (std::size_t t = 0; t < tasks; ++t) {
        if (!failures[t].empty()) throw Error(failure_kinds[t], failures[t]);
    }

    std::vector<ReynoldsEstimate> out;
    for (std::size_t c = 0; c < counts; ++c) {
        ReynoldsEstimate est;
        est.sensor_count = options.sensor_counts[c];
        est.lambda = options.lambda;
        double sum_re = 0.0;
        double sum_inv = 0.0;
        for (std::size_t r = 0; r < options.repeats; ++r) {
            const double inv = inverse[c * options.repeats + r];
            est.per_seed_inverse_re.push_back(inv);
            est.per_seed_re.push_back(1.0 / inv);
            sum_inv += inv;
            sum_re += 1.0 / inv;
        }
        const auto n = static_cast<double>(options.repeats);
        est.mean_inverse_re = sum_inv / n;
        if (!(est.mean_inverse_re > 0.0)) {
            throw Error(ErrorKind::NonPhysical, "mean 1/Re is not positive for " + std::to_string(est.sensor_count) +
                                                    " sensors");
        }
        est.harmonic_re = 1.0 / est.mean_inverse_re;
        est.re = sum_re / n;
        est.inverse_re = 1.0 / est.re;
        out.push_back(std::move(est));
    }
    return out;
}

SnapshotStack manufactured_diffusion_stack(double nu, std::size_t nx, std::size_t ny, std::size_t snapshots,
                                           double dt, double u0, double v0) {
    if (!(nu > 0.0) || !(dt > 0.0) || nx < 3 || ny < 3 || snapshots < 3) {
        throw Error(ErrorKind::InvalidArgument,
                    "manufactured stack needs nu, dt > 0, a grid of at least 3x3 and 3 snapshots");
    }
    SnapshotStack s;
    s.nx = nx;
    s.ny = ny;
    s.dx = std::numbers::pi / static_cast<double>(nx - 1);
    s.dy = std::numbers::pi / static_cast<double>(ny - 1);
    s.dt = dt;
    const auto rows = static_cast<Eigen::Index>(nx);
    const auto cols = static_cast<Eigen::Index>(ny);
    for (std::size_t n = 0; n < snapshots; ++n) {
        const double t = static_cast<double>(n) * dt;
        const double decay = std::exp(-2.0 * nu * t);
        Vector sx(rows);
        Vector sy(cols);
        for (Eigen::Index i = 0; i < rows; ++i) sx(i) = std::sin(static_cast<double>(i) * s.dx - u0 * t);
        for (Eigen::Index j = 0; j < cols; ++j) sy(j) = std::sin(static_cast<double>(j) * s.dy - v0 * t);
        s.w.push_back(decay * sx * sy.transpose());
        s.u.push_back(Matrix::Constant(rows, cols, u0));
        s.v.push_back(Matrix::Constant(rows, cols, v0));
    }
    return s;
}

double curl_residual_rms(const SnapshotStack& stack) {
    stack.validate();
    double sum = 0.0;
    std::size_t count = 0;
    const auto nx = static_cast<Eigen::Index>(stack.nx);
    const auto ny = static_cast<Eigen::Index>(stack.ny);
    for (std::size_t n = 0; n < stack.snapshot_count(); ++n) {
        for (Eigen::Index j = 1; j + 1 < ny; ++j) {
            for (Eigen::Index i = 1; i + 1 < nx; ++i) {
                const double curl = stencil::ddx(stack.v[n], i, j, stack.dx) - stencil::ddy(stack.u[n], i, j, stack.dy);
                const double d = stack.w[n](i, j) - curl;
                sum += d * d;
                ++count;
            }
        }
    }
    return std::sqrt(sum / static_cast<double>(count));
}

}  // namespace pir
