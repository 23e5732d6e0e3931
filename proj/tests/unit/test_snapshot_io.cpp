#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "pir/snapshot_io.hpp"
#include "test_support.hpp"

using namespace pir;
using pir::testing::expect_error;
using pir::testing::Gen;

namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    [[nodiscard]] std::string str() const { return path_.string(); }
    [[nodiscard]] fs::path path() const { return path_; }

private:
    fs::path path_;
};

SnapshotStack random_stack(Gen& g, std::size_t nx, std::size_t ny, std::size_t snapshots) {
    SnapshotStack s;
    s.nx = nx;
    s.ny = ny;
    s.dx = g.uniform(0.01, 1.0);
    s.dy = g.uniform(0.01, 1.0);
    s.dt = g.uniform(0.01, 1.0);
    const auto r = static_cast<Eigen::Index>(nx), c = static_cast<Eigen::Index>(ny);
    for (std::size_t n = 0; n < snapshots; ++n) {
        s.u.push_back(g.matrix(r, c));
        s.v.push_back(g.matrix(r, c));
        s.w.push_back(g.matrix(r, c));
    }
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

}  // namespace

TEST(SnapshotIo, RoundTripIsBitExact) {
    TempDir dir("pir_snapshot_roundtrip");
    Gen g(91);
    auto stack = random_stack(g, 3, 3, 3);
    stack.cylinder = Cylinder{0.1, 0.2, 0.05};
    const auto manifest = write_snapshot_stack(dir.str(), stack);
    const auto back = load_snapshot_stack(manifest);
    EXPECT_EQ(back.nx, 3u);
    EXPECT_EQ(back.dx, stack.dx);
    EXPECT_EQ(back.dt, stack.dt);
    ASSERT_TRUE(back.cylinder.has_value());
    EXPECT_EQ(back.cylinder->diameter, 0.05);
    for (std::size_t n = 0; n < 3; ++n) {
        EXPECT_EQ(back.u[n], stack.u[n]);
        EXPECT_EQ(back.v[n], stack.v[n]);
        EXPECT_EQ(back.w[n], stack.w[n]);
    }
    EXPECT_TRUE(back.curl_rms.has_value());
}

TEST(SnapshotIo, XIsTheFastestIndex) {
    TempDir dir("pir_snapshot_layout");
    SnapshotStack s;
    s.nx = 4;
    s.ny = 3;
    for (int n = 0; n < 3; ++n) {
        Matrix m(4, 3);
        for (int j = 0; j < 3; ++j) {
            for (int i = 0; i < 4; ++i) m(i, j) = 100 * n + 10 * j + i;
        }
        s.u.push_back(m);
        s.v.push_back(m);
        s.w.push_back(m);
    }
    (void)write_snapshot_stack(dir.str(), s);
    std::ifstream in(dir.path() / "w_0001.bin", std::ios::binary);
    double first[5];
    in.read(reinterpret_cast<char*>(first), sizeof first);
    EXPECT_EQ(first[0], 100.0);
    EXPECT_EQ(first[1], 101.0);
    EXPECT_EQ(first[4], 110.0);
}

TEST(SnapshotIo, Errors) {
    TempDir dir("pir_snapshot_errors");
    Gen g(92);
    const auto manifest = write_snapshot_stack(dir.str(), random_stack(g, 4, 3, 3));

    fs::resize_file(dir.path() / "v_0002.bin", 4 * 3 * 8 - 8);
    expect_error(ErrorKind::DimensionMismatch, [&] { (void)load_snapshot_stack(manifest); });
    fs::remove(dir.path() / "v_0002.bin");
    expect_error(ErrorKind::MissingField, [&] { (void)load_snapshot_stack(manifest); });

    write_text(dir.path() / "no_dt.txt", "nx=4\nny=3\ndx=1\ndy=1\nn_snapshots=3\n");
    expect_error(ErrorKind::MissingField, [&] { (void)load_snapshot_stack((dir.path() / "no_dt.txt").string()); });
    write_text(dir.path() / "bad.txt", "nx=4\nny 3\n");
    expect_error(ErrorKind::ParseError, [&] { (void)load_snapshot_stack((dir.path() / "bad.txt").string()); });
    write_text(dir.path() / "frac.txt", "nx=4.5\nny=3\ndx=1\ndy=1\ndt=1\nn_snapshots=3\n");
    expect_error(ErrorKind::ParseError, [&] { (void)load_snapshot_stack((dir.path() / "frac.txt").string()); });
    expect_error(ErrorKind::MissingField, [&] { (void)load_snapshot_stack((dir.path() / "absent.txt").string()); });
}

TEST(SnapshotIo, ColumnTextConversion) {
    TempDir dir("pir_snapshot_convert");
    ColumnTextLayout layout;
    layout.nx = 4;
    layout.ny = 3;
    layout.dx = layout.dy = 0.5;
    layout.dt = 0.25;
    layout.cylinder = Cylinder{0.5, 0.5, 0.2};
    // Three snapshots; value = 100 * snapshot + cell index.
    std::string text;
    for (int cell = 0; cell < 12; ++cell) {
        text += std::to_string(cell) + " " + std::to_string(100 + cell) + " " + std::to_string(200 + cell) + "\n";
    }
    for (const char* name : {"u.txt", "v.txt", "w.txt"}) write_text(dir.path() / name, text);
    const auto manifest = convert_column_text((dir.path() / "u.txt").string(), (dir.path() / "v.txt").string(),
                                              (dir.path() / "w.txt").string(), layout, (dir.path() / "out").string());
    const auto stack = load_snapshot_stack(manifest);
    EXPECT_EQ(stack.snapshot_count(), 3u);
    EXPECT_EQ(stack.w[2](1, 0), 201.0);
    EXPECT_EQ(stack.w[1](0, 1), 104.0);
    EXPECT_EQ(stack.dt, 0.25);
    ASSERT_TRUE(stack.cylinder.has_value());

    write_text(dir.path() / "short.txt", "1 2 3\n");
    expect_error(ErrorKind::DimensionMismatch, [&] {
        (void)convert_column_text((dir.path() / "short.txt").string(), (dir.path() / "v.txt").string(),
                                  (dir.path() / "w.txt").string(), layout, (dir.path() / "out2").string());
    });
}

TEST(SnapshotIoProperties, RandomStacksRoundTrip) {
    TempDir dir("pir_snapshot_property");
    Gen g(93);
    for (int trial = 0; trial < 5; ++trial) {
        const auto stack = random_stack(g, static_cast<std::size_t>(g.integer(3, 12)),
                                        static_cast<std::size_t>(g.integer(3, 12)), static_cast<std::size_t>(g.integer(3, 6)));
        const auto back = load_snapshot_stack(write_snapshot_stack((dir.path() / std::to_string(trial)).string(), stack));
        EXPECT_EQ(back.snapshot_count(), stack.snapshot_count());
        for (std::size_t n = 0; n < stack.snapshot_count(); ++n) EXPECT_EQ(back.w[n], stack.w[n]);
        EXPECT_EQ(*back.curl_rms, curl_residual_rms(stack));
    }
}
