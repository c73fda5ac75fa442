#include <cmath>

#include "doctest.h"
#include "msfa/core.hpp"
#include "msfa/datagen.hpp"
#include "msfa/pattern.hpp"
#include "test_util.hpp"

using namespace msfa;

namespace {

double reconstruction_error(const SymmetricMatrix& m, const Eigensystem& e) {
    const std::size_t n = m.order();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += e.vectors[k * n + i] * e.values[k] * e.vectors[k * n + j];
            worst = std::max(worst, std::abs(s - m(i, j)));
        }
    return worst;
}

}  // namespace

TEST_CASE("eigendecomposition of the identity keeps the identity") {
    const Eigensystem e = symmetric_eigendecomposition(SymmetricMatrix::identity(3));
    CHECK(e.values == std::vector<double>{1, 1, 1});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(e.vectors[i * 3 + j] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("2x2 closed form") {
    const Eigensystem e = symmetric_eigendecomposition(SymmetricMatrix::from_rows({{1, 0.5}, {0.5, 1}}));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(e.values[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(e.vectors[0] == doctest::Approx(r));
    CHECK(e.vectors[1] == doctest::Approx(r));
    CHECK(e.vectors[2] == doctest::Approx(r));
    CHECK(e.vectors[3] == doctest::Approx(-r));
}

TEST_CASE("eigenvalues of the 2x2-block model matrix match the Jacobi oracle") {
    // Four bands 10 nm apart on a 2x2 raster block, per-nm model parameters.
    const auto pattern = build_pattern(PatternKind::raster, 2, testutil::spaced_wavelengths(4));
    const double rf = 0.995, rd = 0.95;
    SymmetricMatrix r(4);
    const double pos[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j) {
            const double d = std::hypot(pos[i][0] - pos[j][0], pos[i][1] - pos[j][1]);
            const double f = 10.0 * std::abs(static_cast<double>(i) - static_cast<double>(j));
            r.set(i, j, std::pow(rd, d) * std::pow(rf, f));
        }
    const Eigensystem e = symmetric_eigendecomposition(r);
    const auto [values, rows] = oracle::jacobi(testutil::to_rows(r));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(e.values[i] - values[i]) < 1e-9);
    CHECK(reconstruction_error(r, e) < 1e-9);
}

TEST_CASE("eigendecomposition reconstructs random PSD matrices up to order 32") {
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u, 24u, 32u}) {
        const SymmetricMatrix m = testutil::random_psd(n, static_cast<std::uint32_t>(n));
        const Eigensystem e = symmetric_eigendecomposition(m);
        CHECK(reconstruction_error(m, e) < 1e-9);
        for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i - 1] >= e.values[i]);
        const auto [values, rows] = oracle::jacobi(testutil::to_rows(m));
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(e.values[i] - values[i]) < 1e-9);
        // sign rule: the first entry of largest magnitude is non-negative
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t arg = 0;
            for (std::size_t j = 1; j < n; ++j)
                if (std::abs(e.vectors[k * n + j]) > std::abs(e.vectors[k * n + arg]) + 1e-12) arg = j;
            CHECK(e.vectors[k * n + arg] >= 0.0);
        }
    }
}

TEST_CASE("eigendecomposition is deterministic") {
    const SymmetricMatrix m = testutil::random_psd(16, 7);
    const Eigensystem a = symmetric_eigendecomposition(m);
    const Eigensystem b = symmetric_eigendecomposition(m);
    CHECK(a.values == b.values);
    CHECK(a.vectors == b.vectors);
}

TEST_CASE("non-symmetric input is rejected") {
    CHECK_THROWS_AS(SymmetricMatrix::from_rows({{1, 0.2}, {0.3, 1}}), ValidationError);
    CHECK_THROWS_AS(SymmetricMatrix::from_rows({{1, 0.2}}), ValidationError);
}

TEST_CASE("transforms must be orthonormal") {
    CHECK_THROWS_AS(SpectralTransform(2, {1, 0, 1, 0}, TransformKind::klt), ValidationError);
    const SpectralTransform t = SpectralTransform::identity(4);
    CHECK(t.order() == 4);
    CHECK(t.kind() == TransformKind::identity);
}

TEST_CASE("cube invariants are validated") {
    CHECK_THROWS_AS(SpectralCube(0, 2, 12, {500}), ValidationError);
    CHECK_THROWS_AS(SpectralCube(2, 2, 12, {500, 500}), ValidationError);
    CHECK_THROWS_AS(SpectralCube(2, 2, 12, {510, 500}), ValidationError);
    CHECK_THROWS_AS(SpectralCube(2, 2, 7, {500}), ValidationError);
    CHECK_THROWS_AS(SpectralCube(2, 2, 17, {500}), ValidationError);
    CHECK_THROWS_AS(SpectralCube(2, 2, 8, {500}, {0, 1, 2, 256}), ValidationError);
    CHECK_THROWS_AS(SpectralCube(2, 2, 8, {500}, {0, 1, 2}), ValidationError);
}

TEST_CASE("MSC1 round trips") {
    testutil::TempDir dir;
    SUBCASE("2x2x1 zeros") {
        const SpectralCube cube(2, 2, 12, {500});
        store_cube(cube, dir / "z.msc1");
        const auto bytes = read_file(dir / "z.msc1");
        CHECK(bytes.size() == 4 + 16 + 8 + 4 * 2);
        const SpectralCube back = load_cube(dir / "z.msc1");
        CHECK(back == cube);
        CHECK(back.bands() == 1);
        for (Sample s : back.samples()) CHECK(s == 0);
    }
    SUBCASE("16 bands keep every wavelength") {
        const auto wl = named_wavelengths("fig8");
        const SpectralCube cube = testutil::random_cube(4, 4, wl, 12, 3);
        const SpectralCube back = parse_cube(serialize_cube(cube));
        CHECK(back.wavelengths() == std::vector<double>{424, 448, 469, 482, 500, 517, 535, 554, 566, 584, 602, 622,
                                                        644, 666, 687, 720});
        CHECK(back == cube);
    }
    SUBCASE("33x17x9 generated cube") {
        const SpectralCube cube =
            generate_markov_cube(33, 17, named_wavelengths("fig8-9band"), 12, 0.9, 0.995, 11);
        store_cube(cube, dir / "g.msc1");
        CHECK(load_cube(dir / "g.msc1") == cube);
    }
}

TEST_CASE("malformed MSC1 input is rejected") {
    const SpectralCube cube = testutil::random_cube(3, 2, {500, 510}, 10, 1);
    const auto good = serialize_cube(cube);
    auto bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(parse_cube(bad_magic), FormatError);
    auto truncated = good;
    truncated.pop_back();
    CHECK_THROWS_AS(parse_cube(truncated), FormatError);
    auto trailing = good;
    trailing.push_back(0);
    CHECK_THROWS_AS(parse_cube(trailing), FormatError);
    auto out_of_range = good;
    out_of_range[out_of_range.size() - 1] = 0xFF;  // 10-bit cube, sample 0xFFxx
    CHECK_THROWS_AS(parse_cube(out_of_range), FormatError);
    CHECK_THROWS_AS(load_cube("/nonexistent/dir/cube.msc1"), Error);
}

TEST_CASE("select_bands and crop") {
    const SpectralCube cube = testutil::random_cube(5, 4, {400, 410, 420}, 12, 9);
    const std::size_t keep[] = {0, 2};
    const SpectralCube sub = cube.select_bands(keep);
    CHECK(sub.bands() == 2);
    CHECK(sub.wavelengths() == std::vector<double>{400, 420});
    CHECK(sub.at(1, 3, 4) == cube.at(2, 3, 4));
    const SpectralCube c = cube.crop(4, 2);
    CHECK(c.width() == 4);
    CHECK(c.at(2, 1, 3) == cube.at(2, 1, 3));
}

TEST_CASE("atomic write leaves no temporary behind") {
    testutil::TempDir dir;
    const std::vector<std::uint8_t> data{1, 2, 3};
    write_file_atomic(dir / "f.bin", data);
    CHECK(read_file(dir / "f.bin") == data);
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
    CHECK(files == 1);
}
