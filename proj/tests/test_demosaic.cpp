#include <cmath>
#include <random>

#include "doctest.h"
#include "msfa/demosaic.hpp"
#include "msfa/pipeline.hpp"
#include "test_util.hpp"

using namespace msfa;

namespace {

MosaickedImage random_mosaic(const MsfaPattern& p, std::size_t blocks_w, std::size_t blocks_h, std::uint32_t seed) {
    std::mt19937 rng(seed);
    const std::size_t w = blocks_w * p.block_size(), h = blocks_h * p.block_size();
    MosaickedImage m{w, h, 12, std::vector<Sample>(w * h), p};
    for (auto& s : m.samples) s = static_cast<Sample>(rng() % 4096);
    return m;
}

void check_known_positions(const MosaickedImage& m, const SpectralCube& out) {
    for (std::size_t r = 0; r < m.height; ++r)
        for (std::size_t c = 0; c < m.width; ++c) REQUIRE(out.at(m.pattern.band_at(r, c), r, c) == m.at(r, c));
}

}  // namespace

TEST_CASE("constant mosaics stay constant") {
    for (const char* name : {"raster4x4", "dither3x3", "bayer"}) {
        const auto wl = std::string(name) == "bayer"       ? std::vector<double>{450, 550, 650}
                        : std::string(name).ends_with("3x3") ? named_wavelengths("fig8-9band")
                                                             : named_wavelengths("fig8");
        const auto p = named_pattern(name, wl);
        MosaickedImage m{p.block_size() * 5, p.block_size() * 3, 12, {}, p};
        m.samples.assign(m.width * m.height, 1234);
        for (const SpectralCube& out : {demosaic_bilinear(m), demosaic_band_difference(m, default_reference_band(p))})
            for (Sample s : out.samples()) CHECK(s == 1234);
    }
}

TEST_CASE("bilinear interpolation reproduces an affine ramp") {
    const auto p = build_pattern(PatternKind::raster, 2, testutil::spaced_wavelengths(4));
    SpectralCube cube(16, 12, 12, p.wavelengths());
    for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t r = 0; r < 12; ++r)
            for (std::size_t c = 0; c < 16; ++c) cube.at(b, r, c) = static_cast<Sample>(100 + 6 * r + 10 * c + 50 * b);
    const SpectralCube out = demosaic_bilinear(mosaic(cube, p));
    // band 1 sits on even rows and columns; inside its last lattice line the ramp is exact
    for (std::size_t r = 0; r <= 10; ++r)
        for (std::size_t c = 0; c <= 14; ++c) CHECK(out.at(0, r, c) == cube.at(0, r, c));
}

TEST_CASE("known samples are reproduced exactly") {
    const auto wl = named_wavelengths("fig8");
    for (const char* name : {"raster4x4", "zigzag4x4", "dither4x4"}) {
        const auto m = random_mosaic(named_pattern(name, wl), 6, 5, 3);
        check_known_positions(m, demosaic_bilinear(m));
        for (std::size_t ref : {0u, 7u, 15u}) check_known_positions(m, demosaic_band_difference(m, ref));
    }
    const auto bayer = random_mosaic(named_pattern("bayer", {450, 550, 650}), 7, 4, 8);
    check_known_positions(bayer, demosaic_bilinear(bayer));
    check_known_positions(bayer, demosaic_band_difference(bayer, 1));
}

TEST_CASE("outputs stay in range") {
    const auto m = random_mosaic(named_pattern("dither4x4", named_wavelengths("fig8")), 4, 4, 11);
    for (const SpectralCube& out : {demosaic_bilinear(m), demosaic_band_difference(m, 7)}) {
        CHECK_NOTHROW(out.check_range());
        CHECK(out.bit_depth() == 12);
        CHECK(out.wavelengths() == m.pattern.wavelengths());
    }
}

TEST_CASE("identical affine bands are recovered exactly") {
    // Exact recovery needs content that bilinear interpolation reproduces:
    // an affine field, checked one block inside the hull of every lattice so
    // that no border extension enters the band differences.
    const auto wl = named_wavelengths("fig8");
    SpectralCube cube(48, 40, 12, wl);
    for (std::size_t b = 0; b < 16; ++b)
        for (std::size_t r = 0; r < 40; ++r)
            for (std::size_t c = 0; c < 48; ++c) cube.at(b, r, c) = static_cast<Sample>(200 + 12 * r + 20 * c);
    for (const char* name : {"raster4x4", "dither4x4"}) {
        const auto m = mosaic(cube, named_pattern(name, wl));
        const SpectralCube bil = demosaic_bilinear(m);
        for (std::size_t ref : {0u, 7u, 12u}) {
            const SpectralCube diff = demosaic_band_difference(m, ref);
            for (std::size_t b = 0; b < 16; ++b)
                for (std::size_t r = 7; r <= 32; ++r)
                    for (std::size_t c = 7; c <= 40; ++c) {
                        CHECK(diff.at(b, r, c) == cube.at(b, r, c));
                        CHECK(diff.at(b, r, c) == bil.at(b, r, c));
                    }
        }
    }
}

TEST_CASE("band differences do not lose to plain bilinear on smooth content") {
    const auto wl = named_wavelengths("fig8");
    SpectralCube cube(64, 64, 12, wl);
    for (std::size_t b = 0; b < 16; ++b)
        for (std::size_t r = 0; r < 64; ++r)
            for (std::size_t c = 0; c < 64; ++c) {
                const double v = 1500 + 600 * std::sin(0.09 * static_cast<double>(r) + 0.05 * static_cast<double>(c)) +
                                 20.0 * static_cast<double>(b);
                cube.at(b, r, c) = static_cast<Sample>(std::lround(v));
            }
    for (const char* name : {"raster4x4", "dither4x4"}) {
        const auto m = mosaic(cube, named_pattern(name, wl));
        const double bil = psnr(cube, demosaic_bilinear(m));
        const double diff = psnr(cube, demosaic_band_difference(m, 7));
        CHECK(diff >= bil - 0.5);
    }
}

TEST_CASE("reference band is validated") {
    const auto m = random_mosaic(named_pattern("raster4x4", named_wavelengths("fig8")), 2, 2, 1);
    CHECK_THROWS_AS(demosaic_band_difference(m, 16), ValidationError);
    CHECK(default_reference_band(m.pattern) == 7);
    CHECK(default_reference_band(named_pattern("dither3x3", named_wavelengths("fig8-9band"))) == 4);
}

TEST_CASE("method names") {
    CHECK(demosaic_method_from_string("bilinear") == DemosaicMethod::bilinear);
    CHECK(demosaic_method_from_string("banddiff") == DemosaicMethod::band_difference);
    CHECK(demosaic_method_from_string(to_string(DemosaicMethod::band_difference)) == DemosaicMethod::band_difference);
    CHECK_THROWS_AS(demosaic_method_from_string("brauers"), ValidationError);
}

TEST_CASE("rounding is half away from zero and clamped") {
    CHECK(round_sample(2.5, 4095) == 3);
    CHECK(round_sample(2.4999, 4095) == 2);
    CHECK(round_sample(-0.4, 4095) == 0);
    CHECK(round_sample(-3.0, 4095) == 0);
    CHECK(round_sample(4095.4, 4095) == 4095);
    CHECK(round_sample(5000.0, 4095) == 4095);
}
