#include <array>
#include <limits>
#include <tuple>
#include <cmath>
#include <random>

#include "doctest.h"
#include "msfa/codec.hpp"
#include "msfa/datagen.hpp"
#include "test_util.hpp"

using namespace msfa;

namespace {

RealGrid random_plane(std::size_t w, std::size_t h, std::uint32_t seed, double scale = 1000.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    RealGrid g(w, h);
    for (auto& v : g.values) v = u(rng);
    return g;
}

double max_abs_diff(const RealGrid& a, const RealGrid& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    return worst;
}

// Reassembles the Mallat buffer from a SubbandSet for comparison with the oracle.
std::vector<double> mallat(const SubbandSet& s) {
    std::vector<double> out(s.width * s.height);
    const auto layout = subband_layout(s.width, s.height, s.levels);
    std::size_t w = s.width, h = s.height;
    std::vector<std::pair<std::size_t, std::size_t>> level_size;
    for (int l = 0; l < s.levels; ++l) {
        level_size.emplace_back(w, h);
        w = (w + 1) / 2;
        h = (h + 1) / 2;
    }
    for (std::size_t i = 0; i < layout.size(); ++i) {
        const SubbandInfo& info = layout[i];
        std::size_t x0 = 0, y0 = 0;
        if (info.orientation != Orientation::ll) {
            const auto [lw, lh] = level_size[static_cast<std::size_t>(info.level - 1)];
            if (info.orientation == Orientation::hl || info.orientation == Orientation::hh) x0 = (lw + 1) / 2;
            if (info.orientation == Orientation::lh || info.orientation == Orientation::hh) y0 = (lh + 1) / 2;
        }
        for (std::size_t r = 0; r < info.height; ++r)
            for (std::size_t c = 0; c < info.width; ++c) out[(y0 + r) * s.width + x0 + c] = s.bands[i].at(r, c);
    }
    return out;
}

IntGrid random_ints(std::mt19937& rng, std::size_t w, std::size_t h, double density, std::int64_t max) {
    IntGrid g(w, h);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> mag(1, max);
    for (auto& v : g.values)
        if (u(rng) < density) v = (u(rng) < 0.5 ? -1 : 1) * mag(rng);
    return g;
}

StreamHeader header_for(std::size_t w, std::size_t h, std::size_t planes, int levels) {
    StreamHeader hd;
    hd.mode = CodingMode::eai;
    hd.width = static_cast<std::uint32_t>(w);
    hd.height = static_cast<std::uint32_t>(h);
    hd.bands = static_cast<std::uint32_t>(planes);
    hd.bit_depth = 12;
    std::vector<int> assignment{1, 2, 3, 4};
    hd.pattern = MsfaPattern(PatternKind::raster, 2, assignment, testutil::spaced_wavelengths(4));
    hd.transform = SpectralTransform::identity(planes);
    hd.plane_count = static_cast<std::uint32_t>(planes);
    hd.plane_width = static_cast<std::uint32_t>(w);
    hd.plane_height = static_cast<std::uint32_t>(h);
    hd.levels = static_cast<std::uint8_t>(levels);
    return hd;
}

std::vector<RealGrid> cube_planes(const SpectralCube& cube) {
    std::vector<RealGrid> out;
    for (std::size_t b = 0; b < cube.bands(); ++b) {
        RealGrid g(cube.width(), cube.height());
        for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = cube.plane(b)[i];
        out.push_back(std::move(g));
    }
    return out;
}

double mse(const std::vector<RealGrid>& a, const std::vector<RealGrid>& b) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < a.size(); ++p)
        for (std::size_t i = 0; i < a[p].values.size(); ++i, ++n) s += std::pow(a[p].values[i] - b[p].values[i], 2);
    return s / static_cast<double>(n);
}

}  // namespace

TEST_CASE("subband layout") {
    const auto l = subband_layout(37, 29, 3);
    REQUIRE(l.size() == 10);
    CHECK(l[0].orientation == Orientation::ll);
    CHECK(l[0].width == 5);   // 37 -> 19 -> 10 -> 5
    CHECK(l[0].height == 4);  // 29 -> 15 -> 8 -> 4
    CHECK(l[1].orientation == Orientation::hl);
    CHECK(l[1].level == 3);
    CHECK(l[1].width == 5);  // high half of 10
    CHECK(l[9].orientation == Orientation::hh);
    CHECK(l[9].width == 18);
    CHECK(l[9].height == 14);
    std::size_t total = 0;
    for (const auto& s : l) total += s.width * s.height;
    CHECK(total == 37 * 29);
    CHECK_THROWS_AS(subband_layout(8, 8, 0), ValidationError);
}

TEST_CASE("forward DWT matches the convolution oracle") {
    for (auto [w, h, levels] : {std::tuple{16, 16, 1}, {37, 29, 3}, {64, 48, 4}, {9, 33, 2}, {5, 5, 3}}) {
        const RealGrid plane = random_plane(static_cast<std::size_t>(w), static_cast<std::size_t>(h),
                                            static_cast<std::uint32_t>(w * h));
        const auto got = mallat(dwt_forward(plane, levels));
        const auto want = oracle::cdf97_analysis_2d(plane.values, static_cast<std::size_t>(w),
                                                    static_cast<std::size_t>(h), levels);
        double worst = 0.0;
        for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("DWT of a constant plane") {
    for (int levels = 1; levels <= 4; ++levels) {
        const RealGrid plane(64, 64, 7.0);
        const SubbandSet s = dwt_forward(plane, levels);
        for (double v : s.bands[0].values) CHECK(v == doctest::Approx(7.0 * std::pow(2.0, levels)).epsilon(1e-9));
        for (std::size_t b = 1; b < s.bands.size(); ++b)
            for (double v : s.bands[b].values) CHECK(std::abs(v) < 1e-9);
    }
}

TEST_CASE("DWT reconstructs a random 37x29 plane and an impulse") {
    const RealGrid plane = random_plane(37, 29, 1);
    CHECK(max_abs_diff(dwt_inverse(dwt_forward(plane, 3)), plane) < 1e-6);
    RealGrid impulse(32, 32);
    impulse.at(13, 17) = 1.0;
    CHECK(max_abs_diff(dwt_inverse(dwt_forward(impulse, 4)), impulse) < 1e-6);
    CHECK_THROWS_AS(dwt_forward(plane, 0), ValidationError);
}

TEST_CASE("DWT perfect reconstruction over all sizes up to 64") {
    double worst = 0.0;
    for (std::size_t w = 1; w <= 64; ++w)
        for (std::size_t h = 1; h <= 64; ++h) {
            const RealGrid plane = random_plane(w, h, static_cast<std::uint32_t>(w * 131 + h), 100.0);
            for (int levels = 1; levels <= 5; ++levels)
                worst = std::max(worst, max_abs_diff(dwt_inverse(dwt_forward(plane, levels)), plane));
        }
    CHECK(worst < 1e-6);
}

TEST_CASE("synthesis norms") {
    const auto n = subband_synthesis_norms(5);
    CHECK(n.size() == 16);
    for (double v : n) {
        CHECK(v > 0.5);
        CHECK(v < 2.0);
    }
}

TEST_CASE("dead-zone quantiser") {
    RealGrid c(3, 1);
    c.values = {0.9, 2.3, -2.3};
    const IntGrid q = quantize(c, 1.0);
    CHECK(q.values == std::vector<std::int64_t>{0, 2, -2});
    const RealGrid d = dequantize(q, 1.0);
    CHECK(d.values == std::vector<double>{0.0, 2.5, -2.5});

    const RealGrid r = random_plane(64, 64, 3, 50.0);
    for (double step : {0.1, 1.0, 7.5}) {
        const RealGrid back = dequantize(quantize(r, step), step);
        for (std::size_t i = 0; i < r.values.size(); ++i) CHECK(std::abs(back.values[i] - r.values[i]) <= step);
    }
}

TEST_CASE("entropy coder edge cases") {
    CHECK(entropy_encode(IntGrid(0, 0)).empty());
    CHECK(entropy_encode(IntGrid(0, 5)).empty());
    CHECK(entropy_decode({}, 0, 0).size() == 0);
    const std::vector<std::uint8_t> junk{1, 2};
    CHECK_THROWS_AS(entropy_decode(junk, 0, 0), FormatError);

    for (std::size_t side : {1u, 8u, 64u, 256u}) CHECK(entropy_encode(IntGrid(side, side)).size() <= 8);

    IntGrid huge(2, 1);
    huge.values[0] = kMaxMagnitude;
    CHECK_THROWS_AS(entropy_encode(huge), ValidationError);
    huge.values[0] = -(kMaxMagnitude - 1);
    CHECK(entropy_decode(entropy_encode(huge), 2, 1) == huge);
}

TEST_CASE("entropy coder round trips random grids") {
    std::mt19937 rng(2024);
    int failures = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t w = 1 + rng() % 24, h = 1 + rng() % 24;
        const double density = std::array{0.0, 0.05, 0.3, 1.0}[trial % 4];
        const std::int64_t max = std::array<std::int64_t, 4>{1, 15, 4000, std::int64_t{1} << 40}[(trial / 4) % 4];
        const IntGrid g = random_ints(rng, w, h, density, max);
        if (entropy_decode(entropy_encode(g), w, h) != g) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("entropy decoder rejects damaged input") {
    std::mt19937 rng(5);
    const IntGrid g = random_ints(rng, 32, 32, 0.5, 1000);
    const auto bytes = entropy_encode(g);
    REQUIRE(bytes.size() > 4);
    CHECK_THROWS_AS(entropy_decode(std::span(bytes).first(bytes.size() / 2), 32, 32), FormatError);
    auto bad = bytes;
    bad[0] = 61;  // more bitplanes than the coder supports
    CHECK_THROWS_AS(entropy_decode(bad, 32, 32), FormatError);
    try {
        entropy_decode(std::span(bytes).first(3), 32, 32);
        FAIL("truncated payload decoded");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
}

TEST_CASE("rate control") {
    const SpectralCube cube = generate_markov_cube(256, 256, testutil::spaced_wavelengths(4), 12, 0.95, 0.995, 2);
    const auto planes = cube_planes(cube);
    const StreamHeader hd = header_for(256, 256, 4, 5);
    const double samples = 256.0 * 256 * 4;

    double previous_mse = std::numeric_limits<double>::infinity();
    for (double rate : {0.05, 0.1, 0.25, 0.5, 1.0, 2.0}) {
        const CodedStream s = encode_stream(planes, hd, rate);
        const double achieved = static_cast<double>(s.bytes.size()) * 8.0 / samples;
        CHECK(std::abs(achieved - rate) <= 0.02 * rate);
        const double e = mse(decode_stream(s.bytes).planes, planes);
        CHECK(e <= previous_mse);
        previous_mse = e;
    }

    const CodedStream high = encode_stream(planes, hd, 16.0);
    const double e = mse(decode_stream(high.bytes).planes, planes);
    CHECK(10.0 * std::log10(4095.0 * 4095.0 / e) > 60.0);

    CHECK_THROWS_AS(encode_stream(planes, hd, 0.001), InfeasibleRateError);
}

TEST_CASE("container round trip of a small cube") {
    const SpectralCube cube = testutil::random_cube(16, 16, testutil::spaced_wavelengths(4), 12, 12);
    const auto planes = cube_planes(cube);
    const CodedStream s = encode_stream(planes, header_for(16, 16, 4, 2), 24.0);
    const DecodedStream d = decode_stream(s.bytes);
    for (std::size_t p = 0; p < 4; ++p) CHECK(max_abs_diff(d.planes[p], planes[p]) <= 0.5);
    CHECK(d.header.pattern == s.header.pattern);
    CHECK(d.header.transform == s.header.transform);
    CHECK(d.header.lambda == s.header.lambda);
}

TEST_CASE("container is deterministic and self-describing") {
    const SpectralCube cube = generate_markov_cube(64, 64, testutil::spaced_wavelengths(4), 12, 0.9, 0.99, 3);
    const auto planes = cube_planes(cube);
    StreamHeader hd = header_for(64, 64, 4, 3);
    hd.mode = CodingMode::ebi_fixed;
    hd.markov = MarkovParams::defaults();
    const CodedStream a = encode_stream(planes, hd, 1.0);
    const CodedStream b = encode_stream(planes, hd, 1.0);
    CHECK(a.bytes == b.bytes);

    const StreamHeader h = read_header(a.bytes);
    CHECK(h.mode == CodingMode::ebi_fixed);
    CHECK(h.pattern.assignment() == std::vector<int>{1, 2, 3, 4});
    CHECK(h.markov == MarkovParams::defaults());
    CHECK(header_size(h) < a.bytes.size());
    // the header alone parses even without any payload
    CHECK_NOTHROW(read_header(std::span(a.bytes).first(header_size(h))));
}

TEST_CASE("container rejects corrupt streams") {
    const SpectralCube cube = testutil::random_cube(32, 32, testutil::spaced_wavelengths(4), 12, 4);
    const CodedStream s = encode_stream(cube_planes(cube), header_for(32, 32, 4, 2), 2.0);
    const auto& good = s.bytes;

    auto magic = good;
    magic[0] = 'X';
    CHECK_THROWS_AS(decode_stream(magic), FormatError);
    auto version = good;
    version[4] = 9;
    CHECK_THROWS_AS(decode_stream(version), FormatError);
    CHECK_THROWS_AS(decode_stream(std::span(good).first(good.size() - 1)), FormatError);
    auto trailing = good;
    trailing.push_back(0);
    CHECK_THROWS_AS(decode_stream(trailing), FormatError);
    CHECK_THROWS_AS(decode_stream(std::span(good).first(10)), FormatError);
    auto mode = good;
    mode[6] = 42;
    CHECK_THROWS_AS(decode_stream(mode), FormatError);

    // Flipping payload bytes must either decode or fail with FormatError, never crash.
    std::mt19937 rng(1);
    const std::size_t payload = header_size(s.header);
    for (int i = 0; i < 200; ++i) {
        auto damaged = good;
        damaged[payload + rng() % (good.size() - payload)] ^= static_cast<std::uint8_t>(1 + rng() % 255);
        try {
            decode_stream(damaged);
        } catch (const FormatError&) {
        }
    }
}
