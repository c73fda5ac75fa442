#include <cmath>
#include <random>

#include "doctest.h"
#include "msfa/datagen.hpp"
#include "msfa/spectral.hpp"
#include "test_util.hpp"

using namespace msfa;

namespace {

const MarkovParams kPerNm = MarkovParams::per_nanometre(0.995, 0.95);

double max_off_diagonal(const SymmetricMatrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.order(); ++i)
        for (std::size_t j = 0; j < m.order(); ++j)
            if (i != j) worst = std::max(worst, std::abs(m(i, j)));
    return worst;
}

double oracle_gain(const SymmetricMatrix& r) {
    return -10.0 / static_cast<double>(r.order()) * std::log10(oracle::determinant(testutil::to_rows(r)));
}

}  // namespace

TEST_CASE("sample correlation basics") {
    SpectralCube twin(4, 4, 12, {500, 510});
    for (std::size_t i = 0; i < 16; ++i) twin.plane(0)[i] = twin.plane(1)[i] = static_cast<Sample>(i * i);
    const SymmetricMatrix r = sample_correlation(twin);
    CHECK(r(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

    const SpectralCube noise = testutil::random_cube(100, 100, testutil::spaced_wavelengths(4), 12, 8);
    CHECK(max_off_diagonal(sample_correlation(noise)) < 0.05);

    SpectralCube flat(4, 4, 12, {500, 510});
    for (std::size_t i = 0; i < 16; ++i) flat.plane(0)[i] = static_cast<Sample>(i);
    CHECK_THROWS_AS(sample_correlation(flat), DegenerateStatisticsError);
    CHECK_THROWS_AS(sample_correlation(SpectralCube(1, 1, 12, {500, 510})), DegenerateStatisticsError);
}

TEST_CASE("adjacent-band correlation of a generated cube follows the model") {
    const SpectralCube cube = generate_markov_cube(256, 256, testutil::spaced_wavelengths(6), 12, 0.95, 0.995, 21);
    const SymmetricMatrix r = sample_correlation(cube);
    for (std::size_t n = 1; n < 6; ++n) CHECK(std::abs(r(n, n - 1) - std::pow(0.995, 10)) < 0.02);
}

TEST_CASE("KLT closed forms") {
    const SpectralCube noise = testutil::random_cube(64, 64, testutil::spaced_wavelengths(2), 12, 1);
    SpectralCube twin(16, 16, 12, {500, 510});
    for (std::size_t i = 0; i < 256; ++i)
        twin.plane(0)[i] = twin.plane(1)[i] = static_cast<Sample>((i * 37) % 1000);
    for (auto stat : {KltStatistic::covariance, KltStatistic::correlation}) {
        const SpectralTransform t = klt_from_data(twin, stat);
        CHECK(t.kind() == TransformKind::klt);
        CHECK(t(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(t(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }
    // Independent bands with equal variance: the correlation is diagonal to sampling accuracy.
    const SpectralTransform t = klt_from_data(noise, KltStatistic::correlation);
    CHECK(t.order() == 2);
}

TEST_CASE("KLT decorrelates its training data") {
    const SpectralCube cube = generate_markov_cube(96, 64, named_wavelengths("fig8"), 12, 0.9, 0.995, 4);
    const SpectralTransform t = klt_from_data(cube);
    const TransformedCube tc = apply_transform(cube, t);
    CHECK(max_off_diagonal(sample_correlation(tc.views())) < 1e-6);

    // The first plane carries the largest eigenvalue of the covariance matrix.
    const auto y = tc.plane(0);
    double mean = 0.0, var = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    for (double v : y) var += (v - mean) * (v - mean);
    var /= static_cast<double>(y.size());
    CHECK(var == doctest::Approx(t.eigenvalues()[0]).epsilon(1e-9));

    // Pseudo-MSI training works the same way.
    const PseudoMsi ps = structure_convert(mosaic(cube, named_pattern("raster4x4", cube.wavelengths())));
    const TransformedCube tp = apply_transform(ps, klt_from_data(ps));
    CHECK(max_off_diagonal(sample_correlation(tp.views())) < 1e-6);
}

TEST_CASE("model matrices") {
    const auto pattern = build_pattern(PatternKind::raster, 2, testutil::spaced_wavelengths(4));
    const FilterGeometry g = filter_geometry(pattern);
    const SymmetricMatrix rf = spectral_corr_matrix(g.wavelength_gap, kPerNm);
    const SymmetricMatrix rd = spatial_corr_matrix(g.distance, kPerNm);
    CHECK(rf(0, 1) == doctest::Approx(0.951110).epsilon(1e-6));
    CHECK(rf(0, 0) == 1.0);
    CHECK(rf(0, 2) < rf(0, 1));
    CHECK(rd(0, 1) == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(rd(0, 3) == doctest::Approx(std::pow(0.95, std::sqrt(2.0))).epsilon(1e-12));  // 0.930029
    CHECK(rd(2, 2) == 1.0);
    const SymmetricMatrix rfd = fixed_corr_matrix(pattern, kPerNm);
    CHECK(rfd(0, 1) == doctest::Approx(0.903554).epsilon(1e-6));
    CHECK(rfd == hadamard(rf, rd));

    // The default model counts the spectral exponent in 10 nm steps.
    const SymmetricMatrix coarse = spectral_corr_matrix(g.wavelength_gap, MarkovParams::defaults());
    CHECK(coarse(0, 1) == doctest::Approx(0.995).epsilon(1e-12));

    const SymmetricMatrix ones = fixed_corr_matrix(pattern, MarkovParams::per_nanometre(1 - 1e-12, 1 - 1e-12));
    for (double v : ones.entries()) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Markov parameters are validated") {
    CHECK_THROWS_AS(MarkovParams::per_nanometre(1.0, 0.9).validate(), ValidationError);
    CHECK_THROWS_AS(MarkovParams::per_nanometre(0.9, 0.0).validate(), ValidationError);
    CHECK_THROWS_AS((MarkovParams{0.9, 0.9, 0.0}).validate(), ValidationError);
    CHECK_NOTHROW(MarkovParams::defaults().validate());
}

TEST_CASE("fixed transform") {
    const auto wl = named_wavelengths("fig8");
    const auto pattern = named_pattern("dither4x4", wl);
    const SpectralTransform a = fixed_transform(pattern, MarkovParams::defaults());
    CHECK(a == fixed_transform(pattern, MarkovParams::defaults()));
    CHECK(a.kind() == TransformKind::fixed);

    // Independent of the images it is applied to.
    const SpectralCube c1 = generate_markov_cube(32, 32, wl, 12, 0.9, 0.99, 1);
    const SpectralCube c2 = generate_edge_cube(32, 32, wl, 12, 2);
    const auto p1 = structure_convert(mosaic(c1, pattern));
    const auto p2 = structure_convert(mosaic(c2, pattern));
    CHECK(apply_transform(p1, a).transform == apply_transform(p2, a).transform);

    const auto small = build_pattern(PatternKind::raster, 2, testutil::spaced_wavelengths(4));
    const SpectralTransform near_id = fixed_transform(small, MarkovParams::per_nanometre(1e-12, 1e-12));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(near_id(i, i)) == doctest::Approx(1.0).epsilon(1e-9));

    const SpectralTransform t = fixed_transform(small, kPerNm);
    const auto [values, rows] = oracle::jacobi(testutil::to_rows(fixed_corr_matrix(small, kPerNm)));
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(t.eigenvalues()[k] == doctest::Approx(values[k]).epsilon(1e-9));
        double dot = 0.0;
        for (std::size_t j = 0; j < 4; ++j) dot += t(k, j) * rows[k][j];
        CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("apply and invert") {
    const auto wl = testutil::spaced_wavelengths(9);
    const SpectralCube cube = testutil::random_cube(13, 7, wl, 12, 6);
    const TransformedCube id = apply_transform(cube, SpectralTransform::identity(9));
    for (std::size_t i = 0; i < cube.samples().size(); ++i) CHECK(id.values[i] == cube.samples()[i]);

    const SpectralTransform t = klt_from_data(cube, KltStatistic::correlation);
    const TransformedCube tc = apply_transform(cube, t);
    const auto back = invert_transform(tc);
    double worst = 0.0;
    for (std::size_t i = 0; i < back.size(); ++i) worst = std::max(worst, std::abs(back[i] - cube.samples()[i]));
    CHECK(worst < 1e-6);

    // Per-position energy is preserved.
    const std::size_t ps = cube.plane_size();
    for (std::size_t pos = 0; pos < ps; ++pos) {
        double ex = 0.0, ey = 0.0;
        for (std::size_t b = 0; b < 9; ++b) {
            ex += std::pow(static_cast<double>(cube.plane(b)[pos]), 2);
            ey += std::pow(tc.plane(b)[pos], 2);
        }
        CHECK(std::abs(ex - ey) <= 1e-9 * ex);
    }
    CHECK_THROWS_AS(apply_transform(cube, SpectralTransform::identity(4)), ValidationError);
}

TEST_CASE("coding gain") {
    CHECK(coding_gain(SymmetricMatrix::identity(5)).db == doctest::Approx(0.0));
    const SymmetricMatrix two = SymmetricMatrix::from_rows({{1, 0.903554}, {0.903554, 1}});
    const double expected = 10.0 * std::log10(1.0 / std::sqrt(1.0 - 0.903554 * 0.903554));
    CHECK(coding_gain(two).db == doctest::Approx(expected).epsilon(1e-12));
    CHECK(oracle_gain(two) == doctest::Approx(expected).epsilon(1e-12));

    for (std::uint32_t seed = 1; seed <= 20; ++seed) {
        const SymmetricMatrix r = testutil::to_correlation(testutil::random_psd(2 + seed % 15, seed));
        const CodingGain g = coding_gain(r);
        CHECK(std::abs(g.db - g.det_form_db) < 1e-9);
        CHECK(std::abs(g.db - oracle_gain(r)) < 1e-9);
        CHECK(g.db >= 0.0);
    }
    CHECK_THROWS_AS(coding_gain(SymmetricMatrix::from_rows({{1, 1}, {1, 1}})), SingularMatrixError);
    CHECK_THROWS_AS(coding_gain(SymmetricMatrix::from_rows({{1, 2}, {2, 1}})), SingularMatrixError);
}

TEST_CASE("coding gains of the three 16-band layouts") {
    const auto wl = named_wavelengths("fig8");
    const auto gain = [&](const char* name) {
        return coding_gain(fixed_corr_matrix(named_pattern(name, wl), MarkovParams::defaults())).db;
    };
    const double raster = gain("raster4x4"), zigzag = gain("zigzag4x4"), dither = gain("dither4x4");
    CHECK(std::abs(raster - 9.441) <= 0.02);
    CHECK(std::abs(zigzag - 9.379) <= 0.02);
    CHECK(std::abs(dither - 8.709) <= 0.02);
    CHECK(raster > zigzag);
    CHECK(zigzag > dither);
    // determinant oracle on the same matrix
    CHECK(oracle_gain(fixed_corr_matrix(named_pattern("raster4x4", wl), MarkovParams::defaults())) ==
          doctest::Approx(raster).epsilon(1e-9));
}

TEST_CASE("spatial estimator") {
    const SpectralCube ar = generate_markov_cube(512, 512, testutil::spaced_wavelengths(2), 12, 0.95, 0.995, 1);
    const double rd = estimate_rho_d(ar);
    CHECK(rd >= 0.94);
    CHECK(rd <= 0.96);
    const SpectralCube noise = testutil::random_cube(128, 128, testutil::spaced_wavelengths(3), 12, 2);
    CHECK(std::abs(estimate_rho_d(noise)) <= 0.05);
    CHECK_THROWS_AS(estimate_rho_d(SpectralCube(4, 4, 12, {500})), DegenerateStatisticsError);
}

TEST_CASE("spectral estimator") {
    SpectralCube twin(8, 8, 12, {500, 510});
    for (std::size_t i = 0; i < 64; ++i) twin.plane(0)[i] = twin.plane(1)[i] = static_cast<Sample>(i * 3);
    CHECK(estimate_rho_f(twin) == doctest::Approx(1.0));

    SpectralCube opposed(8, 8, 12, {500, 510});
    for (std::size_t i = 0; i < 64; ++i) {
        opposed.plane(0)[i] = static_cast<Sample>(i);
        opposed.plane(1)[i] = static_cast<Sample>(100 - i);
    }
    CHECK_THROWS_AS(estimate_rho_f(opposed), DomainError);
    CHECK_THROWS_AS(estimate_rho_f(SpectralCube(4, 4, 12, {500})), DegenerateStatisticsError);

    const SpectralCube cube = generate_markov_cube(256, 256, testutil::spaced_wavelengths(16), 12, 0.95, 0.995, 3);
    const double rf = estimate_rho_f(cube);
    CHECK(rf >= 0.990);
    CHECK(rf <= 0.999);

    // Real-image procedure on synthetic stand-ins lands in (0.9, 1).
    const SpectralCube edges = generate_edge_cube(128, 128, named_wavelengths("ricefield16"), 12, 5);
    const double re = estimate_rho_f(edges);
    CHECK(re > 0.9);
    CHECK(re < 1.0);
}

TEST_CASE("model comparison") {
    const SymmetricMatrix model = fixed_corr_matrix(named_pattern("raster4x4", named_wavelengths("fig8")), kPerNm);
    const CorrelationComparison same = compare_correlations(model, model);
    CHECK(same.mse == 0.0);
    CHECK(same.pearson == doctest::Approx(1.0));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    SymmetricMatrix noisy = model;
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = i; j < 16; ++j) noisy.set(i, j, model(i, j) + u(rng));
    CHECK(compare_correlations(noisy, model).mse <= 1e-4);

    const auto wl = named_wavelengths("fig8");
    const auto pattern = named_pattern("raster4x4", wl);
    const SpectralCube cube = generate_markov_cube(256, 256, wl, 12, 0.95, 0.995, 9);
    const PseudoMsi ps = structure_convert(mosaic(cube, pattern));
    const ModelValidation v = validate_model(ps, kPerNm);
    CHECK(v.correlation.pearson > 0.9);
    CHECK(v.covariance_mse >= 0.0);
}

TEST_CASE("transform JSON round trip") {
    testutil::TempDir dir;
    const SpectralTransform t = fixed_transform(named_pattern("zigzag4x4", named_wavelengths("fig8")),
                                                MarkovParams::defaults());
    store_transform(t, dir / "t.json", MarkovParams::defaults());
    CHECK(load_transform(dir / "t.json") == t);
    CHECK(transform_from_json(transform_to_json(t)) == t);
    CHECK_THROWS_AS(transform_from_json("{\"order\": 2, \"rows\": [1, 0, 1, 0], \"kind\": \"klt\"}"), Error);
}
