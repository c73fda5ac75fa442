#include <algorithm>

#include "msfa/parallel.hpp"
#include "msfa/spectral.hpp"

namespace msfa {

namespace {

SpectralTransform transform_from_matrix(const SymmetricMatrix& m, TransformKind kind) {
    auto eig = symmetric_eigendecomposition(m);
    return SpectralTransform(m.order(), std::move(eig.vectors), kind, std::move(eig.values));
}

}  // namespace

SpectralTransform klt_from_data(const PlaneViews<Sample>& planes, KltStatistic statistic) {
    const auto m = statistic == KltStatistic::covariance ? sample_covariance(planes) : sample_correlation(planes);
    if (statistic == KltStatistic::covariance) {
        for (std::size_t b = 0; b < m.order(); ++b) {
            if (!(m(b, b) > 0.0)) {
                throw DegenerateStatisticsError("band " + std::to_string(b + 1) + " has zero variance");
            }
        }
    }
    return transform_from_matrix(m, TransformKind::klt);
}

SpectralTransform klt_from_data(const SpectralCube& cube, KltStatistic statistic) {
    return klt_from_data(planes_of(cube), statistic);
}

SpectralTransform klt_from_data(const PseudoMsi& pseudo, KltStatistic statistic) {
    return klt_from_data(planes_of(pseudo), statistic);
}

SpectralTransform fixed_transform(const MsfaPattern& pattern, const MarkovParams& p,
                                  DistanceConvention convention) {
    return transform_from_matrix(fixed_corr_matrix(pattern, p, convention), TransformKind::fixed);
}

PlaneViews<double> TransformedCube::views() const {
    PlaneViews<double> out;
    for (std::size_t p = 0; p < planes(); ++p) out.push_back(plane(p));
    return out;
}

TransformedCube apply_transform(const PlaneViews<Sample>& planes, std::size_t width, std::size_t height,
                                const SpectralTransform& t) {
    if (planes.size() != t.order()) {
        throw ValidationError("transform order " + std::to_string(t.order()) + " does not match " +
                              std::to_string(planes.size()) + " planes");
    }
    const std::size_t n = t.order();
    const std::size_t count = width * height;
    for (const auto& p : planes)
        if (p.size() != count) throw ValidationError("plane size does not match geometry");

    TransformedCube out{width, height, std::vector<double>(n * count), t};
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t chunk) {
        std::vector<double> x(n), y(n);
        const std::size_t end = std::min(count, (chunk + 1) * kChunk);
        for (std::size_t i = chunk * kChunk; i < end; ++i) {
            for (std::size_t b = 0; b < n; ++b) x[b] = static_cast<double>(planes[b][i]);
            t.forward(x, y);
            for (std::size_t b = 0; b < n; ++b) out.values[b * count + i] = y[b];
        }
    });
    return out;
}

TransformedCube apply_transform(const SpectralCube& cube, const SpectralTransform& t) {
    return apply_transform(planes_of(cube), cube.width(), cube.height(), t);
}

TransformedCube apply_transform(const PseudoMsi& pseudo, const SpectralTransform& t) {
    return apply_transform(planes_of(pseudo), pseudo.plane_width, pseudo.plane_height, t);
}

std::vector<double> invert_transform(const TransformedCube& tc) {
    const std::size_t n = tc.planes();
    const std::size_t count = tc.plane_size();
    if (tc.values.size() != n * count) throw ValidationError("transformed cube size mismatch");
    std::vector<double> out(n * count);
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t chunk) {
        std::vector<double> x(n), y(n);
        const std::size_t end = std::min(count, (chunk + 1) * kChunk);
        for (std::size_t i = chunk * kChunk; i < end; ++i) {
            for (std::size_t b = 0; b < n; ++b) y[b] = tc.values[b * count + i];
            tc.transform.inverse(y, x);
            for (std::size_t b = 0; b < n; ++b) out[b * count + i] = x[b];
        }
    });
    return out;
}

}  // namespace msfa
