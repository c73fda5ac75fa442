#include <cmath>

#include "msfa/spectral.hpp"

namespace msfa {

namespace {

double band_mean(std::span<const Sample> x) {
    double s = 0.0;
    for (Sample v : x) s += v;
    return s / static_cast<double>(x.size());
}

}  // namespace

double estimate_rho_d(const SpectralCube& cube) {
    const std::size_t m = cube.plane_size();
    if (m < 2) throw DegenerateStatisticsError("need at least two pixels per band");
    double total = 0.0;
    for (std::size_t n = 0; n < cube.bands(); ++n) {
        const auto x = cube.plane(n);
        const double mean = band_mean(x);
        // Row-major flattening; pairs straddling row ends are kept. The
        // numerator runs over i = 2..M and the denominator over i = 1..M.
        double num = 0.0, den = 0.0;
        double prev = static_cast<double>(x[0]) - mean;
        den += prev * prev;
        for (std::size_t i = 1; i < m; ++i) {
            const double cur = static_cast<double>(x[i]) - mean;
            num += cur * prev;
            den += cur * cur;
            prev = cur;
        }
        if (!(den > 0.0)) {
            throw DegenerateStatisticsError("band " + std::to_string(n + 1) + " has zero variance");
        }
        total += num / den;
    }
    return total / static_cast<double>(cube.bands());
}

double estimate_rho_f(const SpectralCube& cube) {
    const std::size_t bands = cube.bands();
    if (bands < 2) throw DegenerateStatisticsError("need at least two bands to estimate rho_f");
    const std::size_t m = cube.plane_size();
    std::vector<double> means(bands), norms(bands);
    for (std::size_t n = 0; n < bands; ++n) {
        const auto x = cube.plane(n);
        means[n] = band_mean(x);
        double s = 0.0;
        for (Sample v : x) s += (v - means[n]) * (v - means[n]);
        if (!(s > 0.0)) throw DegenerateStatisticsError("band " + std::to_string(n + 1) + " has zero variance");
        norms[n] = std::sqrt(s);
    }
    double total = 0.0;
    for (std::size_t n = 1; n < bands; ++n) {
        const auto a = cube.plane(n);
        const auto b = cube.plane(n - 1);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += (a[i] - means[n]) * (b[i] - means[n - 1]);
        const double rho_b = std::min(1.0, s / (norms[n] * norms[n - 1]));
        if (!(rho_b > 0.0)) {
            throw DomainError("bands " + std::to_string(n) + " and " + std::to_string(n + 1) +
                              " have non-positive correlation " + std::to_string(rho_b) +
                              "; its fractional power is undefined");
        }
        const double gap = cube.wavelengths()[n] - cube.wavelengths()[n - 1];
        total += std::pow(rho_b, 1.0 / gap);
    }
    return total / static_cast<double>(bands - 1);
}

}  // namespace msfa
