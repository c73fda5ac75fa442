#include <algorithm>
#include <cmath>
#include <limits>

#include "msfa/pipeline.hpp"

namespace msfa {

double psnr(const SpectralCube& reference, const SpectralCube& test) {
    if (reference.width() != test.width() || reference.height() != test.height() ||
        reference.bands() != test.bands()) {
        throw ValidationError("PSNR needs cubes of equal dimensions");
    }
    if (reference.bit_depth() != test.bit_depth()) throw ValidationError("PSNR needs cubes of equal bit depth");
    const auto a = reference.samples();
    const auto b = test.samples();
    double sse = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(a.size());
    const double peak = static_cast<double>(reference.max_value());
    return 10.0 * std::log10(peak * peak / mse);
}

Sample round_sample(double v, Sample max) {
    const double r = v < 0.0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5);
    return static_cast<Sample>(std::clamp(r, 0.0, static_cast<double>(max)));
}

}  // namespace msfa
