#include <algorithm>
#include <cmath>

#include "msfa/codec.hpp"

namespace msfa {

IntGrid quantize(const RealGrid& coefficients, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("quantiser step must be positive");
    IntGrid q(coefficients.width, coefficients.height);
    const double limit = static_cast<double>(kMaxMagnitude - 1);
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const double c = coefficients.values[i];
        const double m = std::min(std::floor(std::abs(c) / step), limit);
        const auto mag = static_cast<std::int64_t>(m);
        q.values[i] = c < 0.0 ? -mag : mag;
    }
    return q;
}

RealGrid dequantize(const IntGrid& q, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("quantiser step must be positive");
    RealGrid c(q.width, q.height);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const std::int64_t v = q.values[i];
        if (v == 0) continue;
        const double mag = (static_cast<double>(v < 0 ? -v : v) + 0.5) * step;
        c.values[i] = v < 0 ? -mag : mag;
    }
    return c;
}

}  // namespace msfa
