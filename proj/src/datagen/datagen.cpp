#include "msfa/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "msfa/parallel.hpp"

namespace msfa {

double GaussianSource::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = rng_.uniform();
    const double u2 = rng_.uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

namespace {

void check_dims(std::size_t width, std::size_t height, const std::vector<double>& wavelengths) {
    if (width == 0 || height == 0 || wavelengths.empty()) throw ValidationError("cube dimensions must be non-zero");
}

// Unit-variance separable AR(1) field: white noise filtered along rows,
// then along columns, each started in its stationary state.
std::vector<double> ar_field(std::size_t width, std::size_t height, double rho, GaussianSource& g) {
    std::vector<double> f(width * height);
    for (double& v : f) v = g.next();
    const double innov = std::sqrt(1.0 - rho * rho);
    for (std::size_t r = 0; r < height; ++r) {
        double* row = f.data() + r * width;
        for (std::size_t c = 1; c < width; ++c) row[c] = rho * row[c - 1] + innov * row[c];
    }
    for (std::size_t r = 1; r < height; ++r) {
        double* row = f.data() + r * width;
        const double* above = row - width;
        for (std::size_t c = 0; c < width; ++c) row[c] = rho * above[c] + innov * row[c];
    }
    return f;
}

// Global affine map of all values onto [0.1, 0.9] * peak, rounded.
SpectralCube quantise(std::size_t width, std::size_t height, std::vector<double> wavelengths, int bit_depth,
                      const std::vector<double>& values) {
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it, hi = *hi_it;
    const double peak = static_cast<double>((1u << bit_depth) - 1u);
    const double scale = hi > lo ? 0.8 * peak / (hi - lo) : 0.0;
    std::vector<Sample> samples(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = hi > lo ? 0.1 * peak + (values[i] - lo) * scale : 0.5 * peak;
        samples[i] = static_cast<Sample>(std::lround(v));
    }
    return SpectralCube(width, height, bit_depth, std::move(wavelengths), std::move(samples));
}

}  // namespace

SpectralCube generate_markov_cube(std::size_t width, std::size_t height, std::vector<double> wavelengths,
                                  int bit_depth, double rho_d, double rho_f, std::uint64_t seed) {
    check_dims(width, height, wavelengths);
    if (!(rho_d > 0.0 && rho_d < 1.0)) throw ValidationError("rho_d must lie in (0, 1)");
    if (!(rho_f > 0.0 && rho_f < 1.0)) throw ValidationError("rho_f must lie in (0, 1)");
    // Validates the wavelengths before any work is done.
    SpectralCube probe(1, 1, bit_depth, wavelengths);

    const std::size_t bands = wavelengths.size();
    const std::size_t m = width * height;
    std::vector<std::vector<double>> fresh(bands);
    parallel_for(bands, [&](std::size_t n) {
        GaussianSource g(SplitMix64::stream(seed, n));
        fresh[n] = ar_field(width, height, rho_d, g);
    });

    // AR(1) chain across bands: x_n = a x_{n-1} + sqrt(1 - a^2) e_n, a = rho_f^gap.
    std::vector<double> values(bands * m);
    std::copy(fresh[0].begin(), fresh[0].end(), values.begin());
    for (std::size_t n = 1; n < bands; ++n) {
        const double a = std::pow(rho_f, wavelengths[n] - wavelengths[n - 1]);
        const double b = std::sqrt(1.0 - a * a);
        const double* prev = values.data() + (n - 1) * m;
        double* cur = values.data() + n * m;
        for (std::size_t i = 0; i < m; ++i) cur[i] = a * prev[i] + b * fresh[n][i];
    }
    return quantise(width, height, std::move(wavelengths), bit_depth, values);
}

EdgeScene generate_edge_scene(std::size_t width, std::size_t height, std::vector<double> wavelengths,
                              int bit_depth, std::uint64_t seed) {
    check_dims(width, height, wavelengths);
    SpectralCube probe(1, 1, bit_depth, wavelengths);
    const std::size_t bands = wavelengths.size();
    const std::size_t m = width * height;

    SplitMix64 layout_rng = SplitMix64::stream(seed, 0);
    const std::size_t regions = std::clamp<std::size_t>(m / 2048, 2, 48);
    struct Region {
        double row, col;
        double grad_r, grad_c;
        std::vector<double> spectrum;
    };
    std::vector<Region> seeds(regions);
    GaussianSource spectra(SplitMix64::stream(seed, 1));
    for (std::size_t k = 0; k < regions; ++k) {
        Region& reg = seeds[k];
        reg.row = layout_rng.uniform() * static_cast<double>(height);
        reg.col = layout_rng.uniform() * static_cast<double>(width);
        reg.grad_r = 0.4 * (layout_rng.uniform() - 0.5);
        reg.grad_c = 0.4 * (layout_rng.uniform() - 0.5);
        // Reflectance drifts slowly with wavelength: AR(1) with 0.998 per nm.
        reg.spectrum.resize(bands);
        double x = spectra.next();
        reg.spectrum[0] = 0.5 + 0.15 * x;
        for (std::size_t n = 1; n < bands; ++n) {
            const double a = std::pow(0.998, wavelengths[n] - wavelengths[n - 1]);
            x = a * x + std::sqrt(1.0 - a * a) * spectra.next();
            reg.spectrum[n] = 0.5 + 0.15 * x;
        }
    }
    // The first two seeds sit in opposite halves so at least two regions survive.
    if (width >= 2) {
        seeds[0].col = 0.25 * static_cast<double>(width);
        seeds[1].col = 0.75 * static_cast<double>(width);
    } else {
        seeds[0].row = 0.25 * static_cast<double>(height);
        seeds[1].row = 0.75 * static_cast<double>(height);
    }

    EdgeScene scene;
    scene.labels.resize(m);
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            std::uint32_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < regions; ++k) {
                const double dr = static_cast<double>(r) + 0.5 - seeds[k].row;
                const double dc = static_cast<double>(c) + 0.5 - seeds[k].col;
                const double d = dr * dr + dc * dc;
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<std::uint32_t>(k);
                }
            }
            scene.labels[r * width + c] = best;
        }
    }
    std::vector<std::uint8_t> used(regions, 0);
    for (auto l : scene.labels) used[l] = 1;
    scene.regions = static_cast<std::size_t>(std::count(used.begin(), used.end(), 1));

    std::vector<double> values(bands * m);
    parallel_for(bands, [&](std::size_t n) {
        GaussianSource noise(SplitMix64::stream(seed, 2 + n));
        double* plane = values.data() + n * m;
        for (std::size_t r = 0; r < height; ++r) {
            for (std::size_t c = 0; c < width; ++c) {
                const Region& reg = seeds[scene.labels[r * width + c]];
                const double shade = 1.0 + reg.grad_r * static_cast<double>(r) / static_cast<double>(height) +
                                     reg.grad_c * static_cast<double>(c) / static_cast<double>(width);
                plane[r * width + c] = reg.spectrum[n] * shade + 0.004 * noise.next();
            }
        }
    });
    scene.cube = quantise(width, height, std::move(wavelengths), bit_depth, values);
    return scene;
}

SpectralCube generate_edge_cube(std::size_t width, std::size_t height, std::vector<double> wavelengths,
                                int bit_depth, std::uint64_t seed) {
    return generate_edge_scene(width, height, std::move(wavelengths), bit_depth, seed).cube;
}

}  // namespace msfa
