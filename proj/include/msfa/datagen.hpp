#pragma once

#include <cstdint>
#include <vector>

#include "msfa/core.hpp"

namespace msfa {

// SplitMix64. Stream k of seed s starts from state s ^ (0xD1B54A32D192ED03 * (k + 1)).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t k) {
        return SplitMix64(seed ^ (0xD1B54A32D192ED03ull * (k + 1)));
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // Uniform in (0, 1].
    double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

// Standard normals by Box-Muller; both outputs of each pair are used.
class GaussianSource {
public:
    explicit GaussianSource(SplitMix64 rng) : rng_(rng) {}
    double next();

private:
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Gaussian field with lag correlation rho_d along rows and columns and
// correlation rho_f ^ |lambda_m - lambda_n| (rho_f per nanometre) between
// bands, mapped affinely onto [0.1, 0.9] of the sample range and rounded.
SpectralCube generate_markov_cube(std::size_t width, std::size_t height, std::vector<double> wavelengths,
                                  int bit_depth, double rho_d, double rho_f, std::uint64_t seed);

struct EdgeScene {
    SpectralCube cube;
    std::vector<std::uint32_t> labels;  // region index per pixel
    std::size_t regions = 0;
};

// Voronoi regions, each with its own smooth reflectance spectrum and a mild
// illumination gradient, plus a little sensor noise.
EdgeScene generate_edge_scene(std::size_t width, std::size_t height, std::vector<double> wavelengths,
                              int bit_depth, std::uint64_t seed);
SpectralCube generate_edge_cube(std::size_t width, std::size_t height, std::vector<double> wavelengths,
                                int bit_depth, std::uint64_t seed);

}  // namespace msfa
