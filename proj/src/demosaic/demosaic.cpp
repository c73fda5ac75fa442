#include "msfa/demosaic.hpp"

#include <algorithm>
#include <cmath>

#include "msfa/parallel.hpp"

namespace msfa {

std::string to_string(DemosaicMethod method) {
    return method == DemosaicMethod::bilinear ? "bilinear" : "banddiff";
}

DemosaicMethod demosaic_method_from_string(const std::string& name) {
    if (name == "bilinear") return DemosaicMethod::bilinear;
    if (name == "banddiff" || name == "band-difference") return DemosaicMethod::band_difference;
    throw ValidationError("unknown demosaicking method '" + name + "' (bilinear, banddiff)");
}

std::size_t default_reference_band(const MsfaPattern& pattern) { return (pattern.bands() - 1) / 2; }

namespace {

// Lattice neighbours and weight of full-resolution coordinate x for a lattice
// starting at `offset` with period `period` and `count` lines.
struct Tap {
    std::size_t k0;
    std::size_t k1;
    double t;
};

std::vector<Tap> taps(std::size_t length, std::size_t offset, std::size_t period, std::size_t count) {
    std::vector<Tap> out(length);
    for (std::size_t x = 0; x < length; ++x) {
        const double u = (static_cast<double>(x) - static_cast<double>(offset)) / static_cast<double>(period);
        if (u <= 0.0) {
            out[x] = {0, 0, 0.0};
        } else if (u >= static_cast<double>(count - 1)) {
            out[x] = {count - 1, count - 1, 0.0};
        } else {
            const auto k0 = static_cast<std::size_t>(std::floor(u));
            out[x] = {k0, k0 + 1, u - static_cast<double>(k0)};
        }
    }
    return out;
}

// Bilinear interpolation of one site's lattice values (lw x lh, row-major)
// onto the full grid, accumulated into `acc`.
void accumulate_site(std::span<const double> lattice, std::size_t lw, std::size_t lh, const FilterSite& site,
                     std::size_t block, std::size_t width, std::size_t height, std::vector<double>& acc) {
    const auto tx = taps(width, site.col, block, lw);
    const auto ty = taps(height, site.row, block, lh);
    std::vector<double> row0(width), row1(width);
    auto interp_row = [&](std::size_t k, std::vector<double>& out) {
        const double* v = lattice.data() + k * lw;
        for (std::size_t c = 0; c < width; ++c) out[c] = v[tx[c].k0] + tx[c].t * (v[tx[c].k1] - v[tx[c].k0]);
    };
    std::size_t cached0 = lh, cached1 = lh;
    for (std::size_t r = 0; r < height; ++r) {
        const Tap& t = ty[r];
        if (cached0 != t.k0) {
            interp_row(t.k0, row0);
            cached0 = t.k0;
        }
        if (cached1 != t.k1) {
            interp_row(t.k1, row1);
            cached1 = t.k1;
        }
        double* out = acc.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) out[c] += row0[c] + t.t * (row1[c] - row0[c]);
    }
}

// Full-resolution real-valued estimate of one band from per-site lattice values.
// `value(r, c)` supplies the sparse sample at a mosaic position of this band.
template <typename F>
std::vector<double> interpolate_band(const MosaickedImage& m, std::size_t band, F value) {
    const std::size_t block = m.pattern.block_size();
    const std::size_t lw = m.width / block, lh = m.height / block;
    std::vector<double> acc(m.width * m.height, 0.0);
    std::vector<double> lattice(lw * lh);
    std::size_t sites = 0;
    for (const FilterSite& s : m.pattern.sites()) {
        if (s.band != band) continue;
        for (std::size_t i = 0; i < lh; ++i)
            for (std::size_t j = 0; j < lw; ++j) lattice[i * lw + j] = value(s.row + i * block, s.col + j * block);
        accumulate_site(lattice, lw, lh, s, block, m.width, m.height, acc);
        ++sites;
    }
    const double inv = 1.0 / static_cast<double>(sites);
    for (double& v : acc) v *= inv;
    return acc;
}

Sample to_sample(double v, Sample max) {
    const double r = v < 0.0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5);
    return static_cast<Sample>(std::clamp(r, 0.0, static_cast<double>(max)));
}

void check_mosaic(const MosaickedImage& m) {
    const std::size_t b = m.pattern.block_size();
    if (b == 0 || m.width == 0 || m.height == 0 || m.width % b != 0 || m.height % b != 0) {
        throw ValidationError("mosaic dimensions must be non-zero multiples of the block size");
    }
    if (m.samples.size() != m.width * m.height) throw ValidationError("mosaic sample count mismatch");
}

// Writes `estimate` into band n of the cube, keeping known samples exact.
void store_band(SpectralCube& cube, const MosaickedImage& m, std::size_t n, const std::vector<double>& estimate) {
    auto plane = cube.plane(n);
    const Sample max = cube.max_value();
    for (std::size_t r = 0; r < m.height; ++r) {
        for (std::size_t c = 0; c < m.width; ++c) {
            const std::size_t i = r * m.width + c;
            plane[i] = m.pattern.band_at(r, c) == n ? m.samples[i] : to_sample(estimate[i], max);
        }
    }
}

}  // namespace

SpectralCube demosaic_bilinear(const MosaickedImage& m) {
    check_mosaic(m);
    SpectralCube cube(m.width, m.height, m.bit_depth, m.pattern.wavelengths());
    parallel_for(m.pattern.bands(), [&](std::size_t n) {
        const auto est = interpolate_band(m, n, [&](std::size_t r, std::size_t c) {
            return static_cast<double>(m.at(r, c));
        });
        store_band(cube, m, n, est);
    });
    return cube;
}

SpectralCube demosaic_band_difference(const MosaickedImage& m, std::size_t reference_band) {
    check_mosaic(m);
    if (reference_band >= m.pattern.bands()) {
        throw ValidationError("reference band " + std::to_string(reference_band) + " out of range for " +
                              std::to_string(m.pattern.bands()) + " bands");
    }
    SpectralCube cube(m.width, m.height, m.bit_depth, m.pattern.wavelengths());
    const auto ref = interpolate_band(m, reference_band, [&](std::size_t r, std::size_t c) {
        return static_cast<double>(m.at(r, c));
    });
    parallel_for(m.pattern.bands(), [&](std::size_t n) {
        if (n == reference_band) {
            store_band(cube, m, n, ref);
            return;
        }
        auto est = interpolate_band(m, n, [&](std::size_t r, std::size_t c) {
            return static_cast<double>(m.at(r, c)) - ref[r * m.width + c];
        });
        for (std::size_t i = 0; i < est.size(); ++i) est[i] += ref[i];
        store_band(cube, m, n, est);
    });
    return cube;
}

SpectralCube demosaic(const MosaickedImage& m, DemosaicMethod method, std::size_t reference_band) {
    return method == DemosaicMethod::bilinear ? demosaic_bilinear(m) : demosaic_band_difference(m, reference_band);
}

}  // namespace msfa
