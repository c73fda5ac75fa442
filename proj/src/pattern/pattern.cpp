#include <algorithm>
#include <cmath>
#include <map>

#include "msfa/pattern.hpp"

namespace msfa {

namespace {

std::vector<int> raster_grid(std::size_t b) {
    std::vector<int> g(b * b);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<int>(i + 1);
    return g;
}

std::vector<int> serpentine_grid(std::size_t b) {
    std::vector<int> g(b * b);
    int next = 1;
    for (std::size_t r = 0; r < b; ++r) {
        for (std::size_t k = 0; k < b; ++k) {
            const std::size_t c = r % 2 == 0 ? k : b - 1 - k;
            g[r * b + c] = next++;
        }
    }
    return g;
}

// Anti-diagonal scan starting at (0,0) then (0,1), (1,0), (2,0), (1,1), ...
std::vector<int> zigzag_grid(std::size_t b) {
    std::vector<int> g(b * b);
    int next = 1;
    const int n = static_cast<int>(b);
    for (int s = 0; s <= 2 * n - 2; ++s) {
        const int lo = std::max(0, s - n + 1);
        const int hi = std::min(s, n - 1);
        if (s % 2 == 1) {
            for (int r = lo; r <= hi; ++r) g[r * n + (s - r)] = next++;
        } else {
            for (int r = hi; r >= lo; --r) g[r * n + (s - r)] = next++;
        }
    }
    return g;
}

std::vector<int> dither_grid(std::size_t b) {
    switch (b) {
        case 2: return {1, 3, 4, 2};
        case 3: return {1, 8, 4, 7, 6, 3, 5, 2, 9};
        case 4: return {1, 9, 3, 11, 13, 5, 15, 7, 4, 12, 2, 10, 16, 8, 14, 6};
        default: break;
    }
    throw ValidationError("dither pattern needs block size 2, 3 or 4");
}

const std::map<std::string, std::vector<double>>& wavelength_sets() {
    static const std::map<std::string, std::vector<double>> sets = {
        {"fig8",
         {424, 448, 469, 482, 500, 517, 535, 554, 566, 584, 602, 622, 644, 666, 687, 720}},
        {"fig8-9band", {424, 469, 500, 535, 566, 584, 622, 666, 720}},
        {"ricefield16",
         {545, 550, 556, 661, 665, 670, 675, 680, 725, 730, 735, 791, 796, 801, 805, 810}},
    };
    return sets;
}

}  // namespace

std::string to_string(PatternKind kind) {
    switch (kind) {
        case PatternKind::raster: return "raster";
        case PatternKind::zigzag: return "zigzag";
        case PatternKind::serpentine: return "serpentine";
        case PatternKind::dither: return "dither";
        case PatternKind::bayer: return "bayer";
        case PatternKind::custom: return "custom";
    }
    return "custom";
}

PatternKind pattern_kind_from_string(const std::string& name) {
    for (auto k : {PatternKind::raster, PatternKind::zigzag, PatternKind::serpentine,
                   PatternKind::dither, PatternKind::bayer, PatternKind::custom}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("unknown pattern kind '" + name + "'");
}

MsfaPattern::MsfaPattern(PatternKind kind, std::size_t block_size, std::vector<int> assignment,
                         std::vector<double> wavelengths)
    : kind_(kind), block_(block_size), assignment_(std::move(assignment)), wavelengths_(std::move(wavelengths)) {
    if (block_ == 0) throw ValidationError("pattern block size must be positive");
    if (assignment_.size() != block_ * block_) {
        throw ValidationError("pattern assignment must have block_size^2 entries");
    }
    const std::size_t n = wavelengths_.size();
    if (n == 0 || n > block_ * block_) {
        throw ValidationError("pattern band count must be in [1, block_size^2]");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(wavelengths_[i] > wavelengths_[i - 1])) {
            throw ValidationError("pattern wavelengths must be strictly increasing");
        }
    }
    std::vector<int> seen(n, 0);
    for (int a : assignment_) {
        if (a < 1 || static_cast<std::size_t>(a) > n) {
            throw ValidationError("pattern band index " + std::to_string(a) + " outside [1, " +
                                  std::to_string(n) + "]");
        }
        ++seen[static_cast<std::size_t>(a - 1)];
    }
    for (std::size_t b = 0; b < n; ++b) {
        if (seen[b] == 0) throw ValidationError("band " + std::to_string(b + 1) + " missing from pattern");
    }
    for (std::size_t band = 0; band < n; ++band)
        for (std::size_t r = 0; r < block_; ++r)
            for (std::size_t c = 0; c < block_; ++c)
                if (band_at(r, c) == band) sites_.push_back({band, r, c});
}

MsfaPattern build_pattern(PatternKind kind, std::size_t block_size, std::vector<double> wavelengths) {
    if (kind == PatternKind::bayer) {
        if (block_size != 2 || wavelengths.size() != 3) {
            throw ValidationError("bayer pattern needs block size 2 and three wavelengths");
        }
        // GRBG with bands ordered by wavelength: 1 = B, 2 = G, 3 = R.
        return MsfaPattern(kind, 2, {2, 3, 1, 2}, std::move(wavelengths));
    }
    if (block_size < 2 || block_size > 4) {
        throw ValidationError("unsupported block size " + std::to_string(block_size) + " for " +
                              to_string(kind) + " pattern");
    }
    if (wavelengths.size() != block_size * block_size) {
        throw ValidationError(to_string(kind) + " pattern with block size " + std::to_string(block_size) +
                              " needs " + std::to_string(block_size * block_size) + " wavelengths, got " +
                              std::to_string(wavelengths.size()));
    }
    std::vector<int> grid;
    switch (kind) {
        case PatternKind::raster: grid = raster_grid(block_size); break;
        case PatternKind::zigzag: grid = zigzag_grid(block_size); break;
        case PatternKind::serpentine: grid = serpentine_grid(block_size); break;
        case PatternKind::dither: grid = dither_grid(block_size); break;
        default: throw ValidationError("pattern kind '" + to_string(kind) + "' cannot be built by name");
    }
    return MsfaPattern(kind, block_size, std::move(grid), std::move(wavelengths));
}

MsfaPattern named_pattern(const std::string& name, std::vector<double> wavelengths) {
    if (name == "bayer") return build_pattern(PatternKind::bayer, 2, std::move(wavelengths));
    const auto x = name.find('x');
    if (x == std::string::npos || x < 2 || x + 2 != name.size() || name[x - 1] != name[x + 1]) {
        throw ValidationError("unknown pattern name '" + name + "'");
    }
    const char digit = name[x - 1];
    if (digit < '2' || digit > '4') throw ValidationError("unknown pattern name '" + name + "'");
    const auto kind = pattern_kind_from_string(name.substr(0, x - 1));
    return build_pattern(kind, static_cast<std::size_t>(digit - '0'), std::move(wavelengths));
}

std::vector<double> named_wavelengths(const std::string& name) {
    const auto& sets = wavelength_sets();
    const auto it = sets.find(name);
    if (it == sets.end()) throw ValidationError("unknown wavelength set '" + name + "'");
    return it->second;
}

std::vector<std::string> wavelength_set_names() {
    std::vector<std::string> out;
    for (const auto& [name, _] : wavelength_sets()) out.push_back(name);
    return out;
}

MosaickedImage mosaic(const SpectralCube& cube, const MsfaPattern& pattern) {
    if (cube.bands() != pattern.bands()) {
        throw ValidationError("cube has " + std::to_string(cube.bands()) + " bands but pattern has " +
                              std::to_string(pattern.bands()));
    }
    for (std::size_t n = 0; n < cube.bands(); ++n) {
        if (std::abs(cube.wavelengths()[n] - pattern.wavelengths()[n]) > 1e-9) {
            throw ValidationError("cube and pattern wavelengths differ at band " + std::to_string(n + 1));
        }
    }
    const std::size_t b = pattern.block_size();
    const std::size_t w = cube.width() / b * b;
    const std::size_t h = cube.height() / b * b;
    if (w == 0 || h == 0) throw ValidationError("cube is smaller than one pattern block");

    MosaickedImage out{w, h, cube.bit_depth(), std::vector<Sample>(w * h), pattern};
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) out.samples[r * w + c] = cube.at(pattern.band_at(r, c), r, c);
    return out;
}

PseudoMsi structure_convert(const MosaickedImage& image) {
    const std::size_t b = image.pattern.block_size();
    if (b == 0 || image.width % b != 0 || image.height % b != 0) {
        throw ValidationError("mosaic dimensions must be multiples of the pattern block size");
    }
    PseudoMsi out;
    out.plane_width = image.width / b;
    out.plane_height = image.height / b;
    out.bit_depth = image.bit_depth;
    out.pattern = image.pattern;
    out.samples.resize(image.samples.size());
    const auto& sites = image.pattern.sites();
    for (std::size_t p = 0; p < sites.size(); ++p) {
        Sample* dst = out.samples.data() + p * out.plane_size();
        for (std::size_t i = 0; i < out.plane_height; ++i)
            for (std::size_t j = 0; j < out.plane_width; ++j)
                dst[i * out.plane_width + j] = image.at(i * b + sites[p].row, j * b + sites[p].col);
    }
    return out;
}

MosaickedImage inverse_convert(const PseudoMsi& pseudo) {
    const std::size_t b = pseudo.pattern.block_size();
    if (pseudo.samples.size() != pseudo.plane_size() * pseudo.plane_count()) {
        throw ValidationError("pseudo-MSI sample count does not match its pattern");
    }
    MosaickedImage out{pseudo.plane_width * b, pseudo.plane_height * b, pseudo.bit_depth,
                       std::vector<Sample>(pseudo.samples.size()), pseudo.pattern};
    const auto& sites = pseudo.pattern.sites();
    for (std::size_t p = 0; p < sites.size(); ++p) {
        const Sample* src = pseudo.samples.data() + p * pseudo.plane_size();
        for (std::size_t i = 0; i < pseudo.plane_height; ++i)
            for (std::size_t j = 0; j < pseudo.plane_width; ++j)
                out.samples[(i * b + sites[p].row) * out.width + j * b + sites[p].col] =
                    src[i * pseudo.plane_width + j];
    }
    return out;
}

SpectralCube PseudoMsi::as_cube() const {
    if (!pattern.single_occurrence()) {
        throw ValidationError("pseudo-MSI of a multi-occurrence pattern is not a spectral cube");
    }
    return SpectralCube(plane_width, plane_height, bit_depth, pattern.wavelengths(), samples);
}

std::string to_string(DistanceConvention convention) {
    return convention == DistanceConvention::periodic ? "periodic" : "within-block";
}

DistanceConvention distance_convention_from_string(const std::string& name) {
    if (name == "within-block") return DistanceConvention::within_block;
    if (name == "periodic") return DistanceConvention::periodic;
    throw ValidationError("unknown distance convention '" + name + "'");
}

namespace {

double site_distance(const FilterSite& a, const FilterSite& b, std::size_t block,
                     DistanceConvention convention) {
    const double dr0 = static_cast<double>(a.row) - static_cast<double>(b.row);
    const double dc0 = static_cast<double>(a.col) - static_cast<double>(b.col);
    if (convention == DistanceConvention::within_block) return std::hypot(dr0, dc0);
    double best = std::hypot(dr0, dc0);
    const double bs = static_cast<double>(block);
    for (int ty = -1; ty <= 1; ++ty)
        for (int tx = -1; tx <= 1; ++tx) best = std::min(best, std::hypot(dr0 + ty * bs, dc0 + tx * bs));
    return best;
}

}  // namespace

FilterGeometry plane_geometry(const MsfaPattern& pattern, DistanceConvention convention) {
    const auto& sites = pattern.sites();
    const std::size_t n = sites.size();
    SymmetricMatrix d(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d.set(i, j, site_distance(sites[i], sites[j], pattern.block_size(), convention));
            f.set(i, j, std::abs(pattern.wavelengths()[sites[i].band] - pattern.wavelengths()[sites[j].band]));
        }
    }
    return {d, f};
}

FilterGeometry filter_geometry(const MsfaPattern& pattern, DistanceConvention convention) {
    const std::size_t n = pattern.bands();
    SymmetricMatrix d(n), f(n);
    const auto& sites = pattern.sites();
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t k = m + 1; k < n; ++k) {
            double best = INFINITY;
            for (const auto& a : sites) {
                if (a.band != m) continue;
                for (const auto& b : sites)
                    if (b.band == k) best = std::min(best, site_distance(a, b, pattern.block_size(), convention));
            }
            d.set(m, k, best);
            f.set(m, k, std::abs(pattern.wavelengths()[m] - pattern.wavelengths()[k]));
        }
    }
    return {d, f};
}

}  // namespace msfa
