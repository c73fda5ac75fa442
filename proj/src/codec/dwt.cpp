#include <cmath>
#include <map>
#include <mutex>

#include "msfa/codec.hpp"

namespace msfa {

namespace {

const double kLowScale = std::sqrt(2.0) / Cdf97::k;
const double kHighScale = Cdf97::k / std::sqrt(2.0);

inline std::size_t mirror(std::ptrdiff_t i, std::size_t n) {
    if (i < 0) return static_cast<std::size_t>(-i);
    if (static_cast<std::size_t>(i) >= n) return 2 * (n - 1) - static_cast<std::size_t>(i);
    return static_cast<std::size_t>(i);
}

// One lifting pass over indices of the given parity.
inline void lift(double* x, std::size_t n, std::size_t parity, double coeff) {
    for (std::size_t i = parity; i < n; i += 2) {
        const auto si = static_cast<std::ptrdiff_t>(i);
        x[i] += coeff * (x[mirror(si - 1, n)] + x[mirror(si + 1, n)]);
    }
}

void forward_1d(double* x, std::size_t n) {
    if (n < 2) return;
    lift(x, n, 1, Cdf97::alpha);
    lift(x, n, 0, Cdf97::beta);
    lift(x, n, 1, Cdf97::gamma);
    lift(x, n, 0, Cdf97::delta);
    for (std::size_t i = 0; i < n; i += 2) x[i] *= kLowScale;
    for (std::size_t i = 1; i < n; i += 2) x[i] *= kHighScale;
}

void inverse_1d(double* x, std::size_t n) {
    if (n < 2) return;
    for (std::size_t i = 0; i < n; i += 2) x[i] /= kLowScale;
    for (std::size_t i = 1; i < n; i += 2) x[i] /= kHighScale;
    lift(x, n, 0, -Cdf97::delta);
    lift(x, n, 1, -Cdf97::gamma);
    lift(x, n, 0, -Cdf97::beta);
    lift(x, n, 1, -Cdf97::alpha);
}

// Transforms `n` samples at base[k * stride] and stores low half first.
void analyse_line(double* base, std::size_t n, std::size_t stride, std::vector<double>& tmp) {
    tmp.resize(n);
    for (std::size_t k = 0; k < n; ++k) tmp[k] = base[k * stride];
    forward_1d(tmp.data(), n);
    const std::size_t low = (n + 1) / 2;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t dst = k % 2 == 0 ? k / 2 : low + k / 2;
        base[dst * stride] = tmp[k];
    }
}

void synthesise_line(double* base, std::size_t n, std::size_t stride, std::vector<double>& tmp) {
    tmp.resize(n);
    const std::size_t low = (n + 1) / 2;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t src = k % 2 == 0 ? k / 2 : low + k / 2;
        tmp[k] = base[src * stride];
    }
    inverse_1d(tmp.data(), n);
    for (std::size_t k = 0; k < n; ++k) base[k * stride] = tmp[k];
}

struct Region {
    std::size_t width;
    std::size_t height;
};

std::vector<Region> level_regions(std::size_t width, std::size_t height, int levels) {
    std::vector<Region> out;
    Region r{width, height};
    for (int l = 0; l < levels; ++l) {
        out.push_back(r);
        r = {(r.width + 1) / 2, (r.height + 1) / 2};
    }
    return out;
}

void copy_block(const std::vector<double>& src, std::size_t stride, std::size_t x0, std::size_t y0,
                RealGrid& dst) {
    for (std::size_t r = 0; r < dst.height; ++r)
        for (std::size_t c = 0; c < dst.width; ++c) dst.at(r, c) = src[(y0 + r) * stride + x0 + c];
}

void paste_block(const RealGrid& src, std::vector<double>& dst, std::size_t stride, std::size_t x0,
                 std::size_t y0) {
    for (std::size_t r = 0; r < src.height; ++r)
        for (std::size_t c = 0; c < src.width; ++c) dst[(y0 + r) * stride + x0 + c] = src.at(r, c);
}

// Offsets of each layout subband inside the in-place (Mallat) buffer.
std::vector<std::pair<std::size_t, std::size_t>> subband_origins(std::size_t width, std::size_t height,
                                                                 int levels) {
    const auto regions = level_regions(width, height, levels);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.emplace_back(0, 0);
    for (int l = levels; l >= 1; --l) {
        const Region r = regions[static_cast<std::size_t>(l - 1)];
        const std::size_t wl = (r.width + 1) / 2;
        const std::size_t hl = (r.height + 1) / 2;
        out.emplace_back(wl, 0);   // HL
        out.emplace_back(0, hl);   // LH
        out.emplace_back(wl, hl);  // HH
    }
    return out;
}

}  // namespace

std::vector<SubbandInfo> subband_layout(std::size_t width, std::size_t height, int levels) {
    if (levels < 1) throw ValidationError("DWT needs at least one level");
    const auto regions = level_regions(width, height, levels);
    const Region coarsest = regions.back();
    std::vector<SubbandInfo> out;
    out.push_back({Orientation::ll, levels, (coarsest.width + 1) / 2, (coarsest.height + 1) / 2});
    for (int l = levels; l >= 1; --l) {
        const Region r = regions[static_cast<std::size_t>(l - 1)];
        const std::size_t wl = (r.width + 1) / 2, wh = r.width / 2;
        const std::size_t hl = (r.height + 1) / 2, hh = r.height / 2;
        out.push_back({Orientation::hl, l, wh, hl});
        out.push_back({Orientation::lh, l, wl, hh});
        out.push_back({Orientation::hh, l, wh, hh});
    }
    return out;
}

SubbandSet dwt_forward(const RealGrid& plane, int levels) {
    if (levels < 1) throw ValidationError("DWT needs at least one level");
    const std::size_t w = plane.width, h = plane.height;
    std::vector<double> buf = plane.values;
    std::vector<double> tmp;
    for (const Region& r : level_regions(w, h, levels)) {
        for (std::size_t y = 0; y < r.height; ++y) analyse_line(buf.data() + y * w, r.width, 1, tmp);
        for (std::size_t x = 0; x < r.width; ++x) analyse_line(buf.data() + x, r.height, w, tmp);
    }
    SubbandSet out{w, h, levels, {}};
    const auto layout = subband_layout(w, h, levels);
    const auto origins = subband_origins(w, h, levels);
    for (std::size_t s = 0; s < layout.size(); ++s) {
        RealGrid g(layout[s].width, layout[s].height);
        copy_block(buf, w, origins[s].first, origins[s].second, g);
        out.bands.push_back(std::move(g));
    }
    return out;
}

RealGrid dwt_inverse(const SubbandSet& s) {
    if (s.levels < 1) throw ValidationError("DWT needs at least one level");
    const auto layout = subband_layout(s.width, s.height, s.levels);
    if (s.bands.size() != layout.size()) throw ValidationError("subband count does not match layout");
    const auto origins = subband_origins(s.width, s.height, s.levels);
    std::vector<double> buf(s.width * s.height, 0.0);
    for (std::size_t k = 0; k < layout.size(); ++k) {
        if (s.bands[k].width != layout[k].width || s.bands[k].height != layout[k].height) {
            throw ValidationError("subband " + std::to_string(k) + " has unexpected dimensions");
        }
        paste_block(s.bands[k], buf, s.width, origins[k].first, origins[k].second);
    }
    const auto regions = level_regions(s.width, s.height, s.levels);
    std::vector<double> tmp;
    for (auto it = regions.rbegin(); it != regions.rend(); ++it) {
        for (std::size_t x = 0; x < it->width; ++x) synthesise_line(buf.data() + x, it->height, s.width, tmp);
        for (std::size_t y = 0; y < it->height; ++y) synthesise_line(buf.data() + y * s.width, it->width, 1, tmp);
    }
    RealGrid out(s.width, s.height);
    out.values = std::move(buf);
    return out;
}

std::vector<double> subband_synthesis_norms(int levels) {
    if (levels < 1) throw ValidationError("DWT needs at least one level");
    static std::mutex mutex;
    static std::map<int, std::vector<double>> cache;
    std::lock_guard lock(mutex);
    if (auto it = cache.find(levels); it != cache.end()) return it->second;

    // Large enough that the impulse response never reaches the border.
    const std::size_t size = std::size_t{16} << levels;
    const auto layout = subband_layout(size, size, levels);
    std::vector<double> norms;
    for (std::size_t k = 0; k < layout.size(); ++k) {
        SubbandSet s{size, size, levels, {}};
        for (const auto& info : layout) s.bands.emplace_back(info.width, info.height);
        s.bands[k].at(layout[k].height / 2, layout[k].width / 2) = 1.0;
        const RealGrid g = dwt_inverse(s);
        double e = 0.0;
        for (double v : g.values) e += v * v;
        norms.push_back(std::sqrt(e));
    }
    cache.emplace(levels, norms);
    return norms;
}

}  // namespace msfa
