#include <algorithm>
#include <chrono>
#include <cmath>

#include "msfa/pipeline.hpp"

namespace msfa {

int default_levels(CodingMode mode, std::size_t plane_width, std::size_t plane_height, int requested) {
    int levels = requested > 0 ? requested : (is_ebi(mode) ? 3 : 5);
    // Keep the coarsest LL band at least two samples on its short side.
    const std::size_t shortest = std::min(plane_width, plane_height);
    while (levels > 1 && (shortest >> levels) < 2) --levels;
    return levels;
}

std::string to_string(PlaneWeighting w) { return w == PlaneWeighting::uniform ? "uniform" : "eigenvalue"; }

PlaneWeighting plane_weighting_from_string(const std::string& name) {
    if (name == "uniform") return PlaneWeighting::uniform;
    if (name == "eigenvalue") return PlaneWeighting::eigenvalue;
    throw ValidationError("unknown plane weighting '" + name + "' (uniform, eigenvalue)");
}

namespace {

// Eigenvalues normalised to mean 1, floored so that null planes keep a finite step.
std::vector<double> eigenvalue_weights(const SpectralTransform& t) {
    const auto& eig = t.eigenvalues();
    if (eig.empty()) return {};
    double mean = 0.0, peak = 0.0;
    for (double v : eig) {
        mean += v;
        peak = std::max(peak, v);
    }
    mean /= static_cast<double>(eig.size());
    if (!(mean > 0.0)) return {};
    std::vector<double> w;
    for (double v : eig) w.push_back(std::max(v, 1e-9 * peak) / mean);
    return w;
}

std::vector<RealGrid> grids_of(const TransformedCube& tc) {
    std::vector<RealGrid> out;
    for (std::size_t p = 0; p < tc.planes(); ++p) {
        RealGrid g(tc.width, tc.height);
        const auto src = tc.plane(p);
        std::copy(src.begin(), src.end(), g.values.begin());
        out.push_back(std::move(g));
    }
    return out;
}

TransformedCube from_grids(const std::vector<RealGrid>& planes, const SpectralTransform& t) {
    TransformedCube tc{planes[0].width, planes[0].height, {}, t};
    tc.values.reserve(planes.size() * tc.plane_size());
    for (const auto& g : planes) tc.values.insert(tc.values.end(), g.values.begin(), g.values.end());
    return tc;
}

std::vector<Sample> to_samples(std::span<const double> values, int bit_depth) {
    const auto max = static_cast<Sample>((1u << bit_depth) - 1u);
    std::vector<Sample> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = round_sample(values[i], max);
    return out;
}

[[noreturn]] void bad_geometry(const char* mode) {
    throw FormatError(std::string("plane geometry does not fit a ") + mode + " stream");
}

}  // namespace

CodedStream encode_mosaic(const MosaickedImage& m, CodingMode mode, double target_bpppb,
                          const PipelineOptions& options) {
    const MsfaPattern& pattern = m.pattern;
    StreamHeader header;
    header.mode = mode;
    header.demosaic = options.demosaic;
    header.reference_band = static_cast<std::uint32_t>(options.reference_for(pattern));
    if (header.reference_band >= pattern.bands()) {
        throw ValidationError("reference band " + std::to_string(header.reference_band) + " out of range for " +
                              std::to_string(pattern.bands()) + " bands");
    }
    header.width = static_cast<std::uint32_t>(m.width);
    header.height = static_cast<std::uint32_t>(m.height);
    header.bands = static_cast<std::uint32_t>(pattern.bands());
    header.bit_depth = static_cast<std::uint8_t>(m.bit_depth);
    header.pattern = pattern;

    std::vector<RealGrid> planes;
    if (mode == CodingMode::eai) {
        const SpectralCube full = demosaic(m, options.demosaic, header.reference_band);
        const SpectralTransform t = klt_from_data(full, options.klt_statistic);
        planes = grids_of(apply_transform(full, t));
        header.transform = t;
    } else if (is_ebi(mode)) {
        const PseudoMsi pseudo = structure_convert(m);
        SpectralTransform t;
        if (mode == CodingMode::ebi_klt) {
            t = klt_from_data(pseudo, options.klt_statistic);
        } else if (mode == CodingMode::ebi_fixed) {
            t = fixed_transform(pattern, options.markov, options.distance);
            header.markov = options.markov;
        } else {
            t = SpectralTransform::identity(pseudo.plane_count());
        }
        planes = grids_of(apply_transform(pseudo, t));
        header.transform = t;
    } else {
        RealGrid g(m.width, m.height);
        for (std::size_t i = 0; i < m.samples.size(); ++i) g.values[i] = m.samples[i];
        planes.push_back(std::move(g));
    }
    if (options.weighting == PlaneWeighting::eigenvalue && header.transform) {
        header.plane_weights = eigenvalue_weights(*header.transform);
    }
    header.plane_count = static_cast<std::uint32_t>(planes.size());
    header.plane_width = static_cast<std::uint32_t>(planes[0].width);
    header.plane_height = static_cast<std::uint32_t>(planes[0].height);
    header.levels = static_cast<std::uint8_t>(default_levels(mode, planes[0].width, planes[0].height, options.levels));
    return encode_stream(planes, std::move(header), target_bpppb);
}

CodedStream encode_cube(const SpectralCube& cube, const MsfaPattern& pattern, CodingMode mode, double target_bpppb,
                        const PipelineOptions& options) {
    return encode_mosaic(mosaic(cube, pattern), mode, target_bpppb, options);
}

DecodedImage decode_image(std::span<const std::uint8_t> bytes) {
    DecodedStream ds = decode_stream(bytes);
    const StreamHeader& h = ds.header;
    const MsfaPattern& pattern = h.pattern;
    const std::size_t block = pattern.block_size();
    if (h.width == 0 || h.height == 0 || h.width % block != 0 || h.height % block != 0) {
        throw FormatError("image size is not a multiple of the pattern block");
    }
    DecodedImage out;
    out.header = h;

    if (h.mode == CodingMode::eai) {
        if (h.plane_count != h.bands || h.plane_width != h.width || h.plane_height != h.height || !h.transform) {
            bad_geometry("eai");
        }
        const auto values = invert_transform(from_grids(ds.planes, *h.transform));
        out.cube = SpectralCube(h.width, h.height, h.bit_depth, pattern.wavelengths(), to_samples(values, h.bit_depth));
        return out;
    }

    MosaickedImage m;
    if (is_ebi(h.mode)) {
        if (h.plane_count != pattern.plane_count() || h.plane_width != h.width / block ||
            h.plane_height != h.height / block || !h.transform) {
            bad_geometry("ebi");
        }
        const auto values = invert_transform(from_grids(ds.planes, *h.transform));
        PseudoMsi pseudo{h.plane_width, h.plane_height, h.bit_depth, to_samples(values, h.bit_depth), pattern};
        m = inverse_convert(pseudo);
    } else {
        if (h.plane_count != 1 || h.plane_width != h.width || h.plane_height != h.height) bad_geometry("direct");
        m = MosaickedImage{h.width, h.height, h.bit_depth, to_samples(ds.planes[0].values, h.bit_depth), pattern};
    }
    out.cube = demosaic(m, h.demosaic, h.reference_band);
    out.mosaic = std::move(m);
    return out;
}

namespace {

PipelineRun run_on_mosaic(const MosaickedImage& m, const SpectralCube* original, CodingMode mode,
                          double target_bpppb, const PipelineOptions& options) {
    PipelineRun run;
    const std::size_t n = m.pattern.bands();
    run.demosaicked_reference = demosaic(m, options.demosaic, options.reference_for(m.pattern));

    const auto t0 = std::chrono::steady_clock::now();
    run.stream = encode_mosaic(m, mode, target_bpppb, options);
    run.decoded = decode_image(run.stream.bytes);
    const auto t1 = std::chrono::steady_clock::now();

    const StreamHeader& h = run.stream.header;
    run.encoded_samples = std::size_t{h.plane_count} * h.plane_width * h.plane_height;
    const std::size_t eai_samples = m.width * m.height * n;
    // One coded sample per mosaic pixel, which is 1/N of EAI whenever B^2 == N.
    if (is_ebi(mode) && run.encoded_samples != m.width * m.height) {
        throw Error("EBI must code exactly one sample per mosaic pixel");
    }

    RdPoint& p = run.point;
    p.mode = mode;
    p.target_bpppb = target_bpppb;
    p.achieved_bpppb = static_cast<double>(run.stream.bytes.size()) * 8.0 / static_cast<double>(eai_samples);
    p.dpsnr_db = psnr(run.demosaicked_reference, run.decoded.cube);
    if (original) p.opsnr_db = psnr(original->crop(m.width, m.height), run.decoded.cube);
    p.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    p.rate_saturated = run.stream.rate_saturated;
    return run;
}

}  // namespace

PipelineRun run_mode(const SpectralCube& cube, const MsfaPattern& pattern, CodingMode mode, double target_bpppb,
                     const PipelineOptions& options) {
    return run_on_mosaic(mosaic(cube, pattern), &cube, mode, target_bpppb, options);
}

PipelineRun run_eai(const SpectralCube& cube, const MsfaPattern& pattern, double target_bpppb,
                    const PipelineOptions& options) {
    return run_mode(cube, pattern, CodingMode::eai, target_bpppb, options);
}

PipelineRun run_ebi(const SpectralCube& cube, const MsfaPattern& pattern, double target_bpppb, TransformKind kind,
                    const PipelineOptions& options) {
    const CodingMode mode = kind == TransformKind::klt     ? CodingMode::ebi_klt
                            : kind == TransformKind::fixed ? CodingMode::ebi_fixed
                                                           : CodingMode::ebi_identity;
    return run_mode(cube, pattern, mode, target_bpppb, options);
}

PipelineRun run_direct(const SpectralCube& cube, const MsfaPattern& pattern, double target_bpppb,
                       const PipelineOptions& options) {
    return run_mode(cube, pattern, CodingMode::direct, target_bpppb, options);
}

PipelineRun run_direct(const MosaickedImage& mosaicked, double target_bpppb, const PipelineOptions& options) {
    return run_on_mosaic(mosaicked, nullptr, CodingMode::direct, target_bpppb, options);
}

SpectralCube select_wavelengths(const SpectralCube& cube, std::span<const double> wavelengths, double tolerance_nm) {
    std::vector<std::size_t> indices;
    for (double w : wavelengths) {
        const auto& have = cube.wavelengths();
        std::size_t best = 0;
        for (std::size_t n = 1; n < have.size(); ++n)
            if (std::abs(have[n] - w) < std::abs(have[best] - w)) best = n;
        if (std::abs(have[best] - w) > tolerance_nm) {
            throw ValidationError("cube has no band near " + std::to_string(w) + " nm");
        }
        if (!indices.empty() && best <= indices.back()) {
            throw ValidationError("requested wavelengths must map to distinct ascending bands");
        }
        indices.push_back(best);
    }
    return cube.select_bands(indices);
}

}  // namespace msfa
