#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msfa/codec.hpp"
#include "msfa/core.hpp"
#include "msfa/demosaic.hpp"
#include "msfa/pattern.hpp"
#include "msfa/spectral.hpp"

namespace msfa {

// 10 log10(peak^2 / MSE), MSE over all W*H*N samples, peak = 2^bit_depth - 1.
// Returns +infinity when the cubes are identical.
double psnr(const SpectralCube& reference, const SpectralCube& test);

enum class PlaneWeighting : std::uint8_t {
    uniform = 1,     // one quantiser scale for every transformed plane
    eigenvalue = 2,  // weight proportional to the plane's eigenvalue
};

std::string to_string(PlaneWeighting w);
PlaneWeighting plane_weighting_from_string(const std::string& name);

struct PipelineOptions {
    DemosaicMethod demosaic = DemosaicMethod::band_difference;
    std::optional<std::size_t> reference_band;  // default: median wavelength
    MarkovParams markov;                        // fixed transform parameters
    DistanceConvention distance = DistanceConvention::within_block;
    KltStatistic klt_statistic = KltStatistic::covariance;
    int levels = 0;  // 0: 5 for eai and direct, 3 for ebi (capped by plane size)
    PlaneWeighting weighting = PlaneWeighting::uniform;

    std::size_t reference_for(const MsfaPattern& pattern) const {
        return reference_band.value_or(default_reference_band(pattern));
    }
};

int default_levels(CodingMode mode, std::size_t plane_width, std::size_t plane_height, int requested = 0);

// Compresses a full-resolution cube in the given mode. The cube is mosaicked
// first; EAI demosaicks and codes the full cube, EBI structure-converts and
// codes the pseudo-MSI, direct codes the mosaic as one plane.
CodedStream encode_cube(const SpectralCube& cube, const MsfaPattern& pattern, CodingMode mode, double target_bpppb,
                        const PipelineOptions& options = {});
// Same for an already mosaicked image (EAI demosaicks it before coding).
CodedStream encode_mosaic(const MosaickedImage& mosaicked, CodingMode mode, double target_bpppb,
                          const PipelineOptions& options = {});

struct DecodedImage {
    StreamHeader header;
    std::optional<MosaickedImage> mosaic;  // EBI and direct
    SpectralCube cube;                      // demosaicked full resolution
};

DecodedImage decode_image(std::span<const std::uint8_t> bytes);

struct RdPoint {
    CodingMode mode = CodingMode::eai;
    double target_bpppb = 0.0;
    double achieved_bpppb = 0.0;
    double dpsnr_db = 0.0;
    std::optional<double> opsnr_db;  // only with an original cube
    double wall_ms = 0.0;
    bool rate_saturated = false;
};

struct PipelineRun {
    CodedStream stream;
    DecodedImage decoded;
    SpectralCube demosaicked_reference;  // uncompressed mosaic, demosaicked
    std::size_t encoded_samples = 0;
    RdPoint point;
};

PipelineRun run_eai(const SpectralCube& cube, const MsfaPattern& pattern, double target_bpppb,
                    const PipelineOptions& options = {});
// kind selects ebi_klt, ebi_fixed or ebi_identity.
PipelineRun run_ebi(const SpectralCube& cube, const MsfaPattern& pattern, double target_bpppb, TransformKind kind,
                    const PipelineOptions& options = {});
PipelineRun run_direct(const SpectralCube& cube, const MsfaPattern& pattern, double target_bpppb,
                       const PipelineOptions& options = {});
// Without an original only DPSNR is available.
PipelineRun run_direct(const MosaickedImage& mosaicked, double target_bpppb, const PipelineOptions& options = {});
PipelineRun run_mode(const SpectralCube& cube, const MsfaPattern& pattern, CodingMode mode, double target_bpppb,
                     const PipelineOptions& options = {});

// Default sweep grid in bpppb.
std::vector<double> default_sweep_rates();

// Every (mode, rate) pair, ordered by the position of the mode in `modes`
// and then by ascending rate regardless of completion order.
std::vector<RdPoint> rd_sweep(const SpectralCube& cube, const MsfaPattern& pattern, std::span<const CodingMode> modes,
                              std::span<const double> rates, const PipelineOptions& options = {});

// CSV with header mode,target_bpppb,achieved_bpppb,dpsnr_db,opsnr_db,wall_ms.
// Infinite PSNR is written as "inf", a missing OPSNR as an empty field.
// With include_timing false the wall_ms column is 0 so runs compare equal.
std::string rd_csv(std::span<const RdPoint> points, bool include_timing = true);
// DPSNR against achieved rate, one polyline per mode.
std::string rd_svg(std::span<const RdPoint> points);

// Bands of `cube` nearest to each requested wavelength (within tolerance_nm).
SpectralCube select_wavelengths(const SpectralCube& cube, std::span<const double> wavelengths,
                                double tolerance_nm = 0.5);

// Rounds half away from zero and clamps to [0, max].
Sample round_sample(double v, Sample max);

}  // namespace msfa
