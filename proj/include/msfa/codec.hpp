#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msfa/core.hpp"
#include "msfa/demosaic.hpp"
#include "msfa/pattern.hpp"
#include "msfa/spectral.hpp"

namespace msfa {

template <typename T>
struct Grid {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<T> values;  // row-major

    Grid() = default;
    Grid(std::size_t w, std::size_t h, T fill = T{}) : width(w), height(h), values(w * h, fill) {}
    std::size_t size() const { return values.size(); }
    T& at(std::size_t r, std::size_t c) { return values[r * width + c]; }
    const T& at(std::size_t r, std::size_t c) const { return values[r * width + c]; }
    friend bool operator==(const Grid&, const Grid&) = default;
};

using RealGrid = Grid<double>;
using IntGrid = Grid<std::int64_t>;

// ---------------------------------------------------------------------------
// CDF 9/7 lifting wavelet

enum class Orientation : std::uint8_t { ll, hl, lh, hh };

struct SubbandInfo {
    Orientation orientation;
    int level;  // 1 = finest
    std::size_t width;
    std::size_t height;
};

// Subband geometry of a width x height plane, coarse to fine:
// LL_L, HL_L, LH_L, HH_L, HL_{L-1}, ..., HH_1. Low halves take ceil(n/2).
std::vector<SubbandInfo> subband_layout(std::size_t width, std::size_t height, int levels);

struct SubbandSet {
    std::size_t width = 0;
    std::size_t height = 0;
    int levels = 0;
    std::vector<RealGrid> bands;  // in subband_layout order
};

// Lifting constants and normalisation: the low band is scaled by sqrt(2)/K and
// the high band by K/sqrt(2), so a 2-D level has DC gain 2 and the transform
// is close to orthonormal.
// Constants carried to full double precision; the usual 9-digit roundings
// leave a ~4e-9 relative high-pass response to a constant signal.
struct Cdf97 {
    static constexpr double alpha = -1.586134342059924;
    static constexpr double beta = -0.052980118572961;
    static constexpr double gamma = 0.882911075530934;
    static constexpr double delta = 0.443506852043971;
    static constexpr double k = 1.230174104914001;
};

// Throws ValidationError for levels < 1. Symmetric whole-sample extension.
SubbandSet dwt_forward(const RealGrid& plane, int levels);
RealGrid dwt_inverse(const SubbandSet& subbands);

// L2 norm of the synthesis basis function of each subband (layout order).
std::vector<double> subband_synthesis_norms(int levels);

// ---------------------------------------------------------------------------
// Dead-zone scalar quantiser

// q = sign(c) floor(|c| / step)
IntGrid quantize(const RealGrid& coefficients, double step);
// c = sign(q) (|q| + 1/2) step, zero stays zero
RealGrid dequantize(const IntGrid& q, double step);

// ---------------------------------------------------------------------------
// Bitplane entropy coder

// Largest magnitude the coder accepts; quantiser indices must stay below it.
inline constexpr std::int64_t kMaxMagnitude = std::int64_t{1} << 60;

// Empty grid -> empty payload. Otherwise one byte with the number of
// magnitude bitplanes followed by the range-coded bitplanes.
std::vector<std::uint8_t> entropy_encode(const IntGrid& q);
// Throws FormatError (with byte offset) on truncated or corrupt input.
IntGrid entropy_decode(std::span<const std::uint8_t> bytes, std::size_t width, std::size_t height);

// ---------------------------------------------------------------------------
// Rate allocation

struct RateTarget {
    double bpppb = 1.0;
    std::size_t pixel_band_count = 0;   // denominator: W' * H' * N
    std::size_t fixed_overhead_bytes = 0;  // container bytes outside payload segments

    double target_bits() const { return bpppb * static_cast<double>(pixel_band_count); }
};

struct RateAllocation {
    double lambda = 0.0;
    std::vector<double> plane_weights;
    std::vector<double> subband_weights;
    std::vector<std::vector<std::uint8_t>> segments;  // plane-major, layout order
    std::size_t total_bits = 0;  // including fixed overhead and segment length fields
    int evaluations = 0;
    bool saturated = false;  // target beyond what the finest quantiser can spend

    double step(std::size_t plane, std::size_t subband) const {
        return lambda / (plane_weights[plane] * subband_weights[subband]);
    }
};

// Step for subband s of plane p is lambda / (plane_weights[p] * w_s) with
// w_s the synthesis norm. lambda is searched so that the total stream size
// lands within 2% of the target (closest feasible value when the target is
// beyond the finest quantiser). Throws InfeasibleRateError when even an
// all-zero payload exceeds the target.
RateAllocation allocate_rate(const std::vector<SubbandSet>& planes, const RateTarget& target,
                             std::span<const double> plane_weights);

// Bytes a payload segment occupies in the container besides its data.
inline constexpr std::size_t kSegmentLengthBytes = 4;

// ---------------------------------------------------------------------------
// Container

enum class CodingMode : std::uint8_t {
    eai = 1,
    ebi_klt = 2,
    ebi_fixed = 3,
    direct = 4,
    ebi_identity = 5,
};

std::string to_string(CodingMode mode);
CodingMode coding_mode_from_string(const std::string& name);  // accepts "ebi-klt" and "ebi_klt"
bool is_ebi(CodingMode mode);

struct StreamHeader {
    std::uint16_t version = 1;
    CodingMode mode = CodingMode::ebi_fixed;
    DemosaicMethod demosaic = DemosaicMethod::band_difference;
    std::uint32_t reference_band = 0;  // 0-based, band-difference demosaicking
    std::uint32_t width = 0;           // full-resolution, cropped to the block grid
    std::uint32_t height = 0;
    std::uint32_t bands = 0;
    std::uint8_t bit_depth = 12;
    MsfaPattern pattern;
    std::optional<SpectralTransform> transform;
    std::optional<MarkovParams> markov;  // fixed transforms only
    std::uint32_t plane_count = 0;
    std::uint32_t plane_width = 0;
    std::uint32_t plane_height = 0;
    std::uint8_t levels = 0;
    double lambda = 0.0;
    std::vector<double> plane_weights;
    std::vector<double> subband_weights;
};

struct CodedStream {
    StreamHeader header;
    std::vector<std::uint8_t> bytes;  // complete container
    bool rate_saturated = false;
};

// Serialised header size in bytes (everything before the payload segments).
std::size_t header_size(const StreamHeader& header);

// Header fields other than lambda and subband_weights must be filled in;
// empty plane_weights means uniform weights. Planes must match
// plane_count x plane_width x plane_height.
CodedStream encode_stream(const std::vector<RealGrid>& planes, StreamHeader header, double target_bpppb);

// Parses only the header; payload is not touched.
StreamHeader read_header(std::span<const std::uint8_t> bytes);

struct DecodedStream {
    StreamHeader header;
    std::vector<RealGrid> planes;
};

// Throws FormatError on version mismatch, inconsistent geometry or corrupt payload.
DecodedStream decode_stream(std::span<const std::uint8_t> bytes);

}  // namespace msfa
