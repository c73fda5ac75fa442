#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "msfa/core.hpp"

namespace msfa {

enum class PatternKind : std::uint8_t {
    raster = 1,
    zigzag = 2,      // diagonal scan, as in JPEG coefficient ordering
    serpentine = 3,  // boustrophedon rows
    dither = 4,      // ordered-dither (Bayer index matrix) placement
    bayer = 5,       // GRBG colour filter array, three bands
    custom = 6,
};

std::string to_string(PatternKind kind);
PatternKind pattern_kind_from_string(const std::string& name);

// One filter position inside the B x B block.
struct FilterSite {
    std::size_t band;  // 0-based band index
    std::size_t row;
    std::size_t col;

    friend bool operator==(const FilterSite&, const FilterSite&) = default;
};

// Periodic B x B filter layout. Band indices are 1-based in `assignment`
// to match the usual figure notation; the API is 0-based everywhere else.
class MsfaPattern {
public:
    MsfaPattern() = default;
    // Every band 1..N must occur at least once. Throws ValidationError.
    MsfaPattern(PatternKind kind, std::size_t block_size, std::vector<int> assignment,
                std::vector<double> wavelengths);

    PatternKind kind() const { return kind_; }
    std::size_t block_size() const { return block_; }
    std::size_t bands() const { return wavelengths_.size(); }
    const std::vector<double>& wavelengths() const { return wavelengths_; }
    const std::vector<int>& assignment() const { return assignment_; }

    // 0-based band at block position (row, col), both taken modulo B.
    std::size_t band_at(std::size_t row, std::size_t col) const {
        return static_cast<std::size_t>(assignment_[(row % block_) * block_ + col % block_] - 1);
    }
    bool single_occurrence() const { return sites_.size() == bands(); }

    // Pseudo-MSI planes, one per block position, ordered by ascending band
    // and then by raster position inside the block.
    const std::vector<FilterSite>& sites() const { return sites_; }
    std::size_t plane_count() const { return sites_.size(); }

    friend bool operator==(const MsfaPattern&, const MsfaPattern&) = default;

private:
    PatternKind kind_ = PatternKind::custom;
    std::size_t block_ = 0;
    std::vector<int> assignment_;
    std::vector<double> wavelengths_;
    std::vector<FilterSite> sites_;
};

// raster/zigzag/serpentine/dither need B in {2, 3, 4} and B*B wavelengths;
// bayer needs B == 2 and three wavelengths.
MsfaPattern build_pattern(PatternKind kind, std::size_t block_size, std::vector<double> wavelengths);

// "raster4x4", "dither3x3", "bayer", ... Throws ValidationError for unknown names.
MsfaPattern named_pattern(const std::string& name, std::vector<double> wavelengths);

// "fig8" (16 bands, 424-720 nm), "fig8-9band", "ricefield16".
std::vector<double> named_wavelengths(const std::string& name);
std::vector<std::string> wavelength_set_names();

// Pattern files: JSON {kind, block_size, assignment, wavelengths_nm}.
MsfaPattern load_pattern(const std::filesystem::path& path);
void store_pattern(const MsfaPattern& pattern, const std::filesystem::path& path);
std::string pattern_to_json(const MsfaPattern& pattern);
MsfaPattern pattern_from_json(const std::string& text);

// Single-channel sensor image; the sample at (r, c) belongs to
// pattern.band_at(r, c). Width and height are multiples of B.
struct MosaickedImage {
    std::size_t width = 0;
    std::size_t height = 0;
    int bit_depth = 8;
    std::vector<Sample> samples;
    MsfaPattern pattern;

    Sample at(std::size_t row, std::size_t col) const { return samples[row * width + col]; }
    friend bool operator==(const MosaickedImage&, const MosaickedImage&) = default;
};

// Structure-converted mosaic: plane p gathers every sample taken at block
// site pattern.sites()[p]. Planes are (W/B) x (H/B).
struct PseudoMsi {
    std::size_t plane_width = 0;
    std::size_t plane_height = 0;
    int bit_depth = 8;
    std::vector<Sample> samples;  // planar, row-major per plane
    MsfaPattern pattern;

    std::size_t plane_count() const { return pattern.plane_count(); }
    std::size_t plane_size() const { return plane_width * plane_height; }
    std::span<const Sample> plane(std::size_t p) const {
        return std::span<const Sample>(samples).subspan(p * plane_size(), plane_size());
    }
    // Only valid for single-occurrence patterns (wavelengths must be distinct).
    SpectralCube as_cube() const;

    friend bool operator==(const PseudoMsi&, const PseudoMsi&) = default;
};

// Crops the cube to multiples of B, then keeps one band per pixel.
MosaickedImage mosaic(const SpectralCube& cube, const MsfaPattern& pattern);
PseudoMsi structure_convert(const MosaickedImage& image);
MosaickedImage inverse_convert(const PseudoMsi& pseudo);

enum class DistanceConvention : std::uint8_t {
    within_block = 1,  // distance between sites inside one block
    periodic = 2,      // minimum over the periodic tiling (3x3 replication)
};

std::string to_string(DistanceConvention convention);
DistanceConvention distance_convention_from_string(const std::string& name);

struct FilterGeometry {
    SymmetricMatrix distance;        // pixels
    SymmetricMatrix wavelength_gap;  // nanometres
};

// Band-level N x N geometry; bands with several sites use the minimum
// distance over all their occurrences.
FilterGeometry filter_geometry(const MsfaPattern& pattern,
                               DistanceConvention convention = DistanceConvention::within_block);

// Site-level geometry over the pseudo-MSI planes (equals filter_geometry for
// single-occurrence patterns).
FilterGeometry plane_geometry(const MsfaPattern& pattern,
                              DistanceConvention convention = DistanceConvention::within_block);

}  // namespace msfa
