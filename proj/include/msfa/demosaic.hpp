#pragma once

#include <cstdint>
#include <string>

#include "msfa/core.hpp"
#include "msfa/pattern.hpp"

namespace msfa {

enum class DemosaicMethod : std::uint8_t { bilinear = 1, band_difference = 2 };

std::string to_string(DemosaicMethod method);
DemosaicMethod demosaic_method_from_string(const std::string& name);  // "bilinear" | "banddiff"

// Each band is interpolated separably on the rectangular lattice of every
// block site it occupies (estimates from several sites are averaged), with
// nearest-sample extension past the outermost lattice lines. Known samples
// are reproduced exactly; output is rounded half away from zero and clamped.
SpectralCube demosaic_bilinear(const MosaickedImage& m);

// Interpolates the reference band bilinearly, then interpolates each other
// band's difference to it at that band's own positions and adds it back.
// Throws ValidationError if reference_band >= N.
SpectralCube demosaic_band_difference(const MosaickedImage& m, std::size_t reference_band);

// Band of median wavelength, (N - 1) / 2 in ascending order.
std::size_t default_reference_band(const MsfaPattern& pattern);

SpectralCube demosaic(const MosaickedImage& m, DemosaicMethod method, std::size_t reference_band);

}  // namespace msfa
