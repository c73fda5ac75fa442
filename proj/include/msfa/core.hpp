#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "msfa/error.hpp"

namespace msfa {

using Sample = std::uint16_t;

// Full-resolution multispectral image: `bands` planes of width x height
// unsigned samples, stored planar and row-major. Band n (0-based) has center
// wavelength wavelengths()[n]; wavelengths are strictly increasing.
class SpectralCube {
public:
    SpectralCube() = default;
    SpectralCube(std::size_t width, std::size_t height, int bit_depth,
                 std::vector<double> wavelengths);
    SpectralCube(std::size_t width, std::size_t height, int bit_depth,
                 std::vector<double> wavelengths, std::vector<Sample> samples);

    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    std::size_t bands() const { return wavelengths_.size(); }
    std::size_t plane_size() const { return width_ * height_; }
    int bit_depth() const { return bit_depth_; }
    Sample max_value() const { return static_cast<Sample>((1u << bit_depth_) - 1u); }
    const std::vector<double>& wavelengths() const { return wavelengths_; }

    std::span<const Sample> plane(std::size_t band) const;
    std::span<Sample> plane(std::size_t band);
    std::span<const Sample> samples() const { return samples_; }

    Sample at(std::size_t band, std::size_t row, std::size_t col) const {
        return samples_[band * plane_size() + row * width_ + col];
    }
    Sample& at(std::size_t band, std::size_t row, std::size_t col) {
        return samples_[band * plane_size() + row * width_ + col];
    }

    // Throws ValidationError if any sample exceeds the bit-depth range.
    void check_range() const;

    // Keeps the listed bands (0-based, ascending) in order.
    SpectralCube select_bands(std::span<const std::size_t> band_indices) const;
    SpectralCube crop(std::size_t width, std::size_t height) const;

    friend bool operator==(const SpectralCube&, const SpectralCube&) = default;

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    int bit_depth_ = 8;
    std::vector<double> wavelengths_;
    std::vector<Sample> samples_;
};

// Dense real N x N matrix that is symmetric by construction.
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(std::size_t order, double fill = 0.0);
    static SymmetricMatrix identity(std::size_t order);
    // Throws ValidationError unless rows form a square symmetric matrix.
    static SymmetricMatrix from_rows(const std::vector<std::vector<double>>& rows);
    static SymmetricMatrix from_dense(std::size_t order, std::vector<double> entries);

    std::size_t order() const { return order_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * order_ + j]; }
    // Writes both (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double value);
    std::span<const double> entries() const { return data_; }

    friend bool operator==(const SymmetricMatrix&, const SymmetricMatrix&) = default;

private:
    std::size_t order_ = 0;
    std::vector<double> data_;
};

// Entrywise product.
SymmetricMatrix hadamard(const SymmetricMatrix& a, const SymmetricMatrix& b);

enum class TransformKind : std::uint8_t { klt = 1, fixed = 2, identity = 3 };

std::string to_string(TransformKind kind);
TransformKind transform_kind_from_string(const std::string& name);

// Orthonormal N x N matrix with eigenvectors as rows, ordered by descending
// eigenvalue of the matrix it was derived from.
class SpectralTransform {
public:
    SpectralTransform() = default;
    // Throws ValidationError if `rows` is not orthonormal within 1e-9.
    SpectralTransform(std::size_t order, std::vector<double> rows, TransformKind kind,
                      std::vector<double> eigenvalues = {});
    static SpectralTransform identity(std::size_t order);

    std::size_t order() const { return order_; }
    TransformKind kind() const { return kind_; }
    double operator()(std::size_t row, std::size_t col) const { return rows_[row * order_ + col]; }
    std::span<const double> rows() const { return rows_; }
    // Eigenvalues the rows were sorted by; empty for identity transforms.
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

    // y = T x and x = T^T y on one spectral vector.
    void forward(std::span<const double> x, std::span<double> y) const;
    void inverse(std::span<const double> y, std::span<double> x) const;

    friend bool operator==(const SpectralTransform&, const SpectralTransform&) = default;

private:
    std::size_t order_ = 0;
    std::vector<double> rows_;
    TransformKind kind_ = TransformKind::identity;
    std::vector<double> eigenvalues_;
};

struct Eigensystem {
    std::vector<double> values;   // descending
    std::vector<double> vectors;  // row-major, one eigenvector per row
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvalues are
// returned in descending order (stable for ties); each eigenvector is signed
// so that its first entry of largest magnitude is non-negative.
Eigensystem symmetric_eigendecomposition(const SymmetricMatrix& m);

// Planar "MSC1" cube files, see docs/formats.md.
SpectralCube load_cube(const std::filesystem::path& path);
void store_cube(const SpectralCube& cube, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_cube(const SpectralCube& cube);
SpectralCube parse_cube(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace msfa
