#include <cmath>
#include <numeric>

#include "msfa/core.hpp"

namespace msfa {

namespace {

void check_geometry(std::size_t width, std::size_t height, int bit_depth,
                    const std::vector<double>& wavelengths) {
    if (width == 0 || height == 0) throw ValidationError("cube dimensions must be at least 1x1");
    if (bit_depth < 8 || bit_depth > 16) {
        throw ValidationError("bit depth must be in [8, 16], got " + std::to_string(bit_depth));
    }
    if (wavelengths.empty()) throw ValidationError("cube needs at least one band");
    for (std::size_t n = 0; n < wavelengths.size(); ++n) {
        if (!std::isfinite(wavelengths[n])) throw ValidationError("non-finite wavelength");
        if (n > 0 && !(wavelengths[n] > wavelengths[n - 1])) {
            throw ValidationError("wavelengths must be strictly increasing (band " +
                                  std::to_string(n + 1) + ")");
        }
    }
}

}  // namespace

SpectralCube::SpectralCube(std::size_t width, std::size_t height, int bit_depth,
                           std::vector<double> wavelengths)
    : width_(width), height_(height), bit_depth_(bit_depth), wavelengths_(std::move(wavelengths)) {
    check_geometry(width_, height_, bit_depth_, wavelengths_);
    samples_.assign(width_ * height_ * wavelengths_.size(), 0);
}

SpectralCube::SpectralCube(std::size_t width, std::size_t height, int bit_depth,
                           std::vector<double> wavelengths, std::vector<Sample> samples)
    : width_(width),
      height_(height),
      bit_depth_(bit_depth),
      wavelengths_(std::move(wavelengths)),
      samples_(std::move(samples)) {
    check_geometry(width_, height_, bit_depth_, wavelengths_);
    if (samples_.size() != width_ * height_ * wavelengths_.size()) {
        throw ValidationError("sample count does not match cube geometry");
    }
    check_range();
}

std::span<const Sample> SpectralCube::plane(std::size_t band) const {
    return std::span<const Sample>(samples_).subspan(band * plane_size(), plane_size());
}

std::span<Sample> SpectralCube::plane(std::size_t band) {
    return std::span<Sample>(samples_).subspan(band * plane_size(), plane_size());
}

void SpectralCube::check_range() const {
    const Sample peak = max_value();
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (samples_[i] > peak) {
            throw ValidationError("sample " + std::to_string(samples_[i]) + " exceeds " +
                                  std::to_string(bit_depth_) + "-bit range");
        }
    }
}

SpectralCube SpectralCube::select_bands(std::span<const std::size_t> band_indices) const {
    std::vector<double> wl;
    for (std::size_t b : band_indices) {
        if (b >= bands()) throw ValidationError("band index out of range");
        wl.push_back(wavelengths_[b]);
    }
    SpectralCube out(width_, height_, bit_depth_, std::move(wl));
    for (std::size_t k = 0; k < band_indices.size(); ++k) {
        auto src = plane(band_indices[k]);
        std::copy(src.begin(), src.end(), out.plane(k).begin());
    }
    return out;
}

SpectralCube SpectralCube::crop(std::size_t width, std::size_t height) const {
    if (width > width_ || height > height_) throw ValidationError("crop larger than cube");
    if (width == width_ && height == height_) return *this;
    SpectralCube out(width, height, bit_depth_, wavelengths_);
    for (std::size_t n = 0; n < bands(); ++n)
        for (std::size_t r = 0; r < height; ++r)
            for (std::size_t c = 0; c < width; ++c) out.at(n, r, c) = at(n, r, c);
    return out;
}

SymmetricMatrix::SymmetricMatrix(std::size_t order, double fill)
    : order_(order), data_(order * order, fill) {}

SymmetricMatrix SymmetricMatrix::identity(std::size_t order) {
    SymmetricMatrix m(order, 0.0);
    for (std::size_t i = 0; i < order; ++i) m.data_[i * order + i] = 1.0;
    return m;
}

SymmetricMatrix SymmetricMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    std::vector<double> dense;
    dense.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw ValidationError("matrix is not square");
        dense.insert(dense.end(), row.begin(), row.end());
    }
    return from_dense(n, std::move(dense));
}

SymmetricMatrix SymmetricMatrix::from_dense(std::size_t order, std::vector<double> entries) {
    if (order == 0) throw ValidationError("matrix order must be at least 1");
    if (entries.size() != order * order) throw ValidationError("matrix entry count mismatch");
    for (std::size_t i = 0; i < order; ++i) {
        for (std::size_t j = i + 1; j < order; ++j) {
            const double a = entries[i * order + j];
            const double b = entries[j * order + i];
            const double scale = std::max({1.0, std::abs(a), std::abs(b)});
            if (!(std::abs(a - b) <= 1e-12 * scale)) {
                throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                                      std::to_string(j) + ")");
            }
        }
    }
    SymmetricMatrix m;
    m.order_ = order;
    m.data_ = std::move(entries);
    // Mirror the upper triangle so the stored matrix is exactly symmetric.
    for (std::size_t i = 0; i < order; ++i)
        for (std::size_t j = i + 1; j < order; ++j) m.data_[j * order + i] = m.data_[i * order + j];
    return m;
}

void SymmetricMatrix::set(std::size_t i, std::size_t j, double value) {
    data_[i * order_ + j] = value;
    data_[j * order_ + i] = value;
}

SymmetricMatrix hadamard(const SymmetricMatrix& a, const SymmetricMatrix& b) {
    if (a.order() != b.order()) throw ValidationError("Hadamard product of different orders");
    std::vector<double> out(a.order() * a.order());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.entries()[k] * b.entries()[k];
    return SymmetricMatrix::from_dense(a.order(), std::move(out));
}

std::string to_string(TransformKind kind) {
    switch (kind) {
        case TransformKind::klt: return "klt";
        case TransformKind::fixed: return "fixed";
        case TransformKind::identity: return "identity";
    }
    return "unknown";
}

TransformKind transform_kind_from_string(const std::string& name) {
    if (name == "klt") return TransformKind::klt;
    if (name == "fixed") return TransformKind::fixed;
    if (name == "identity") return TransformKind::identity;
    throw ValidationError("unknown transform kind '" + name + "'");
}

SpectralTransform::SpectralTransform(std::size_t order, std::vector<double> rows, TransformKind kind,
                                     std::vector<double> eigenvalues)
    : order_(order), rows_(std::move(rows)), kind_(kind), eigenvalues_(std::move(eigenvalues)) {
    if (order_ == 0 || rows_.size() != order_ * order_) {
        throw ValidationError("transform matrix size does not match its order");
    }
    if (!eigenvalues_.empty() && eigenvalues_.size() != order_) {
        throw ValidationError("eigenvalue count does not match transform order");
    }
    for (std::size_t i = 0; i < order_; ++i) {
        for (std::size_t j = 0; j < order_; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < order_; ++k) dot += rows_[i * order_ + k] * rows_[j * order_ + k];
            const double expected = i == j ? 1.0 : 0.0;
            if (!(std::abs(dot - expected) <= 1e-9)) {
                throw ValidationError("transform matrix is not orthonormal");
            }
        }
    }
}

SpectralTransform SpectralTransform::identity(std::size_t order) {
    std::vector<double> rows(order * order, 0.0);
    for (std::size_t i = 0; i < order; ++i) rows[i * order + i] = 1.0;
    return SpectralTransform(order, std::move(rows), TransformKind::identity);
}

void SpectralTransform::forward(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < order_; ++i) {
        const double* row = rows_.data() + i * order_;
        double acc = 0.0;
        for (std::size_t k = 0; k < order_; ++k) acc += row[k] * x[k];
        y[i] = acc;
    }
}

void SpectralTransform::inverse(std::span<const double> y, std::span<double> x) const {
    for (std::size_t k = 0; k < order_; ++k) x[k] = 0.0;
    for (std::size_t i = 0; i < order_; ++i) {
        const double* row = rows_.data() + i * order_;
        const double yi = y[i];
        for (std::size_t k = 0; k < order_; ++k) x[k] += row[k] * yi;
    }
}

}  // namespace msfa
