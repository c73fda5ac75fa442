#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msfa/core.hpp"
#include "msfa/pattern.hpp"

namespace msfa {

// First-order Markov parameters of the fixed transform. rho_f is the
// spectral correlation per `spectral_step_nm` of centre-wavelength gap and
// rho_d the spatial correlation per pixel.
struct MarkovParams {
    double rho_f = 0.995;
    double rho_d = 0.95;
    double spectral_step_nm = 10.0;

    // Throws ValidationError unless 0 < rho < 1 and the step is positive.
    void validate() const;
    // rho_f = 0.995 per 10 nm, rho_d = 0.95 per pixel.
    static MarkovParams defaults() { return {}; }
    // Parameters measured per nanometre, as returned by estimate_rho_f.
    static MarkovParams per_nanometre(double rho_f, double rho_d) { return {rho_f, rho_d, 1.0}; }

    friend bool operator==(const MarkovParams&, const MarkovParams&) = default;
};

enum class KltStatistic : std::uint8_t {
    covariance = 1,   // mean-centred second moments
    correlation = 2,  // mean-centred, unit-variance normalised
};

// Row-major planes of equal size viewed as N spectral channels.
template <typename T>
using PlaneViews = std::vector<std::span<const T>>;

PlaneViews<Sample> planes_of(const SpectralCube& cube);
PlaneViews<Sample> planes_of(const PseudoMsi& pseudo);

// N x N Pearson correlation over spatial positions. Needs at least two
// positions and non-zero variance in every plane.
SymmetricMatrix sample_correlation(const PlaneViews<Sample>& planes);
SymmetricMatrix sample_correlation(const PlaneViews<double>& planes);
SymmetricMatrix sample_correlation(const SpectralCube& cube);
SymmetricMatrix sample_correlation(const PseudoMsi& pseudo);
SymmetricMatrix sample_covariance(const PlaneViews<Sample>& planes);
SymmetricMatrix sample_covariance(const PlaneViews<double>& planes);

SpectralTransform klt_from_data(const PlaneViews<Sample>& planes,
                                KltStatistic statistic = KltStatistic::covariance);
SpectralTransform klt_from_data(const SpectralCube& cube,
                                KltStatistic statistic = KltStatistic::covariance);
SpectralTransform klt_from_data(const PseudoMsi& pseudo,
                                KltStatistic statistic = KltStatistic::covariance);

// Entry (m, n) = rho_f ^ (F[m][n] / spectral_step_nm).
SymmetricMatrix spectral_corr_matrix(const SymmetricMatrix& wavelength_gaps, const MarkovParams& p);
// Entry (m, n) = rho_d ^ D[m][n].
SymmetricMatrix spatial_corr_matrix(const SymmetricMatrix& distances, const MarkovParams& p);
// Hadamard product of the two model matrices over the pattern's planes.
SymmetricMatrix fixed_corr_matrix(const MsfaPattern& pattern, const MarkovParams& p,
                                  DistanceConvention convention = DistanceConvention::within_block);
// Eigenvectors of fixed_corr_matrix; depends only on the pattern and p.
SpectralTransform fixed_transform(const MsfaPattern& pattern, const MarkovParams& p,
                                  DistanceConvention convention = DistanceConvention::within_block);

// Real-valued planes after a spectral transform, with the transform used.
struct TransformedCube {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;  // planar
    SpectralTransform transform;

    std::size_t planes() const { return transform.order(); }
    std::size_t plane_size() const { return width * height; }
    std::span<const double> plane(std::size_t p) const {
        return std::span<const double>(values).subspan(p * plane_size(), plane_size());
    }
    PlaneViews<double> views() const;
};

TransformedCube apply_transform(const PlaneViews<Sample>& planes, std::size_t width,
                                std::size_t height, const SpectralTransform& t);
TransformedCube apply_transform(const SpectralCube& cube, const SpectralTransform& t);
TransformedCube apply_transform(const PseudoMsi& pseudo, const SpectralTransform& t);
// Planar reals x = T^T y.
std::vector<double> invert_transform(const TransformedCube& tc);

struct CodingGain {
    double db = 0.0;          // arithmetic / geometric mean of eigenvalues
    double det_form_db = 0.0; // -10/N log10 det(R), equal to db for unit-diagonal R
};

// Throws SingularMatrixError when det(R) <= 1e-300 or R is not positive definite.
CodingGain coding_gain(const SymmetricMatrix& r);

// Mean over bands of the lag-1 autocorrelation of each row-major flattened band.
double estimate_rho_d(const SpectralCube& cube);
// Mean over adjacent band pairs of corr(n, n-1) ^ (1 / wavelength gap in nm).
double estimate_rho_f(const SpectralCube& cube);

struct CorrelationComparison {
    double mse = 0.0;
    double pearson = 0.0;
};

// MSE over all N^2 entries and the Pearson correlation of the flattened matrices.
CorrelationComparison compare_correlations(const SymmetricMatrix& empirical, const SymmetricMatrix& model);

// Empirical pseudo-MSI statistics against the fixed model: correlation-level
// comparison plus the MSE between the empirical covariance and the model
// rescaled by the empirical standard deviations.
struct ModelValidation {
    CorrelationComparison correlation;
    double covariance_mse = 0.0;
};
ModelValidation validate_model(const PseudoMsi& pseudo, const MarkovParams& p,
                               DistanceConvention convention = DistanceConvention::within_block);

// Transform JSON: {order, kind, rows, eigenvalues, params?}.
std::string transform_to_json(const SpectralTransform& t, const std::optional<MarkovParams>& params = {});
SpectralTransform transform_from_json(const std::string& text);
void store_transform(const SpectralTransform& t, const std::filesystem::path& path,
                     const std::optional<MarkovParams>& params = {});
SpectralTransform load_transform(const std::filesystem::path& path);

}  // namespace msfa
