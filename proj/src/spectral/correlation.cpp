#include <algorithm>
#include <cmath>

#include "msfa/spectral.hpp"

namespace msfa {

void MarkovParams::validate() const {
    if (!(rho_f > 0.0 && rho_f < 1.0)) throw ValidationError("rho_f must lie in (0, 1)");
    if (!(rho_d > 0.0 && rho_d < 1.0)) throw ValidationError("rho_d must lie in (0, 1)");
    if (!(spectral_step_nm > 0.0) || !std::isfinite(spectral_step_nm)) {
        throw ValidationError("spectral step must be a positive number of nanometres");
    }
}

PlaneViews<Sample> planes_of(const SpectralCube& cube) {
    PlaneViews<Sample> out;
    for (std::size_t n = 0; n < cube.bands(); ++n) out.push_back(cube.plane(n));
    return out;
}

PlaneViews<Sample> planes_of(const PseudoMsi& pseudo) {
    PlaneViews<Sample> out;
    for (std::size_t p = 0; p < pseudo.plane_count(); ++p) out.push_back(pseudo.plane(p));
    return out;
}

namespace {

template <typename T>
SymmetricMatrix centred_moments(const PlaneViews<T>& planes) {
    const std::size_t n = planes.size();
    if (n == 0) throw DegenerateStatisticsError("no planes to correlate");
    const std::size_t count = planes[0].size();
    for (const auto& p : planes)
        if (p.size() != count) throw ValidationError("planes differ in size");
    if (count < 2) throw DegenerateStatisticsError("need at least two spatial positions");

    std::vector<double> mean(n, 0.0);
    for (std::size_t b = 0; b < n; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += static_cast<double>(planes[b][i]);
        mean[b] = s / static_cast<double>(count);
    }
    // Centre once so the O(N^2 M) loop touches contiguous doubles.
    std::vector<double> centred(n * count);
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t i = 0; i < count; ++i)
            centred[b * count + i] = static_cast<double>(planes[b][i]) - mean[b];

    SymmetricMatrix m(n);
    for (std::size_t a = 0; a < n; ++a) {
        const double* xa = centred.data() + a * count;
        for (std::size_t b = a; b < n; ++b) {
            const double* xb = centred.data() + b * count;
            double s = 0.0;
            for (std::size_t i = 0; i < count; ++i) s += xa[i] * xb[i];
            m.set(a, b, s / static_cast<double>(count));
        }
    }
    return m;
}

SymmetricMatrix normalise(const SymmetricMatrix& cov) {
    const std::size_t n = cov.order();
    std::vector<double> sd(n);
    for (std::size_t b = 0; b < n; ++b) {
        if (!(cov(b, b) > 0.0)) {
            throw DegenerateStatisticsError("band " + std::to_string(b + 1) + " has zero variance");
        }
        sd[b] = std::sqrt(cov(b, b));
    }
    SymmetricMatrix r(n);
    for (std::size_t a = 0; a < n; ++a) {
        r.set(a, a, 1.0);
        for (std::size_t b = a + 1; b < n; ++b) r.set(a, b, std::clamp(cov(a, b) / (sd[a] * sd[b]), -1.0, 1.0));
    }
    return r;
}

}  // namespace

SymmetricMatrix sample_covariance(const PlaneViews<Sample>& planes) { return centred_moments(planes); }
SymmetricMatrix sample_covariance(const PlaneViews<double>& planes) { return centred_moments(planes); }
SymmetricMatrix sample_correlation(const PlaneViews<Sample>& planes) { return normalise(centred_moments(planes)); }
SymmetricMatrix sample_correlation(const PlaneViews<double>& planes) { return normalise(centred_moments(planes)); }
SymmetricMatrix sample_correlation(const SpectralCube& cube) { return sample_correlation(planes_of(cube)); }
SymmetricMatrix sample_correlation(const PseudoMsi& pseudo) { return sample_correlation(planes_of(pseudo)); }

SymmetricMatrix spectral_corr_matrix(const SymmetricMatrix& wavelength_gaps, const MarkovParams& p) {
    p.validate();
    const std::size_t n = wavelength_gaps.order();
    SymmetricMatrix r(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b)
            r.set(a, b, std::pow(p.rho_f, wavelength_gaps(a, b) / p.spectral_step_nm));
    return r;
}

SymmetricMatrix spatial_corr_matrix(const SymmetricMatrix& distances, const MarkovParams& p) {
    p.validate();
    const std::size_t n = distances.order();
    SymmetricMatrix r(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) r.set(a, b, std::pow(p.rho_d, distances(a, b)));
    return r;
}

SymmetricMatrix fixed_corr_matrix(const MsfaPattern& pattern, const MarkovParams& p,
                                  DistanceConvention convention) {
    const auto geometry = plane_geometry(pattern, convention);
    return hadamard(spectral_corr_matrix(geometry.wavelength_gap, p),
                    spatial_corr_matrix(geometry.distance, p));
}

namespace {

// log(det) through an LDL^T factorisation; independent of the eigen route.
double log_determinant(const SymmetricMatrix& r) {
    const std::size_t n = r.order();
    std::vector<double> l(n * n, 0.0);
    std::vector<double> d(n, 0.0);
    double log_det = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double dj = r(j, j);
        for (std::size_t k = 0; k < j; ++k) dj -= l[j * n + k] * l[j * n + k] * d[k];
        if (!(dj > 0.0)) throw SingularMatrixError("matrix is not positive definite");
        d[j] = dj;
        log_det += std::log(dj);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = r(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k] * d[k];
            l[i * n + j] = v / dj;
        }
    }
    return log_det;
}

}  // namespace

CodingGain coding_gain(const SymmetricMatrix& r) {
    const std::size_t n = r.order();
    const double log_det = log_determinant(r);
    if (log_det <= std::log(1e-300)) throw SingularMatrixError("determinant is not above 1e-300");

    const auto eig = symmetric_eigendecomposition(r);
    double sum = 0.0, log_prod = 0.0;
    for (double v : eig.values) {
        if (!(v > 0.0)) throw SingularMatrixError("matrix has a non-positive eigenvalue");
        sum += v;
        log_prod += std::log(v);
    }
    const double nn = static_cast<double>(n);
    CodingGain g;
    g.db = 10.0 * std::log10(sum / nn) - 10.0 / nn * log_prod / std::log(10.0);
    g.det_form_db = -10.0 / nn * log_det / std::log(10.0);

    bool unit_diagonal = true;
    for (std::size_t i = 0; i < n; ++i) unit_diagonal = unit_diagonal && std::abs(r(i, i) - 1.0) <= 1e-12;
    if (unit_diagonal && std::abs(g.db - g.det_form_db) > 1e-9) {
        throw Error("coding gain forms disagree: " + std::to_string(g.db) + " vs " +
                    std::to_string(g.det_form_db));
    }
    return g;
}

CorrelationComparison compare_correlations(const SymmetricMatrix& empirical, const SymmetricMatrix& model) {
    if (empirical.order() != model.order()) throw ValidationError("matrices differ in order");
    const auto a = empirical.entries();
    const auto b = model.entries();
    const double count = static_cast<double>(a.size());
    double mse = 0.0, ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mse += (a[i] - b[i]) * (a[i] - b[i]);
        ma += a[i];
        mb += b[i];
    }
    ma /= count;
    mb /= count;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    CorrelationComparison out;
    out.mse = mse / count;
    if (saa == 0.0 && sbb == 0.0) {
        out.pearson = 1.0;  // both constant: identical up to offset
    } else if (saa == 0.0 || sbb == 0.0) {
        out.pearson = 0.0;
    } else {
        out.pearson = sab / std::sqrt(saa * sbb);
    }
    return out;
}

ModelValidation validate_model(const PseudoMsi& pseudo, const MarkovParams& p, DistanceConvention convention) {
    const auto planes = planes_of(pseudo);
    const auto cov = sample_covariance(planes);
    const auto corr = normalise(cov);
    const auto model = fixed_corr_matrix(pseudo.pattern, p, convention);
    ModelValidation out;
    out.correlation = compare_correlations(corr, model);
    const std::size_t n = cov.order();
    double mse = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const double implied = model(a, b) * std::sqrt(cov(a, a) * cov(b, b));
            mse += (cov(a, b) - implied) * (cov(a, b) - implied);
        }
    }
    out.covariance_mse = mse / static_cast<double>(n * n);
    return out;
}

}  // namespace msfa
