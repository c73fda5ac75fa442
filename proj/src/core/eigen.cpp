#include <algorithm>
#include <cmath>
#include <numeric>

#include "msfa/core.hpp"

namespace msfa {

namespace {

constexpr double kOffDiagonalTolerance = 1e-12;
constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const std::vector<double>& a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += a[i * n + j] * a[i * n + j];
    return std::sqrt(s);
}

double frobenius_norm(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

}  // namespace

Eigensystem symmetric_eigendecomposition(const SymmetricMatrix& m) {
    const std::size_t n = m.order();
    if (n == 0) throw ValidationError("eigendecomposition of an empty matrix");

    std::vector<double> a(m.entries().begin(), m.entries().end());
    for (double v : a)
        if (!std::isfinite(v)) throw ValidationError("matrix has non-finite entries");

    // v holds eigenvectors as columns while iterating.
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    const double scale = frobenius_norm(a);
    const double threshold = kOffDiagonalTolerance * std::max(scale, 1e-300);

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a, n) <= threshold) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                // Rutishauser's stable rotation: t = tan(theta), |theta| <= pi/4.
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    const double new_kp = akp - s * (akq + tau * akp);
                    const double new_kq = akq + s * (akp - tau * akq);
                    a[k * n + p] = a[p * n + k] = new_kp;
                    a[k * n + q] = a[q * n + k] = new_kq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = vkp - s * (vkq + tau * vkp);
                    v[k * n + q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });

    Eigensystem out;
    out.values.resize(n);
    out.vectors.resize(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t col = order[r];
        out.values[r] = a[col * n + col];
        double largest = 0.0;
        for (std::size_t k = 0; k < n; ++k) largest = std::max(largest, std::abs(v[k * n + col]));
        // First entry whose magnitude ties the largest decides the sign.
        double sign = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double e = v[k * n + col];
            if (std::abs(e) >= largest - 1e-12 * std::max(largest, 1.0)) {
                sign = e < 0.0 ? -1.0 : 1.0;
                break;
            }
        }
        for (std::size_t k = 0; k < n; ++k) out.vectors[r * n + k] = sign * v[k * n + col] + 0.0;
    }
    return out;
}

}  // namespace msfa
