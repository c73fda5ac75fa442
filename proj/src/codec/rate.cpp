#include <algorithm>
#include <cmath>
#include <limits>

#include "msfa/codec.hpp"
#include "msfa/parallel.hpp"

namespace msfa {

namespace {

constexpr double kAcceptTolerance = 0.02;
constexpr double kAimTolerance = 0.01;
constexpr int kMaxEvaluations = 60;

struct Evaluation {
    double log_lambda = 0.0;
    std::vector<std::vector<std::uint8_t>> segments;
    std::size_t bits = 0;
};

}  // namespace

RateAllocation allocate_rate(const std::vector<SubbandSet>& planes, const RateTarget& target,
                             std::span<const double> plane_weights) {
    if (planes.empty()) throw ValidationError("nothing to code");
    if (!(target.bpppb > 0.0) || !std::isfinite(target.bpppb)) {
        throw ValidationError("target rate must be a positive number of bits per pixel per band");
    }
    if (target.pixel_band_count == 0) throw ValidationError("pixel-band count must be positive");
    const int levels = planes[0].levels;
    for (const auto& p : planes) {
        if (p.levels != levels || p.width != planes[0].width || p.height != planes[0].height) {
            throw ValidationError("planes differ in geometry");
        }
    }

    RateAllocation alloc;
    alloc.subband_weights = subband_synthesis_norms(levels);
    if (plane_weights.empty()) {
        alloc.plane_weights.assign(planes.size(), 1.0);
    } else {
        if (plane_weights.size() != planes.size()) throw ValidationError("one weight per plane is required");
        for (double w : plane_weights)
            if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("plane weights must be positive");
        alloc.plane_weights.assign(plane_weights.begin(), plane_weights.end());
    }

    const std::size_t nsub = alloc.subband_weights.size();
    const std::size_t jobs = planes.size() * nsub;

    // Smallest possible stream: every non-empty subband codes as one byte.
    std::size_t min_bytes = target.fixed_overhead_bytes + jobs * kSegmentLengthBytes;
    double lambda_zero = 0.0;  // above this every index is zero
    for (std::size_t p = 0; p < planes.size(); ++p) {
        for (std::size_t s = 0; s < nsub; ++s) {
            const auto& band = planes[p].bands[s];
            if (band.size() > 0) ++min_bytes;
            double peak = 0.0;
            for (double c : band.values) peak = std::max(peak, std::abs(c));
            lambda_zero = std::max(lambda_zero, peak * alloc.plane_weights[p] * alloc.subband_weights[s]);
        }
    }
    const double target_bits = target.target_bits();
    if (static_cast<double>(min_bytes * 8) > target_bits) {
        throw InfeasibleRateError("target of " + std::to_string(target.bpppb) +
                                  " bpppb is below the minimum stream size of " +
                                  std::to_string(static_cast<double>(min_bytes * 8) /
                                                 static_cast<double>(target.pixel_band_count)) +
                                  " bpppb");
    }

    auto evaluate = [&](double log_lambda) {
        Evaluation e;
        e.log_lambda = log_lambda;
        e.segments.resize(jobs);
        const double lambda = std::exp(log_lambda);
        parallel_for(jobs, [&](std::size_t j) {
            const std::size_t p = j / nsub, s = j % nsub;
            const double step = lambda / (alloc.plane_weights[p] * alloc.subband_weights[s]);
            e.segments[j] = entropy_encode(quantize(planes[p].bands[s], step));
        });
        std::size_t bytes = target.fixed_overhead_bytes;
        for (const auto& seg : e.segments) bytes += seg.size() + kSegmentLengthBytes;
        e.bits = bytes * 8;
        ++alloc.evaluations;
        return e;
    };
    auto rel_error = [&](const Evaluation& e) { return std::abs(static_cast<double>(e.bits) / target_bits - 1.0); };

    auto finish = [&](Evaluation&& e, bool saturated) {
        alloc.lambda = std::exp(e.log_lambda);
        alloc.segments = std::move(e.segments);
        alloc.total_bits = e.bits;
        alloc.saturated = saturated;
        return alloc;
    };

    if (lambda_zero == 0.0) {
        // All coefficients are zero; nothing to allocate.
        return finish(evaluate(0.0), static_cast<double>(min_bytes * 8) < target_bits * (1.0 - kAcceptTolerance));
    }

    // Bracket in the log domain: hi gives too few bits, lo too many.
    const double log_floor = std::log(lambda_zero) - std::log(static_cast<double>(kMaxMagnitude) / 2.0);
    double x_hi = std::log(lambda_zero) + 1e-9;
    double x_lo = x_hi;
    Evaluation best;
    double best_err = std::numeric_limits<double>::infinity();
    auto consider = [&](Evaluation& e) {
        const double err = rel_error(e);
        if (err < best_err) {
            best_err = err;
            best = std::move(e);
        }
    };

    double g_hi = std::log(static_cast<double>(min_bytes * 8)) - std::log(target_bits);
    double g_lo = 0.0;
    for (;;) {
        x_lo = std::max(x_lo - std::log(8.0), log_floor);
        Evaluation e = evaluate(x_lo);
        g_lo = std::log(static_cast<double>(e.bits)) - std::log(target_bits);
        const bool enough = g_lo >= 0.0;
        if (rel_error(e) <= kAimTolerance) return finish(std::move(e), false);
        consider(e);
        if (enough) break;
        x_hi = x_lo;
        g_hi = g_lo;
        if (x_lo <= log_floor) {
            // Even the finest admissible quantiser spends fewer bits than asked.
            return finish(std::move(best), best_err > kAcceptTolerance);
        }
    }

    // Illinois regula falsi on log(bits) - log(target) as a function of log(lambda).
    int side = 0;
    while (alloc.evaluations < kMaxEvaluations && x_hi - x_lo > 1e-12) {
        double x = x_hi - g_hi * (x_hi - x_lo) / (g_hi - g_lo);
        if (!(x > x_lo && x < x_hi)) x = 0.5 * (x_lo + x_hi);
        Evaluation e = evaluate(x);
        const double g = std::log(static_cast<double>(e.bits)) - std::log(target_bits);
        if (rel_error(e) <= kAimTolerance) return finish(std::move(e), false);
        consider(e);
        if (g >= 0.0) {
            x_lo = x;
            g_lo = g;
            if (side == -1) g_hi /= 2.0;
            side = -1;
        } else {
            x_hi = x;
            g_hi = g;
            if (side == 1) g_lo /= 2.0;
            side = 1;
        }
    }
    return finish(std::move(best), false);
}

}  // namespace msfa
