#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "msfa/parallel.hpp"
#include "msfa/pipeline.hpp"

namespace msfa {

std::vector<double> default_sweep_rates() { return {0.05, 0.1, 0.25, 0.5, 1.0, 2.0}; }

std::vector<RdPoint> rd_sweep(const SpectralCube& cube, const MsfaPattern& pattern, std::span<const CodingMode> modes,
                              std::span<const double> rates, const PipelineOptions& options) {
    std::vector<double> sorted(rates.begin(), rates.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<RdPoint> points(modes.size() * sorted.size());
    parallel_for(points.size(), [&](std::size_t i) {
        const CodingMode mode = modes[i / sorted.size()];
        points[i] = run_mode(cube, pattern, mode, sorted[i % sorted.size()], options).point;
    });
    return points;
}

namespace {

std::string format_db(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string csv_mode(CodingMode mode) {
    std::string s = to_string(mode);
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

}  // namespace

std::string rd_csv(std::span<const RdPoint> points, bool include_timing) {
    std::string out = "mode,target_bpppb,achieved_bpppb,dpsnr_db,opsnr_db,wall_ms\n";
    char buf[64];
    for (const RdPoint& p : points) {
        out += csv_mode(p.mode);
        std::snprintf(buf, sizeof buf, ",%g,%.6f,", p.target_bpppb, p.achieved_bpppb);
        out += buf;
        out += format_db(p.dpsnr_db);
        out += ',';
        if (p.opsnr_db) out += format_db(*p.opsnr_db);
        std::snprintf(buf, sizeof buf, ",%.1f\n", include_timing ? p.wall_ms : 0.0);
        out += buf;
    }
    return out;
}

std::string rd_svg(std::span<const RdPoint> points) {
    constexpr double width = 640, height = 420, left = 60, right = 150, top = 20, bottom = 50;
    double xmax = 0.0, ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    std::map<CodingMode, std::vector<std::pair<double, double>>> series;
    for (const RdPoint& p : points) {
        if (!std::isfinite(p.dpsnr_db)) continue;
        series[p.mode].emplace_back(p.achieved_bpppb, p.dpsnr_db);
        xmax = std::max(xmax, p.achieved_bpppb);
        ymin = std::min(ymin, p.dpsnr_db);
        ymax = std::max(ymax, p.dpsnr_db);
    }
    if (series.empty()) {
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (ymax - ymin < 1.0) ymax = ymin + 1.0;
    ymin = std::floor(ymin);
    ymax = std::ceil(ymax);
    auto sx = [&](double x) { return left + (width - left - right) * x / xmax; };
    auto sy = [&](double y) { return top + (height - top - bottom) * (ymax - y) / (ymax - ymin); };

    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    char buf[256];
    std::string svg;
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
                  "font-size=\"12\">\n",
                  width, height);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#444\"/>\n", left,
                  top, width - left - right, height - top - bottom);
    svg += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">bpppb</text>\n",
                  left + (width - left - right) / 2, height - 12);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"14\" y=\"%.1f\" transform=\"rotate(-90 14 %.1f)\" text-anchor=\"middle\">DPSNR (dB)</text>\n",
                  top + (height - top - bottom) / 2, top + (height - top - bottom) / 2);
    svg += buf;
    for (int i = 0; i <= 4; ++i) {
        const double x = xmax * i / 4, y = ymin + (ymax - ymin) * i / 4;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.2f</text>\n", sx(x),
                      height - bottom + 16, x);
        svg += buf;
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.1f</text>\n", left - 6,
                      sy(y) + 4, y);
        svg += buf;
    }
    std::size_t k = 0;
    for (const auto& [mode, pts] : series) {
        const char* colour = colours[k % std::size(colours)];
        svg += "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"";
        svg += colour;
        svg += "\" points=\"";
        for (const auto& [x, y] : pts) {
            std::snprintf(buf, sizeof buf, "%.1f,%.1f ", sx(x), sy(y));
            svg += buf;
        }
        svg += "\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">%s</text>\n", width - right + 10,
                      top + 16 + 18.0 * static_cast<double>(k), colour, to_string(mode).c_str());
        svg += buf;
        ++k;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace msfa
