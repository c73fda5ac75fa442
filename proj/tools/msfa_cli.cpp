// msfa: command-line front end for the MSFA compression library.
//
// Exit codes: 0 success, 1 usage error (bad flags, invalid parameters,
// infeasible rate), 2 data or format error (unreadable input, corrupt stream).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "msfa/codec.hpp"
#include "msfa/core.hpp"
#include "msfa/datagen.hpp"
#include "msfa/demosaic.hpp"
#include "msfa/pattern.hpp"
#include "msfa/pipeline.hpp"
#include "msfa/spectral.hpp"

namespace fs = std::filesystem;
using namespace msfa;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(item);
    return out;
}

double parse_number(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ValidationError("cannot parse " + what + " '" + s + "'");
    }
}

// A built-in set name or a comma-separated list of nanometre values.
std::vector<double> resolve_wavelengths(const std::string& spec) {
    if (spec.find(',') == std::string::npos && !spec.empty() && !std::isdigit(static_cast<unsigned char>(spec[0]))) {
        return named_wavelengths(spec);
    }
    std::vector<double> out;
    for (const auto& item : split(spec, ',')) out.push_back(parse_number(item, "wavelength"));
    return out;
}

// A JSON pattern file or a built-in name combined with wavelengths.
MsfaPattern resolve_pattern(const std::string& spec, const std::vector<double>& wavelengths) {
    if (spec.ends_with(".json") || fs::exists(spec)) return load_pattern(spec);
    return named_pattern(spec, wavelengths);
}

void write_text(const fs::path& path, const std::string& text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string db(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

// Spectral model and pipeline flags shared by several subcommands.
struct ModelFlags {
    double rho_f = MarkovParams{}.rho_f;
    double rho_d = MarkovParams{}.rho_d;
    double step_nm = MarkovParams{}.spectral_step_nm;
    std::string distance = "within-block";

    void add(CLI::App* app) {
        app->add_option("--rho-f", rho_f, "spectral correlation per --spectral-step-nm")->capture_default_str();
        app->add_option("--rho-d", rho_d, "spatial correlation per pixel")->capture_default_str();
        app->add_option("--spectral-step-nm", step_nm, "wavelength step rho-f refers to")->capture_default_str();
        app->add_option("--distance", distance, "within-block or periodic")->capture_default_str();
    }
    MarkovParams params() const {
        MarkovParams p{rho_f, rho_d, step_nm};
        p.validate();
        return p;
    }
    DistanceConvention convention() const { return distance_convention_from_string(distance); }
};

struct PipelineFlags {
    std::string demosaic = "banddiff";
    int reference_band = -1;
    int levels = 0;
    std::string klt_statistic = "covariance";
    std::string weighting = "uniform";

    void add(CLI::App* app) {
        app->add_option("--demosaic", demosaic, "bilinear or banddiff")->capture_default_str();
        app->add_option("--reference-band", reference_band, "0-based band-difference reference (default: median)");
        app->add_option("--levels", levels, "wavelet levels (default 5 for eai/direct, 3 for ebi)");
        app->add_option("--klt-statistic", klt_statistic, "covariance or correlation")->capture_default_str();
        app->add_option("--plane-weighting", weighting, "uniform or eigenvalue")->capture_default_str();
    }
    PipelineOptions options(const ModelFlags& model) const {
        PipelineOptions o;
        o.demosaic = demosaic_method_from_string(demosaic);
        if (reference_band >= 0) o.reference_band = static_cast<std::size_t>(reference_band);
        o.markov = model.params();
        o.distance = model.convention();
        o.levels = levels;
        o.weighting = plane_weighting_from_string(weighting);
        if (klt_statistic == "covariance") {
            o.klt_statistic = KltStatistic::covariance;
        } else if (klt_statistic == "correlation") {
            o.klt_statistic = KltStatistic::correlation;
        } else {
            throw ValidationError("unknown KLT statistic '" + klt_statistic + "'");
        }
        return o;
    }
};

// Expands --config file.json into flags placed before the command-line ones,
// so explicit flags win. Keys are flag names without the leading dashes.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] != "--config") continue;
        if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a file name");
        const fs::path path = args[i + 1];
        const auto bytes = read_file(path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(bytes.begin(), bytes.end());
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("malformed config file " + path.string() + ": " + e.what());
        }
        if (!j.is_object()) throw FormatError("config file must hold a JSON object");
        std::vector<std::string> extra;
        for (const auto& [key, value] : j.items()) {
            const std::string flag = "--" + key;
            if (value.is_boolean()) {
                if (value.get<bool>()) extra.push_back(flag);
            } else if (value.is_array()) {
                std::string joined;
                for (const auto& v : value) {
                    if (!joined.empty()) joined += ',';
                    joined += v.is_string() ? v.get<std::string>() : v.dump();
                }
                extra.push_back(flag);
                extra.push_back(joined);
            } else {
                extra.push_back(flag);
                extra.push_back(value.is_string() ? value.get<std::string>() : value.dump());
            }
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        // After the subcommand path (the leading non-flag words) so CLI11 binds them there.
        std::size_t at = 0;
        while (at < args.size() && !args[at].starts_with("-")) ++at;
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), extra.begin(), extra.end());
        break;
    }
    return args;
}

void print_header(const StreamHeader& h, std::size_t total_bytes) {
    std::cout << "format: MSCJ v" << h.version << "\n"
              << "mode: " << to_string(h.mode) << "\n"
              << "image: " << h.width << " x " << h.height << " x " << h.bands << " bands, " << int(h.bit_depth)
              << " bit\n"
              << "pattern: " << to_string(h.pattern.kind()) << " " << h.pattern.block_size() << "x"
              << h.pattern.block_size() << "\n"
              << "demosaic: " << to_string(h.demosaic) << " (reference band " << h.reference_band << ")\n"
              << "planes: " << h.plane_count << " of " << h.plane_width << " x " << h.plane_height << ", "
              << int(h.levels) << " levels\n"
              << "transform: " << (h.transform ? to_string(h.transform->kind()) : std::string("none")) << "\n";
    if (h.markov) {
        std::cout << "markov: rho_f " << h.markov->rho_f << " per " << h.markov->spectral_step_nm << " nm, rho_d "
                  << h.markov->rho_d << "\n";
    }
    std::cout << "lambda: " << h.lambda << "\n"
              << "header bytes: " << header_size(h) << "\n"
              << "total bytes: " << total_bytes << "\n"
              << "bpppb: "
              << static_cast<double>(total_bytes) * 8.0 / (double(h.width) * double(h.height) * double(h.bands))
              << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"MSFA mosaic compression: encode before or after interpolation"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // datagen
    auto* gen = app.add_subcommand("datagen", "write a synthetic cube");
    std::string gen_kind = "markov", gen_out, gen_wl = "fig8";
    std::size_t gen_w = 512, gen_h = 512;
    int gen_depth = 12;
    double gen_rho_d = 0.95, gen_rho_f = 0.995;
    std::uint64_t gen_seed = 1;
    gen->add_option("--kind", gen_kind, "markov or edges")->capture_default_str();
    gen->add_option("--out", gen_out, "output cube (.msc1)")->required();
    gen->add_option("--width", gen_w)->capture_default_str();
    gen->add_option("--height", gen_h)->capture_default_str();
    gen->add_option("--wavelengths", gen_wl, "set name or comma list in nm")->capture_default_str();
    gen->add_option("--bit-depth", gen_depth)->capture_default_str();
    gen->add_option("--rho-d", gen_rho_d, "spatial lag-1 correlation")->capture_default_str();
    gen->add_option("--rho-f", gen_rho_f, "spectral correlation per nanometre")->capture_default_str();
    gen->add_option("--seed", gen_seed)->required();

    // encode
    auto* enc = app.add_subcommand("encode", "compress a cube into an MSCJ stream");
    std::string enc_mode = "ebi-fixed", enc_in, enc_pattern = "raster4x4", enc_out;
    double enc_rate = 0.5;
    ModelFlags enc_model;
    PipelineFlags enc_pipe;
    enc->add_option("--mode", enc_mode, "eai, ebi-klt, ebi-fixed, ebi-identity or direct")->capture_default_str();
    enc->add_option("--in", enc_in, "input cube (.msc1)")->required();
    enc->add_option("--pattern", enc_pattern, "pattern name or JSON file")->capture_default_str();
    enc->add_option("--rate", enc_rate, "target bits per pixel per band")->capture_default_str();
    enc->add_option("--out", enc_out, "output stream (.mscj)")->required();
    enc_model.add(enc);
    enc_pipe.add(enc);

    // decode
    auto* dec = app.add_subcommand("decode", "decode and demosaic an MSCJ stream");
    std::string dec_in, dec_out, dec_original;
    dec->add_option("--in", dec_in, "input stream")->required();
    dec->add_option("--out", dec_out, "output cube (.msc1)");
    dec->add_option("--original", dec_original, "original cube; reports DPSNR and OPSNR");

    // inspect
    auto* ins = app.add_subcommand("inspect", "print a stream header without decoding the payload");
    std::string ins_in;
    ins->add_option("stream", ins_in, "MSCJ stream")->required();

    // analyze
    auto* ana = app.add_subcommand("analyze", "model and statistics tools");
    ana->require_subcommand(1);

    auto* cg = ana->add_subcommand("coding-gain", "coding gain of the fixed model for a pattern");
    std::string cg_pattern = "raster4x4", cg_wl = "fig8";
    ModelFlags cg_model;
    bool cg_verbose = false;
    cg->add_option("--pattern", cg_pattern)->capture_default_str();
    cg->add_option("--wavelengths", cg_wl)->capture_default_str();
    cg->add_flag("--verbose", cg_verbose, "also print the determinant form");
    cg_model.add(cg);

    auto* est = ana->add_subcommand("estimate", "estimate rho_d and rho_f (per nm) of a cube");
    std::string est_in;
    est->add_option("--in", est_in)->required();

    auto* tr = ana->add_subcommand("transform", "export a transform matrix as JSON");
    std::string tr_kind = "fixed", tr_pattern = "raster4x4", tr_wl = "fig8", tr_in, tr_out;
    ModelFlags tr_model;
    tr->add_option("--kind", tr_kind, "fixed or klt")->capture_default_str();
    tr->add_option("--pattern", tr_pattern)->capture_default_str();
    tr->add_option("--wavelengths", tr_wl)->capture_default_str();
    tr->add_option("--in", tr_in, "cube for a KLT trained on its pseudo-MSI");
    tr->add_option("--out", tr_out, "output JSON (default: stdout)");
    tr_model.add(tr);

    auto* cor = ana->add_subcommand("correlation", "compare pseudo-MSI correlation with the fixed model");
    std::string cor_in, cor_pattern = "raster4x4";
    ModelFlags cor_model;
    cor->add_option("--in", cor_in)->required();
    cor->add_option("--pattern", cor_pattern)->capture_default_str();
    cor_model.add(cor);

    // sweep
    auto* sw = app.add_subcommand("sweep", "rate-distortion sweep to CSV");
    std::string sw_in, sw_pattern = "raster4x4", sw_modes = "eai,ebi-klt,ebi-fixed,direct", sw_rates, sw_out, sw_svg;
    std::string sw_bands;
    bool sw_no_timing = false;
    ModelFlags sw_model;
    PipelineFlags sw_pipe;
    sw->add_option("--in", sw_in, "input cube")->required();
    sw->add_option("--pattern", sw_pattern)->capture_default_str();
    sw->add_option("--modes", sw_modes)->capture_default_str();
    sw->add_option("--rates", sw_rates, "comma list in bpppb (default 0.05,0.1,0.25,0.5,1,2)");
    sw->add_option("--bands", sw_bands, "wavelength subset: set name or comma list");
    sw->add_option("--out", sw_out, "CSV file (default: stdout)");
    sw->add_option("--svg", sw_svg, "optional DPSNR plot");
    sw->add_flag("--no-timing", sw_no_timing, "write 0 in wall_ms so runs compare byte for byte");
    sw_model.add(sw);
    sw_pipe.add(sw);

    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    }

    if (*gen) {
        const auto wl = resolve_wavelengths(gen_wl);
        SpectralCube cube;
        if (gen_kind == "markov") {
            cube = generate_markov_cube(gen_w, gen_h, wl, gen_depth, gen_rho_d, gen_rho_f, gen_seed);
        } else if (gen_kind == "edges") {
            cube = generate_edge_cube(gen_w, gen_h, wl, gen_depth, gen_seed);
        } else {
            throw ValidationError("unknown cube kind '" + gen_kind + "' (markov, edges)");
        }
        store_cube(cube, gen_out);
        return 0;
    }
    if (*enc) {
        const CodingMode mode = coding_mode_from_string(enc_mode);
        const PipelineOptions options = enc_pipe.options(enc_model);
        const SpectralCube cube = load_cube(enc_in);
        const MsfaPattern pattern = resolve_pattern(enc_pattern, cube.wavelengths());
        const CodedStream s = encode_cube(cube, pattern, mode, enc_rate, options);
        write_file_atomic(enc_out, s.bytes);
        const double achieved = static_cast<double>(s.bytes.size()) * 8.0 /
                                (double(s.header.width) * double(s.header.height) * double(s.header.bands));
        std::cout << "bytes " << s.bytes.size() << "\nbpppb " << achieved << "\n";
        if (s.rate_saturated) std::cerr << "warning: target exceeds what the finest quantiser can spend\n";
        return 0;
    }
    if (*dec) {
        const auto bytes = read_file(dec_in);
        const DecodedImage img = decode_image(bytes);
        if (!dec_out.empty()) store_cube(img.cube, dec_out);
        if (!dec_original.empty()) {
            const SpectralCube original = load_cube(dec_original);
            const MosaickedImage m = mosaic(original, img.header.pattern);
            const SpectralCube reference = demosaic(m, img.header.demosaic, img.header.reference_band);
            std::cout << "dpsnr_db " << db(psnr(reference, img.cube)) << "\n";
            std::cout << "opsnr_db " << db(psnr(original.crop(m.width, m.height), img.cube)) << "\n";
        }
        return 0;
    }
    if (*ins) {
        const auto bytes = read_file(ins_in);
        print_header(read_header(bytes), bytes.size());
        return 0;
    }
    if (*cg) {
        const MsfaPattern pattern = resolve_pattern(cg_pattern, resolve_wavelengths(cg_wl));
        const CodingGain g = coding_gain(fixed_corr_matrix(pattern, cg_model.params(), cg_model.convention()));
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", g.db);
        std::cout << buf << "\n";
        if (cg_verbose) std::cout << "det_form " << g.det_form_db << "\n";
        return 0;
    }
    if (*est) {
        const SpectralCube cube = load_cube(est_in);
        std::cout << "rho_d " << estimate_rho_d(cube) << "\n";
        std::cout << "rho_f_per_nm " << estimate_rho_f(cube) << "\n";
        return 0;
    }
    if (*tr) {
        std::string text;
        if (tr_kind == "fixed") {
            const MsfaPattern pattern = resolve_pattern(tr_pattern, resolve_wavelengths(tr_wl));
            const MarkovParams p = tr_model.params();
            text = transform_to_json(fixed_transform(pattern, p, tr_model.convention()), p);
        } else if (tr_kind == "klt") {
            if (tr_in.empty()) throw ValidationError("a KLT needs --in");
            const SpectralCube cube = load_cube(tr_in);
            const MsfaPattern pattern = resolve_pattern(tr_pattern, cube.wavelengths());
            text = transform_to_json(klt_from_data(structure_convert(mosaic(cube, pattern))));
        } else {
            throw ValidationError("unknown transform kind '" + tr_kind + "' (fixed, klt)");
        }
        if (tr_out.empty()) {
            std::cout << text << "\n";
        } else {
            write_text(tr_out, text + "\n");
        }
        return 0;
    }
    if (*cor) {
        const SpectralCube cube = load_cube(cor_in);
        const MsfaPattern pattern = resolve_pattern(cor_pattern, cube.wavelengths());
        const auto v = validate_model(structure_convert(mosaic(cube, pattern)), cor_model.params(),
                                      cor_model.convention());
        std::cout << "correlation_mse " << v.correlation.mse << "\n"
                  << "correlation_pearson " << v.correlation.pearson << "\n"
                  << "covariance_mse " << v.covariance_mse << "\n";
        return 0;
    }
    if (*sw) {
        const PipelineOptions options = sw_pipe.options(sw_model);
        SpectralCube cube = load_cube(sw_in);
        if (!sw_bands.empty()) {
            const auto wl = resolve_wavelengths(sw_bands);
            cube = select_wavelengths(cube, wl);
        }
        const MsfaPattern pattern = resolve_pattern(sw_pattern, cube.wavelengths());
        std::vector<CodingMode> modes;
        for (const auto& m : split(sw_modes, ',')) modes.push_back(coding_mode_from_string(m));
        std::vector<double> rates;
        for (const auto& r : split(sw_rates, ',')) rates.push_back(parse_number(r, "rate"));
        if (rates.empty()) rates = default_sweep_rates();
        const auto points = rd_sweep(cube, pattern, modes, rates, options);
        const std::string csv = rd_csv(points, !sw_no_timing);
        if (sw_out.empty()) {
            std::cout << csv;
        } else {
            write_text(sw_out, csv);
        }
        if (!sw_svg.empty()) write_text(sw_svg, rd_svg(points));
        return 0;
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const InfeasibleRateError& e) {
        std::cerr << "infeasible rate: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
