#include <algorithm>
#include <cmath>

#include "msfa/bytes.hpp"
#include "msfa/codec.hpp"
#include "msfa/parallel.hpp"

namespace msfa {

std::string to_string(CodingMode mode) {
    switch (mode) {
        case CodingMode::eai: return "eai";
        case CodingMode::ebi_klt: return "ebi-klt";
        case CodingMode::ebi_fixed: return "ebi-fixed";
        case CodingMode::direct: return "direct";
        case CodingMode::ebi_identity: return "ebi-identity";
    }
    return "unknown";
}

CodingMode coding_mode_from_string(const std::string& name) {
    std::string n = name;
    std::replace(n.begin(), n.end(), '_', '-');
    for (auto m : {CodingMode::eai, CodingMode::ebi_klt, CodingMode::ebi_fixed, CodingMode::direct,
                   CodingMode::ebi_identity}) {
        if (to_string(m) == n) return m;
    }
    throw ValidationError("unknown coding mode '" + name + "' (eai, ebi-klt, ebi-fixed, ebi-identity, direct)");
}

bool is_ebi(CodingMode mode) {
    return mode == CodingMode::ebi_klt || mode == CodingMode::ebi_fixed || mode == CodingMode::ebi_identity;
}

namespace {

constexpr std::string_view kMagic = "MSCJ";
constexpr std::uint16_t kVersion = 1;

void write_header(ByteWriter& w, const StreamHeader& h) {
    w.tag(kMagic);
    w.u16(h.version);
    w.u8(static_cast<std::uint8_t>(h.mode));
    w.u8(static_cast<std::uint8_t>(h.demosaic));
    w.u32(h.reference_band);
    w.u32(h.width);
    w.u32(h.height);
    w.u32(h.bands);
    w.u8(h.bit_depth);

    w.u8(static_cast<std::uint8_t>(h.pattern.kind()));
    w.u32(static_cast<std::uint32_t>(h.pattern.block_size()));
    for (int a : h.pattern.assignment()) w.u16(static_cast<std::uint16_t>(a));
    w.u32(static_cast<std::uint32_t>(h.pattern.bands()));
    for (double v : h.pattern.wavelengths()) w.f64(v);

    w.u8(h.transform ? 1 : 0);
    if (h.transform) {
        const auto& t = *h.transform;
        w.u8(static_cast<std::uint8_t>(t.kind()));
        w.u32(static_cast<std::uint32_t>(t.order()));
        for (double v : t.rows()) w.f64(v);
        w.u32(static_cast<std::uint32_t>(t.eigenvalues().size()));
        for (double v : t.eigenvalues()) w.f64(v);
    }
    w.u8(h.markov ? 1 : 0);
    if (h.markov) {
        w.f64(h.markov->rho_f);
        w.f64(h.markov->rho_d);
        w.f64(h.markov->spectral_step_nm);
    }

    w.u32(h.plane_count);
    w.u32(h.plane_width);
    w.u32(h.plane_height);
    w.u8(h.levels);
    w.f64(h.lambda);
    for (double v : h.plane_weights) w.f64(v);
    w.u32(static_cast<std::uint32_t>(h.subband_weights.size()));
    for (double v : h.subband_weights) w.f64(v);
}

std::string at_offset(const ByteReader& r) { return " at byte offset " + std::to_string(r.offset()); }

StreamHeader parse_header(ByteReader& r) {
    if (!r.tag(kMagic)) throw FormatError("not an MSCJ stream (bad magic at byte offset 0)");
    StreamHeader h;
    h.version = r.u16();
    if (h.version != kVersion) {
        throw FormatError("unsupported stream version " + std::to_string(h.version) + " at byte offset 4");
    }
    const std::uint8_t mode = r.u8();
    if (mode < 1 || mode > 5) throw FormatError("unknown coding mode " + std::to_string(mode) + at_offset(r));
    h.mode = static_cast<CodingMode>(mode);
    const std::uint8_t dm = r.u8();
    if (dm < 1 || dm > 2) throw FormatError("unknown demosaicking method " + std::to_string(dm) + at_offset(r));
    h.demosaic = static_cast<DemosaicMethod>(dm);
    h.reference_band = r.u32();
    h.width = r.u32();
    h.height = r.u32();
    h.bands = r.u32();
    h.bit_depth = r.u8();

    try {
        const std::uint8_t kind = r.u8();
        if (kind < 1 || kind > 6) throw FormatError("unknown pattern kind" + at_offset(r));
        const std::uint32_t block = r.u32();
        if (block == 0 || block > 64) throw FormatError("pattern block size out of range" + at_offset(r));
        std::vector<int> assignment(std::size_t{block} * block);
        for (auto& a : assignment) a = r.u16();
        const std::uint32_t nw = r.u32();
        if (nw > r.remaining() / 8) throw FormatError("wavelength count exceeds stream size" + at_offset(r));
        std::vector<double> wl(nw);
        for (auto& v : wl) v = r.f64();
        h.pattern = MsfaPattern(static_cast<PatternKind>(kind), block, std::move(assignment), std::move(wl));

        if (r.u8()) {
            const std::uint8_t tk = r.u8();
            if (tk < 1 || tk > 3) throw FormatError("unknown transform kind" + at_offset(r));
            const std::uint32_t order = r.u32();
            if (order > 4096 || std::size_t{order} * order > r.remaining() / 8) {
                throw FormatError("transform order exceeds stream size" + at_offset(r));
            }
            std::vector<double> rows(std::size_t{order} * order);
            for (auto& v : rows) v = r.f64();
            const std::uint32_t ne = r.u32();
            if (ne > r.remaining() / 8) throw FormatError("eigenvalue count exceeds stream size" + at_offset(r));
            std::vector<double> eig(ne);
            for (auto& v : eig) v = r.f64();
            h.transform = SpectralTransform(order, std::move(rows), static_cast<TransformKind>(tk), std::move(eig));
        }
        if (r.u8()) {
            MarkovParams p;
            p.rho_f = r.f64();
            p.rho_d = r.f64();
            p.spectral_step_nm = r.f64();
            p.validate();
            h.markov = p;
        }
    } catch (const ValidationError& e) {
        throw FormatError(std::string("invalid stream header: ") + e.what() + at_offset(r));
    }

    h.plane_count = r.u32();
    h.plane_width = r.u32();
    h.plane_height = r.u32();
    h.levels = r.u8();
    h.lambda = r.f64();
    if (h.plane_count > r.remaining() / 8) throw FormatError("plane count exceeds stream size" + at_offset(r));
    h.plane_weights.resize(h.plane_count);
    for (auto& v : h.plane_weights) v = r.f64();
    const std::uint32_t nsub = r.u32();
    if (nsub > r.remaining() / 8) throw FormatError("subband count exceeds stream size" + at_offset(r));
    h.subband_weights.resize(nsub);
    for (auto& v : h.subband_weights) v = r.f64();

    if (h.levels < 1 || h.levels > 30) throw FormatError("decomposition levels out of range" + at_offset(r));
    if (h.plane_count == 0 || h.plane_width == 0 || h.plane_height == 0) {
        throw FormatError("empty plane geometry" + at_offset(r));
    }
    if (h.bands != h.pattern.bands()) throw FormatError("band count disagrees with the pattern" + at_offset(r));
    if (h.bit_depth < 8 || h.bit_depth > 16) throw FormatError("bit depth out of range" + at_offset(r));
    if (h.reference_band >= h.bands) throw FormatError("reference band out of range" + at_offset(r));
    if (h.subband_weights.size() != 1 + 3 * std::size_t{h.levels}) {
        throw FormatError("subband weight count disagrees with the level count" + at_offset(r));
    }
    if (!(h.lambda > 0.0) || !std::isfinite(h.lambda)) throw FormatError("invalid lambda" + at_offset(r));
    for (double v : h.plane_weights)
        if (!(v > 0.0) || !std::isfinite(v)) throw FormatError("invalid plane weight" + at_offset(r));
    for (double v : h.subband_weights)
        if (!(v > 0.0) || !std::isfinite(v)) throw FormatError("invalid subband weight" + at_offset(r));
    if (h.transform && h.transform->order() != h.plane_count) {
        throw FormatError("transform order disagrees with the plane count" + at_offset(r));
    }
    return h;
}

}  // namespace

std::size_t header_size(const StreamHeader& header) {
    ByteWriter w;
    write_header(w, header);
    return w.size();
}

CodedStream encode_stream(const std::vector<RealGrid>& planes, StreamHeader header, double target_bpppb) {
    if (planes.size() != header.plane_count) throw ValidationError("plane count disagrees with the header");
    for (const auto& p : planes) {
        if (p.width != header.plane_width || p.height != header.plane_height) {
            throw ValidationError("plane dimensions disagree with the header");
        }
    }
    if (header.levels < 1) throw ValidationError("DWT needs at least one level");
    header.version = kVersion;
    if (header.plane_weights.empty()) header.plane_weights.assign(planes.size(), 1.0);
    header.subband_weights = subband_synthesis_norms(header.levels);
    header.lambda = 1.0;  // placeholder; the size does not depend on the value

    std::vector<SubbandSet> subbands(planes.size());
    parallel_for(planes.size(), [&](std::size_t p) { subbands[p] = dwt_forward(planes[p], header.levels); });

    RateTarget target;
    target.bpppb = target_bpppb;
    target.pixel_band_count = std::size_t{header.width} * header.height * header.bands;
    target.fixed_overhead_bytes = header_size(header);
    const RateAllocation alloc = allocate_rate(subbands, target, header.plane_weights);
    header.lambda = alloc.lambda;

    ByteWriter w;
    write_header(w, header);
    for (const auto& seg : alloc.segments) {
        w.u32(static_cast<std::uint32_t>(seg.size()));
        w.bytes(seg);
    }
    CodedStream out;
    out.header = std::move(header);
    out.bytes = w.take();
    out.rate_saturated = alloc.saturated;
    return out;
}

StreamHeader read_header(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    return parse_header(r);
}

DecodedStream decode_stream(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    DecodedStream out;
    out.header = parse_header(r);
    const StreamHeader& h = out.header;
    const auto layout = subband_layout(h.plane_width, h.plane_height, h.levels);

    struct Segment {
        std::span<const std::uint8_t> data;
        std::size_t offset;
    };
    std::vector<Segment> segments;
    for (std::size_t p = 0; p < h.plane_count; ++p) {
        for (std::size_t s = 0; s < layout.size(); ++s) {
            const std::uint32_t len = r.u32();
            const std::size_t offset = r.offset();
            segments.push_back({r.bytes(len, "subband payload"), offset});
        }
    }
    if (r.remaining() != 0) {
        throw FormatError(std::to_string(r.remaining()) + " trailing bytes at byte offset " +
                          std::to_string(r.offset()));
    }

    out.planes.resize(h.plane_count);
    parallel_for(h.plane_count, [&](std::size_t p) {
        SubbandSet set{h.plane_width, h.plane_height, h.levels, {}};
        for (std::size_t s = 0; s < layout.size(); ++s) {
            const Segment& seg = segments[p * layout.size() + s];
            IntGrid q;
            try {
                q = entropy_decode(seg.data, layout[s].width, layout[s].height);
            } catch (const FormatError& e) {
                throw FormatError("plane " + std::to_string(p) + " subband " + std::to_string(s) +
                                  " (segment at byte offset " + std::to_string(seg.offset) + "): " + e.what());
            }
            const double step = h.lambda / (h.plane_weights[p] * h.subband_weights[s]);
            set.bands.push_back(dequantize(q, step));
        }
        out.planes[p] = dwt_inverse(set);
    });
    return out;
}

}  // namespace msfa
