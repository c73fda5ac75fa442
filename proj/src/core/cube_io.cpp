#include <fstream>
#include <iterator>
#include <system_error>

#include "msfa/bytes.hpp"
#include "msfa/core.hpp"

namespace msfa {

namespace {
constexpr std::string_view kCubeMagic = "MSC1";
}

std::vector<std::uint8_t> serialize_cube(const SpectralCube& cube) {
    ByteWriter w;
    w.tag(kCubeMagic);
    w.u32(static_cast<std::uint32_t>(cube.width()));
    w.u32(static_cast<std::uint32_t>(cube.height()));
    w.u32(static_cast<std::uint32_t>(cube.bands()));
    w.u32(static_cast<std::uint32_t>(cube.bit_depth()));
    for (double wl : cube.wavelengths()) w.f64(wl);
    w.buffer().reserve(w.size() + cube.samples().size() * 2);
    for (Sample s : cube.samples()) w.u16(s);
    return w.take();
}

SpectralCube parse_cube(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    if (!r.tag(kCubeMagic)) throw FormatError("malformed header: bad magic, expected MSC1");
    const std::uint32_t width = r.u32();
    const std::uint32_t height = r.u32();
    const std::uint32_t bands = r.u32();
    const std::uint32_t bit_depth = r.u32();
    if (width == 0 || height == 0 || bands == 0) {
        throw FormatError("malformed header: zero width, height or band count");
    }
    if (bit_depth < 8 || bit_depth > 16) {
        throw FormatError("malformed header: bit depth " + std::to_string(bit_depth) +
                          " outside [8, 16]");
    }
    if (r.remaining() < std::size_t{bands} * 8) {
        throw FormatError("wavelength count mismatch: header declares " + std::to_string(bands) +
                          " bands but only " + std::to_string(r.remaining() / 8) +
                          " wavelengths are present");
    }
    std::vector<double> wavelengths(bands);
    for (auto& wl : wavelengths) wl = r.f64();

    const std::size_t count = std::size_t{width} * height * bands;
    if (r.remaining() < count * 2) {
        throw FormatError("truncated planes: expected " + std::to_string(count * 2) +
                          " sample bytes, found " + std::to_string(r.remaining()));
    }
    if (r.remaining() > count * 2) {
        throw FormatError("malformed file: " + std::to_string(r.remaining() - count * 2) +
                          " trailing bytes after sample planes");
    }
    std::vector<Sample> samples(count);
    for (auto& s : samples) s = r.u16();
    try {
        return SpectralCube(width, height, static_cast<int>(bit_depth), std::move(wavelengths),
                            std::move(samples));
    } catch (const ValidationError& e) {
        throw FormatError(std::string("malformed cube: ") + e.what());
    }
}

SpectralCube load_cube(const std::filesystem::path& path) { return parse_cube(read_file(path)); }

void store_cube(const SpectralCube& cube, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_cube(cube));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("short write to '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

}  // namespace msfa
