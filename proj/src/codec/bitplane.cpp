#include <algorithm>
#include <bit>
#include <string>

#include "msfa/codec.hpp"
#include "range_coder.hpp"

namespace msfa {

namespace {

// Context set: significance split by whether any 8-neighbour is already
// significant, one sign context, one refinement context.
struct Contexts {
    std::uint16_t significance[2] = {detail::kProbInit, detail::kProbInit};
    std::uint16_t sign = detail::kProbInit;
    std::uint16_t refinement = detail::kProbInit;
};

// Significance map with a one-sample border so neighbour tests need no bounds checks.
class SignificanceMap {
public:
    SignificanceMap(std::size_t w, std::size_t h) : stride_(w + 2), flags_((w + 2) * (h + 2), 0) {}

    bool neighbour_significant(std::size_t r, std::size_t c) const {
        const std::uint8_t* above = &flags_[r * stride_ + c];
        const std::uint8_t* row = above + stride_;
        const std::uint8_t* below = row + stride_;
        return (above[0] | above[1] | above[2] | row[0] | row[2] | below[0] | below[1] | below[2]) != 0;
    }
    void mark(std::size_t r, std::size_t c) { flags_[(r + 1) * stride_ + c + 1] = 1; }

private:
    std::size_t stride_;
    std::vector<std::uint8_t> flags_;
};

}  // namespace

std::vector<std::uint8_t> entropy_encode(const IntGrid& q) {
    std::vector<std::uint8_t> out;
    if (q.size() == 0) return out;

    std::vector<std::uint64_t> mag(q.size());
    std::uint64_t max_mag = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const std::int64_t v = q.values[i];
        mag[i] = static_cast<std::uint64_t>(v < 0 ? -v : v);
        if (mag[i] >= static_cast<std::uint64_t>(kMaxMagnitude)) {
            throw ValidationError("quantiser index exceeds the coder's magnitude limit");
        }
        max_mag = std::max(max_mag, mag[i]);
    }
    const int planes = std::bit_width(max_mag);
    out.push_back(static_cast<std::uint8_t>(planes));
    if (planes == 0) return out;

    Contexts ctx;
    SignificanceMap sig(q.width, q.height);
    // Plane at which each coefficient became significant; -1 while insignificant.
    std::vector<std::int8_t> since(q.size(), -1);
    detail::RangeEncoder enc(out);
    for (int b = planes - 1; b >= 0; --b) {
        for (std::size_t r = 0; r < q.height; ++r) {
            for (std::size_t c = 0; c < q.width; ++c) {
                const std::size_t i = r * q.width + c;
                const int bit = static_cast<int>((mag[i] >> b) & 1u);
                if (since[i] < 0) {
                    enc.encode(ctx.significance[sig.neighbour_significant(r, c) ? 1 : 0], bit);
                    if (bit) {
                        enc.encode(ctx.sign, q.values[i] < 0 ? 1 : 0);
                        since[i] = static_cast<std::int8_t>(b);
                        sig.mark(r, c);
                    }
                } else if (since[i] > b) {
                    enc.encode(ctx.refinement, bit);
                }
            }
        }
    }
    enc.finish();
    return out;
}

IntGrid entropy_decode(std::span<const std::uint8_t> bytes, std::size_t width, std::size_t height) {
    IntGrid q(width, height);
    if (q.size() == 0) {
        if (!bytes.empty()) throw FormatError("payload present for an empty subband");
        return q;
    }
    if (bytes.empty()) throw FormatError("truncated subband payload at byte offset 0");
    const int planes = bytes[0];
    if (planes > static_cast<int>(std::bit_width(static_cast<std::uint64_t>(kMaxMagnitude - 1)))) {
        throw FormatError("bitplane count " + std::to_string(planes) + " out of range at byte offset 0");
    }
    if (planes == 0) return q;

    Contexts ctx;
    SignificanceMap sig(width, height);
    std::vector<std::int8_t> since(q.size(), -1);
    std::vector<std::uint64_t> mag(q.size(), 0);
    std::vector<std::uint8_t> negative(q.size(), 0);
    detail::RangeDecoder dec(bytes.subspan(1), 1);
    for (int b = planes - 1; b >= 0; --b) {
        for (std::size_t r = 0; r < height; ++r) {
            for (std::size_t c = 0; c < width; ++c) {
                const std::size_t i = r * width + c;
                if (since[i] < 0) {
                    if (dec.decode(ctx.significance[sig.neighbour_significant(r, c) ? 1 : 0])) {
                        negative[i] = static_cast<std::uint8_t>(dec.decode(ctx.sign));
                        mag[i] |= std::uint64_t{1} << b;
                        since[i] = static_cast<std::int8_t>(b);
                        sig.mark(r, c);
                    }
                } else if (since[i] > b) {
                    if (dec.decode(ctx.refinement)) mag[i] |= std::uint64_t{1} << b;
                }
            }
        }
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto v = static_cast<std::int64_t>(mag[i]);
        q.values[i] = negative[i] ? -v : v;
    }
    return q;
}

}  // namespace msfa
