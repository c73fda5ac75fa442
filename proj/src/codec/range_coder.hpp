#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace msfa::detail {

// Adaptive binary range coder in the LZMA style: 32-bit range, carry
// propagation through a cached byte, 15-bit probabilities adapted with
// shift 5. The always-zero first byte LZMA emits is dropped.
inline constexpr int kProbBits = 15;
inline constexpr std::uint16_t kProbInit = 1u << (kProbBits - 1);

class RangeEncoder {
public:
    explicit RangeEncoder(std::vector<std::uint8_t>& out) : out_(out) {}
    void encode(std::uint16_t& prob, int bit);
    void finish();

private:
    void shift_low();

    std::vector<std::uint8_t>& out_;
    std::uint64_t low_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::uint8_t cache_ = 0;
    std::uint64_t cache_size_ = 1;
    bool first_ = true;
};

class RangeDecoder {
public:
    // `base_offset` is only used in error messages.
    RangeDecoder(std::span<const std::uint8_t> in, std::size_t base_offset);
    int decode(std::uint16_t& prob);

private:
    std::uint8_t next();

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    std::size_t base_offset_ = 0;
    std::uint32_t range_ = 0xFFFFFFFFu;
    std::uint32_t code_ = 0;
};

}  // namespace msfa::detail
