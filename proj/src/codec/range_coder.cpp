#include "range_coder.hpp"

#include <string>

#include "msfa/error.hpp"

namespace msfa::detail {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
constexpr int kMoveBits = 5;
}  // namespace

void RangeEncoder::shift_low() {
    if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
        const auto carry = static_cast<std::uint8_t>(low_ >> 32);
        std::uint8_t temp = cache_;
        do {
            const auto byte = static_cast<std::uint8_t>(temp + carry);
            if (first_) {
                first_ = false;  // always zero, the decoder assumes it
            } else {
                out_.push_back(byte);
            }
            temp = 0xFF;
        } while (--cache_size_ != 0);
        cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++cache_size_;
    low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::encode(std::uint16_t& prob, int bit) {
    const std::uint32_t bound = (range_ >> kProbBits) * prob;
    if (bit == 0) {
        range_ = bound;
        prob = static_cast<std::uint16_t>(prob + (((1u << kProbBits) - prob) >> kMoveBits));
    } else {
        low_ += bound;
        range_ -= bound;
        prob = static_cast<std::uint16_t>(prob - (prob >> kMoveBits));
    }
    while (range_ < kTop) {
        range_ <<= 8;
        shift_low();
    }
}

void RangeEncoder::finish() {
    for (int i = 0; i < 5; ++i) shift_low();
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> in, std::size_t base_offset)
    : in_(in), base_offset_(base_offset) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next();
}

std::uint8_t RangeDecoder::next() {
    if (pos_ >= in_.size()) {
        throw FormatError("truncated entropy-coded data at byte offset " +
                          std::to_string(base_offset_ + pos_));
    }
    return in_[pos_++];
}

int RangeDecoder::decode(std::uint16_t& prob) {
    const std::uint32_t bound = (range_ >> kProbBits) * prob;
    int bit;
    if (code_ < bound) {
        range_ = bound;
        prob = static_cast<std::uint16_t>(prob + (((1u << kProbBits) - prob) >> kMoveBits));
        bit = 0;
    } else {
        code_ -= bound;
        range_ -= bound;
        prob = static_cast<std::uint16_t>(prob - (prob >> kMoveBits));
        bit = 1;
    }
    while (range_ < kTop) {
        range_ <<= 8;
        code_ = (code_ << 8) | next();
    }
    return bit;
}

}  // namespace msfa::detail
