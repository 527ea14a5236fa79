#include "zkrollup/field.hpp"

#include <ostream>

#include "zkrollup/errors.hpp"
#include "zkrollup/sha256.hpp"

namespace zkr {

namespace {

detail::Limbs limbs_from_be(std::span<const std::uint8_t, FieldElement::kByteLength> bytes) {
    detail::Limbs out{};
    for (std::size_t i = 0; i < 32; ++i) {
        const std::size_t limb = (31 - i) / 8;
        const std::size_t shift = ((31 - i) % 8) * 8;
        out[limb] |= static_cast<std::uint64_t>(bytes[i]) << shift;
    }
    return out;
}

}  // namespace

FieldElement FieldElement::from_bytes(std::span<const std::uint8_t, kByteLength> bytes) {
    const auto limbs = limbs_from_be(bytes);
    if (detail::geq(limbs, detail::kModulus)) {
        throw ValidationError("field element encoding is not canonical (>= modulus)");
    }
    return from_canonical_limbs(limbs);
}

FieldElement FieldElement::from_bytes_reduce(std::span<const std::uint8_t, kByteLength> bytes) {
    auto limbs = limbs_from_be(bytes);
    // 2^256 < 6p: at most five subtractions.
    while (detail::geq(limbs, detail::kModulus)) detail::sub_in_place(limbs, detail::kModulus);
    return from_canonical_limbs(limbs);
}

FieldElement FieldElement::from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty() || hex.size() > 2 * kByteLength) {
        throw ValidationError("field element hex must have 1..64 digits");
    }
    std::string padded(2 * kByteLength - hex.size(), '0');
    padded.append(hex);
    const std::string raw = zkr::from_hex(padded);
    Bytes bytes{};
    for (std::size_t i = 0; i < kByteLength; ++i) bytes[i] = static_cast<std::uint8_t>(raw[i]);
    return from_bytes(bytes);
}

FieldElement::Bytes FieldElement::to_bytes() const {
    const auto limbs = to_limbs();
    Bytes out{};
    for (std::size_t i = 0; i < 32; ++i) {
        const std::size_t limb = (31 - i) / 8;
        const std::size_t shift = ((31 - i) % 8) * 8;
        out[i] = static_cast<std::uint8_t>(limbs[limb] >> shift);
    }
    return out;
}

std::string FieldElement::to_hex() const { return zkr::to_hex(to_bytes()); }

FieldElement FieldElement::inverse() const {
    // p - 2, limb by limb, most significant first.
    detail::Limbs e = detail::kModulus;
    detail::sub_in_place(e, {2, 0, 0, 0});
    FieldElement acc = one();
    for (int limb = 3; limb >= 0; --limb) {
        for (int bit = 63; bit >= 0; --bit) {
            acc = acc.square();
            if ((e[limb] >> bit) & 1U) acc *= *this;
        }
    }
    return acc;
}

std::ostream& operator<<(std::ostream& os, const FieldElement& f) { return os << f.to_hex(); }

}  // namespace zkr
