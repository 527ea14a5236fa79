#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace zkr {

namespace detail {

using Limbs = std::array<std::uint64_t, 4>;  // little-endian 64-bit limbs
using u128 = unsigned __int128;

/// BN254 (alt_bn128) scalar field prime; shared by Poseidon and the rollup circuit.
inline constexpr Limbs kModulus = {
    0x43e1f593f0000001ULL,
    0x2833e84879b97091ULL,
    0xb85045b68181585dULL,
    0x30644e72e131a029ULL,
};

constexpr bool geq(const Limbs& a, const Limbs& b) {
    for (int i = 3; i >= 0; --i) {
        if (a[i] != b[i]) return a[i] > b[i];
    }
    return true;
}

constexpr std::uint64_t sub_in_place(Limbs& a, const Limbs& b) {
    std::uint64_t borrow = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const u128 diff = static_cast<u128>(a[i]) - b[i] - borrow;
        a[i] = static_cast<std::uint64_t>(diff);
        borrow = static_cast<std::uint64_t>(diff >> 64) & 1U;
    }
    return borrow;
}

constexpr std::uint64_t add_in_place(Limbs& a, const Limbs& b) {
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        const u128 sum = static_cast<u128>(a[i]) + b[i] + carry;
        a[i] = static_cast<std::uint64_t>(sum);
        carry = static_cast<std::uint64_t>(sum >> 64);
    }
    return carry;
}

// Inputs < p < 2^254, so the sum never carries out of 256 bits.
constexpr Limbs mod_add(Limbs a, const Limbs& b) {
    add_in_place(a, b);
    if (geq(a, kModulus)) sub_in_place(a, kModulus);
    return a;
}

constexpr Limbs mod_sub(Limbs a, const Limbs& b) {
    if (sub_in_place(a, b) != 0) add_in_place(a, kModulus);
    return a;
}

// -p^{-1} mod 2^64 by Newton iteration.
constexpr std::uint64_t montgomery_inv() {
    std::uint64_t x = 1;
    for (int i = 0; i < 6; ++i) x *= 2 - kModulus[0] * x;
    return ~x + 1;
}

// 2^k mod p by repeated doubling.
constexpr Limbs pow2_mod(int k) {
    Limbs v = {1, 0, 0, 0};
    for (int i = 0; i < k; ++i) v = mod_add(v, v);
    return v;
}

inline constexpr std::uint64_t kInv = montgomery_inv();
inline constexpr Limbs kR = pow2_mod(256);   // Montgomery form of 1
inline constexpr Limbs kR2 = pow2_mod(512);  // converts into Montgomery form

// CIOS Montgomery multiplication: a * b * 2^-256 mod p.
constexpr Limbs mont_mul(const Limbs& a, const Limbs& b) {
    std::uint64_t t[6] = {0, 0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < 4; ++i) {
        std::uint64_t carry = 0;
        for (std::size_t j = 0; j < 4; ++j) {
            const u128 acc = static_cast<u128>(a[j]) * b[i] + t[j] + carry;
            t[j] = static_cast<std::uint64_t>(acc);
            carry = static_cast<std::uint64_t>(acc >> 64);
        }
        u128 acc = static_cast<u128>(t[4]) + carry;
        t[4] = static_cast<std::uint64_t>(acc);
        t[5] = static_cast<std::uint64_t>(acc >> 64);

        const std::uint64_t m = t[0] * kInv;
        acc = static_cast<u128>(m) * kModulus[0] + t[0];
        carry = static_cast<std::uint64_t>(acc >> 64);
        for (std::size_t j = 1; j < 4; ++j) {
            acc = static_cast<u128>(m) * kModulus[j] + t[j] + carry;
            t[j - 1] = static_cast<std::uint64_t>(acc);
            carry = static_cast<std::uint64_t>(acc >> 64);
        }
        acc = static_cast<u128>(t[4]) + carry;
        t[3] = static_cast<std::uint64_t>(acc);
        t[4] = t[5] + static_cast<std::uint64_t>(acc >> 64);
    }
    Limbs r = {t[0], t[1], t[2], t[3]};
    if (geq(r, kModulus)) sub_in_place(r, kModulus);
    return r;
}

}  // namespace detail

/// Element of the BN254 scalar field, stored in Montgomery form.
///
/// The canonical encoding is 32 bytes big-endian (ceil(254 / 8)); every
/// constructor either rejects non-canonical input or reduces explicitly.
class FieldElement {
public:
    static constexpr std::size_t kByteLength = 32;
    using Bytes = std::array<std::uint8_t, kByteLength>;

    constexpr FieldElement() = default;

    static constexpr FieldElement zero() { return FieldElement{}; }
    static constexpr FieldElement one() { return from_montgomery(detail::kR); }
    static constexpr FieldElement from_u64(std::uint64_t v) {
        return from_canonical_limbs({v, 0, 0, 0});
    }

    /// Requires limbs < p.
    static constexpr FieldElement from_canonical_limbs(const detail::Limbs& limbs) {
        return from_montgomery(detail::mont_mul(limbs, detail::kR2));
    }

    /// Big-endian canonical bytes; throws ValidationError if the value is >= p.
    static FieldElement from_bytes(std::span<const std::uint8_t, kByteLength> bytes);
    /// Interprets 32 big-endian bytes as an integer and reduces it mod p.
    static FieldElement from_bytes_reduce(std::span<const std::uint8_t, kByteLength> bytes);
    /// Up to 64 hex digits, optional 0x prefix; throws ValidationError if >= p.
    static FieldElement from_hex(std::string_view hex);

    constexpr detail::Limbs to_limbs() const {
        return detail::mont_mul(mont_, detail::Limbs{1, 0, 0, 0});
    }
    Bytes to_bytes() const;
    /// 64 lowercase hex digits of the canonical bytes, no prefix.
    std::string to_hex() const;

    constexpr bool is_zero() const { return mont_ == detail::Limbs{}; }

    constexpr FieldElement operator+(const FieldElement& o) const {
        return from_montgomery(detail::mod_add(mont_, o.mont_));
    }
    constexpr FieldElement operator-(const FieldElement& o) const {
        return from_montgomery(detail::mod_sub(mont_, o.mont_));
    }
    constexpr FieldElement operator-() const { return zero() - *this; }
    constexpr FieldElement operator*(const FieldElement& o) const {
        return from_montgomery(detail::mont_mul(mont_, o.mont_));
    }
    constexpr FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
    constexpr FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
    constexpr FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

    constexpr FieldElement square() const { return *this * *this; }

    constexpr FieldElement pow(std::uint64_t e) const {
        FieldElement acc = one();
        FieldElement base = *this;
        while (e != 0) {
            if (e & 1U) acc *= base;
            base = base.square();
            e >>= 1U;
        }
        return acc;
    }

    /// Multiplicative inverse via Fermat; the inverse of zero is zero.
    FieldElement inverse() const;

    friend constexpr bool operator==(const FieldElement&, const FieldElement&) = default;

private:
    static constexpr FieldElement from_montgomery(const detail::Limbs& m) {
        FieldElement f;
        f.mont_ = m;
        return f;
    }

    detail::Limbs mont_{};
};

std::ostream& operator<<(std::ostream& os, const FieldElement& f);

}  // namespace zkr
