#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "zkrollup/field.hpp"

namespace zkr {

/// Width-3 Poseidon instance over the BN254 scalar field (capacity 1, rate 2).
///
/// Text format (one directive per line, `#` starts a comment):
///
///     field <hex modulus>
///     width 3
///     full_rounds <n>
///     partial_rounds <n>
///     alpha 5
///     rc <hex>                      width * (full + partial) lines, round-major
///     mds <hex> <hex> <hex>         width lines
///     kat <hex x> <hex y> <hex out> known answer for hash(x, y)
///     checksum sha256 <hex>         over every byte before this line; must be last
struct PoseidonParams {
    static constexpr std::size_t kWidth = 3;
    using Matrix = std::array<std::array<FieldElement, kWidth>, kWidth>;

    std::size_t full_rounds = 0;
    std::size_t partial_rounds = 0;
    std::vector<FieldElement> round_constants;
    Matrix mds{};

    FieldElement kat_x;
    FieldElement kat_y;
    FieldElement kat_out;

    std::size_t total_rounds() const { return full_rounds + partial_rounds; }

    /// Parses and validates (checksum, shape, MDS invertibility, known answer).
    /// Any failure throws ConfigError.
    static PoseidonParams parse(std::string_view text);

    /// The instance compiled into the library, validated once on first use.
    static const PoseidonParams& builtin();

    /// Structural checks only; parse() additionally runs the known answer.
    void validate() const;
};

/// Poseidon permutation applied to [0, x, y]; returns the first state word.
FieldElement poseidon_hash(const PoseidonParams& params, const FieldElement& x,
                           const FieldElement& y);

/// 2-to-1 compression used for every Merkle node: poseidon_hash with the
/// built-in parameters.
inline FieldElement poseidon2(const FieldElement& x, const FieldElement& y) {
    return poseidon_hash(PoseidonParams::builtin(), x, y);
}

/// Determinant-based invertibility check over the field.
bool is_invertible(const PoseidonParams::Matrix& m);

}  // namespace zkr
