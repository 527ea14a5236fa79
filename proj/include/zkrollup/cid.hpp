#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "zkrollup/sha256.hpp"

namespace zkr {

/// Content identifier: CIDv1, multihash sha2-256, multibase base32 (lowercase,
/// unpadded, prefix 'b'). Identifiers minted here always use the raw codec
/// (0x55); parse() also accepts dag-pb (0x70) so CIDs from an IPFS daemon's
/// chunked imports remain well-formed asset references.
class Cid {
public:
    static constexpr std::uint64_t kRawCodec = 0x55;
    static constexpr std::uint64_t kDagPbCodec = 0x70;

    /// CID of `bytes` under the raw codec.
    static Cid of(std::string_view bytes);
    /// Throws ValidationError on anything but a canonical CIDv1/sha2-256 text.
    static Cid parse(std::string_view text);
    static bool is_valid(std::string_view text) noexcept;

    const std::string& text() const { return text_; }
    const Sha256Digest& digest() const { return digest_; }
    std::uint64_t codec() const { return codec_; }

    /// True iff `bytes` hash to this identifier's digest.
    bool matches(std::string_view bytes) const;

    friend bool operator==(const Cid& a, const Cid& b) { return a.text_ == b.text_; }
    friend std::strong_ordering operator<=>(const Cid& a, const Cid& b) {
        return a.text_ <=> b.text_;
    }

private:
    Cid() = default;

    std::string text_;
    Sha256Digest digest_{};
    std::uint64_t codec_ = kRawCodec;
};

inline Cid cid_of(std::string_view bytes) { return Cid::of(bytes); }

std::string base32_encode(std::string_view bytes);
/// Lowercase RFC 4648 alphabet, no padding; throws ValidationError.
std::string base32_decode(std::string_view text);

}  // namespace zkr
