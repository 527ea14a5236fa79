#include "zkrollup/cid.hpp"

#include <algorithm>

#include "zkrollup/errors.hpp"

namespace zkr {

namespace {

constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz234567";
constexpr std::uint8_t kVersion = 0x01;
constexpr std::uint8_t kSha256Code = 0x12;
constexpr std::uint8_t kSha256Length = 0x20;

std::string encode_fields(std::uint64_t codec, const Sha256Digest& digest) {
    std::string raw;
    raw.push_back(static_cast<char>(kVersion));
    raw.push_back(static_cast<char>(codec));  // both supported codecs fit in one varint byte
    raw.push_back(static_cast<char>(kSha256Code));
    raw.push_back(static_cast<char>(kSha256Length));
    raw.append(reinterpret_cast<const char*>(digest.data()), digest.size());
    return "b" + base32_encode(raw);
}

}  // namespace

std::string base32_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() * 8 + 4) / 5);
    std::uint32_t buffer = 0;
    int bits = 0;
    for (const char c : bytes) {
        buffer = (buffer << 8) | static_cast<std::uint8_t>(c);
        bits += 8;
        while (bits >= 5) {
            out.push_back(kAlphabet[(buffer >> (bits - 5)) & 0x1f]);
            bits -= 5;
        }
    }
    if (bits > 0) out.push_back(kAlphabet[(buffer << (5 - bits)) & 0x1f]);
    return out;
}

std::string base32_decode(std::string_view text) {
    std::string out;
    std::uint32_t buffer = 0;
    int bits = 0;
    for (const char c : text) {
        const auto idx = kAlphabet.find(c);
        if (idx == std::string_view::npos) throw ValidationError("invalid base32 character");
        buffer = (buffer << 5) | static_cast<std::uint32_t>(idx);
        bits += 5;
        if (bits >= 8) {
            out.push_back(static_cast<char>((buffer >> (bits - 8)) & 0xff));
            bits -= 8;
        }
    }
    if (bits >= 5 || (buffer & ((1U << bits) - 1)) != 0) {
        throw ValidationError("non-canonical base32 tail");
    }
    return out;
}

Cid Cid::of(std::string_view bytes) {
    Cid c;
    c.codec_ = kRawCodec;
    c.digest_ = sha256(bytes);
    c.text_ = encode_fields(c.codec_, c.digest_);
    return c;
}

Cid Cid::parse(std::string_view text) {
    if (text.size() < 2 || text.front() != 'b') {
        throw ValidationError("CID must be multibase base32 ('b' prefix)");
    }
    const std::string raw = base32_decode(text.substr(1));
    if (raw.size() != 4 + kSha256Length) throw ValidationError("CID has wrong length");
    const auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(raw[i]); };
    if (byte(0) != kVersion) throw ValidationError("only CIDv1 is supported");
    if (byte(1) != kRawCodec && byte(1) != kDagPbCodec) throw ValidationError("unsupported codec");
    if (byte(2) != kSha256Code || byte(3) != kSha256Length) {
        throw ValidationError("CID multihash must be sha2-256");
    }
    Cid c;
    c.codec_ = byte(1);
    std::copy(raw.begin() + 4, raw.end(), c.digest_.begin());
    c.text_ = std::string(text);
    if (encode_fields(c.codec_, c.digest_) != c.text_) throw ValidationError("non-canonical CID");
    return c;
}

bool Cid::is_valid(std::string_view text) noexcept {
    try {
        parse(text);
        return true;
    } catch (...) {
        return false;
    }
}

bool Cid::matches(std::string_view bytes) const { return sha256(bytes) == digest_; }

}  // namespace zkr
