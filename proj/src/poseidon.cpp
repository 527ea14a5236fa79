#include "zkrollup/poseidon.hpp"

#include <sstream>
#include <string>

#include "zkrollup/errors.hpp"
#include "zkrollup/sha256.hpp"

namespace zkr {

namespace detail {
extern const std::string_view kEmbeddedPoseidonParams;
}

namespace {

constexpr std::uint64_t kAlpha = 5;
constexpr std::string_view kModulusHex =
    "30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001";

FieldElement sbox(const FieldElement& v) {
    const FieldElement sq = v.square();
    return sq.square() * v;
}

FieldElement parse_element(const std::string& token, std::size_t line_no) {
    try {
        return FieldElement::from_hex(token);
    } catch (const ValidationError& e) {
        throw ConfigError("poseidon params line " + std::to_string(line_no) + ": " + e.what());
    }
}

std::size_t parse_count(const std::string& token, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("poseidon params line " + std::to_string(line_no) + ": bad integer '" +
                          token + "'");
    }
}

}  // namespace

PoseidonParams PoseidonParams::parse(std::string_view text) {
    const std::size_t checksum_pos = text.rfind("\nchecksum ");
    if (checksum_pos == std::string_view::npos) {
        throw ConfigError("poseidon params: missing checksum line");
    }
    const std::string_view body = text.substr(0, checksum_pos + 1);
    std::istringstream checksum_line(std::string(text.substr(checksum_pos + 1)));
    std::string keyword, algo, expected, trailing;
    checksum_line >> keyword >> algo >> expected;
    if (algo != "sha256" || (checksum_line >> trailing)) {
        throw ConfigError("poseidon params: malformed checksum line");
    }
    if (to_hex(sha256(body)) != expected) {
        throw ConfigError("poseidon params: checksum mismatch (corrupted parameter file)");
    }

    PoseidonParams p;
    std::size_t mds_rows = 0;
    bool have_field = false, have_width = false, have_alpha = false, have_kat = false;
    std::istringstream in{std::string(body)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        std::vector<std::string> args;
        for (std::string tok; ls >> tok;) args.push_back(tok);
        const auto expect_args = [&](std::size_t n) {
            if (args.size() != n) {
                throw ConfigError("poseidon params line " + std::to_string(line_no) + ": '" + key +
                                  "' expects " + std::to_string(n) + " values");
            }
        };

        if (key == "field") {
            expect_args(1);
            // The modulus itself does not fit in a field element; compare as text.
            std::string digits = args[0];
            if (digits.starts_with("0x")) digits.erase(0, 2);
            if (digits != kModulusHex) throw ConfigError("poseidon params: unsupported field modulus");
            have_field = true;
        } else if (key == "width") {
            expect_args(1);
            if (parse_count(args[0], line_no) != kWidth) {
                throw ConfigError("poseidon params: only width 3 is supported");
            }
            have_width = true;
        } else if (key == "full_rounds") {
            expect_args(1);
            p.full_rounds = parse_count(args[0], line_no);
        } else if (key == "partial_rounds") {
            expect_args(1);
            p.partial_rounds = parse_count(args[0], line_no);
        } else if (key == "alpha") {
            expect_args(1);
            if (parse_count(args[0], line_no) != kAlpha) {
                throw ConfigError("poseidon params: only alpha 5 is supported");
            }
            have_alpha = true;
        } else if (key == "rc") {
            expect_args(1);
            p.round_constants.push_back(parse_element(args[0], line_no));
        } else if (key == "mds") {
            expect_args(kWidth);
            if (mds_rows >= kWidth) throw ConfigError("poseidon params: too many mds rows");
            for (std::size_t j = 0; j < kWidth; ++j) {
                p.mds[mds_rows][j] = parse_element(args[j], line_no);
            }
            ++mds_rows;
        } else if (key == "kat") {
            expect_args(3);
            p.kat_x = parse_element(args[0], line_no);
            p.kat_y = parse_element(args[1], line_no);
            p.kat_out = parse_element(args[2], line_no);
            have_kat = true;
        } else {
            throw ConfigError("poseidon params line " + std::to_string(line_no) +
                              ": unknown directive '" + key + "'");
        }
    }

    if (!have_field || !have_width || !have_alpha || !have_kat || mds_rows != kWidth) {
        throw ConfigError("poseidon params: missing required directives");
    }
    p.validate();
    if (poseidon_hash(p, p.kat_x, p.kat_y) != p.kat_out) {
        throw ConfigError("poseidon params: known-answer self-test failed");
    }
    return p;
}

void PoseidonParams::validate() const {
    if (full_rounds == 0 || full_rounds % 2 != 0) {
        throw ConfigError("poseidon params: full_rounds must be even and positive");
    }
    if (round_constants.size() != kWidth * total_rounds()) {
        throw ConfigError("poseidon params: expected " + std::to_string(kWidth * total_rounds()) +
                          " round constants, found " + std::to_string(round_constants.size()));
    }
    if (!is_invertible(mds)) throw ConfigError("poseidon params: MDS matrix is singular");
}

const PoseidonParams& PoseidonParams::builtin() {
    static const PoseidonParams params = parse(detail::kEmbeddedPoseidonParams);
    return params;
}

FieldElement poseidon_hash(const PoseidonParams& params, const FieldElement& x,
                           const FieldElement& y) {
    constexpr std::size_t w = PoseidonParams::kWidth;
    std::array<FieldElement, w> state = {FieldElement::zero(), x, y};
    const std::size_t half_full = params.full_rounds / 2;
    const std::size_t rounds = params.total_rounds();
    const FieldElement* rc = params.round_constants.data();

    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t i = 0; i < w; ++i) state[i] += rc[r * w + i];
        if (r < half_full || r >= half_full + params.partial_rounds) {
            for (auto& s : state) s = sbox(s);
        } else {
            state[0] = sbox(state[0]);
        }
        std::array<FieldElement, w> mixed{};
        for (std::size_t i = 0; i < w; ++i) {
            for (std::size_t j = 0; j < w; ++j) mixed[i] += params.mds[i][j] * state[j];
        }
        state = mixed;
    }
    return state[0];
}

bool is_invertible(const PoseidonParams::Matrix& m) {
    auto a = m;
    constexpr std::size_t n = PoseidonParams::kWidth;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].is_zero()) ++pivot;
        if (pivot == n) return false;
        std::swap(a[pivot], a[col]);
        const FieldElement inv = a[col][col].inverse();
        for (std::size_t row = col + 1; row < n; ++row) {
            const FieldElement factor = a[row][col] * inv;
            for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
        }
    }
    return true;
}

}  // namespace zkr
