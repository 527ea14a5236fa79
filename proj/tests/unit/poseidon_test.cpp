#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include "support.hpp"
#include "zkrollup/errors.hpp"
#include "zkrollup/poseidon.hpp"
#include "zkrollup/sha256.hpp"

namespace zkr {
namespace {

std::string params_text() {
    std::ifstream in(std::filesystem::path(ZKR_TEST_VECTORS_DIR) / ".." / ".." / "data" / "poseidon_bn254_t3.params");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Replaces the checksum line so the edit reaches the semantic checks.
std::string reseal(const std::string& text) {
    const auto pos = text.rfind("\nchecksum ");
    const std::string body = text.substr(0, pos + 1);
    return body + "checksum sha256 " + to_hex(sha256(body)) + "\n";
}

std::string replace_first(std::string text, const std::string& from, const std::string& to) {
    const auto pos = text.find(from);
    if (pos == std::string::npos) throw std::runtime_error("pattern not found: " + from);
    return text.replace(pos, from.size(), to);
}

TEST(Poseidon, KnownAnswerVectors) {
    const auto v = test::load_vectors("poseidon_vectors.json");
    ASSERT_GE(v["poseidon"].size(), 3U);
    for (const auto& c : v["poseidon"]) {
        const auto x = FieldElement::from_hex(c["x"].get<std::string>());
        const auto y = FieldElement::from_hex(c["y"].get<std::string>());
        EXPECT_EQ(poseidon2(x, y).to_hex(), c["out"].get<std::string>());
    }
}

TEST(Poseidon, BuiltinParameterShape) {
    const auto& p = PoseidonParams::builtin();
    EXPECT_EQ(p.full_rounds, 8U);
    EXPECT_EQ(p.partial_rounds, 57U);
    EXPECT_EQ(p.round_constants.size(), PoseidonParams::kWidth * p.total_rounds());
    EXPECT_TRUE(is_invertible(p.mds));
}

TEST(Poseidon, EmbeddedParamsMatchDataFile) {
    const auto parsed = PoseidonParams::parse(params_text());
    EXPECT_EQ(parsed.round_constants, PoseidonParams::builtin().round_constants);
    EXPECT_EQ(parsed.mds, PoseidonParams::builtin().mds);
}

TEST(Poseidon, NotCommutative) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; ++i) {
        const auto x = test::random_element(rng), y = test::random_element(rng);
        if (x == y) continue;
        ASSERT_NE(poseidon2(x, y), poseidon2(y, x));
    }
}

TEST(Poseidon, NoCollisionsOnDistinctInputs) {
    std::mt19937_64 rng(22);
    std::unordered_set<std::string> seen;
    for (int i = 0; i < 100000; ++i) {
        const auto out = poseidon2(FieldElement::from_u64(static_cast<std::uint64_t>(i)), test::random_element(rng));
        ASSERT_TRUE(seen.insert(out.to_hex()).second) << "collision at " << i;
    }
}

TEST(Poseidon, CorruptedChecksumIsRejected) {
    const std::string text = params_text();
    const auto pos = text.find("\nrc ") + 4;
    std::string bad = text;
    bad[pos] = bad[pos] == '0' ? '1' : '0';
    EXPECT_THROW(PoseidonParams::parse(bad), ConfigError);
    EXPECT_THROW(PoseidonParams::parse(text.substr(0, text.rfind("\nchecksum "))), ConfigError);
}

TEST(Poseidon, SemanticErrorsAreRejected) {
    const std::string text = params_text();
    ASSERT_NO_THROW(PoseidonParams::parse(reseal(text)));
    // A changed round constant breaks the embedded known answer.
    const auto rc = text.find("\nrc ") + 4;
    std::string bad_rc = text;
    bad_rc[rc + 1] = bad_rc[rc + 1] == 'e' ? 'f' : 'e';
    EXPECT_THROW(PoseidonParams::parse(reseal(bad_rc)), ConfigError);
    EXPECT_THROW(PoseidonParams::parse(reseal(replace_first(text, "\nwidth 3", "\nwidth 4"))), ConfigError);
    EXPECT_THROW(PoseidonParams::parse(reseal(replace_first(text, "\nalpha 5", "\nalpha 3"))), ConfigError);
    EXPECT_THROW(PoseidonParams::parse(reseal(replace_first(text, "\npartial_rounds 57", "\npartial_rounds 56"))),
                 ConfigError);
    EXPECT_THROW(PoseidonParams::parse(reseal(replace_first(text, "\nfield 3", "\nfield 2"))), ConfigError);
    EXPECT_THROW(PoseidonParams::parse(reseal(replace_first(text, "\nalpha 5", "\nalpha 5\nbogus 1"))),
                 ConfigError);
}

TEST(Poseidon, SingularMatrixDetected) {
    PoseidonParams::Matrix m{};
    for (auto& row : m) row.fill(FieldElement::one());
    EXPECT_FALSE(is_invertible(m));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) m[i][j] = i == j ? FieldElement::one() : FieldElement::zero();
    }
    EXPECT_TRUE(is_invertible(m));
}

}  // namespace
}  // namespace zkr
