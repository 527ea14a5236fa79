#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "zkrollup/field.hpp"
#include "zkrollup/merkle32.hpp"

namespace zkr::test {

inline nlohmann::json load_vectors(const std::string& name) {
    std::ifstream in(std::filesystem::path(ZKR_TEST_VECTORS_DIR) / name);
    return nlohmann::json::parse(in);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                ("zkr-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Uniform-ish element: 32 random bytes reduced mod p.
inline FieldElement random_element(std::mt19937_64& rng) {
    FieldElement::Bytes b{};
    for (std::size_t i = 0; i < b.size(); i += 8) {
        const std::uint64_t w = rng();
        for (std::size_t k = 0; k < 8; ++k) b[i + k] = static_cast<std::uint8_t>(w >> (8 * k));
    }
    return FieldElement::from_bytes_reduce(b);
}

inline LeafVector random_leaves(std::mt19937_64& rng) {
    LeafVector v{};
    for (auto& x : v) x = random_element(rng);
    return v;
}

/// Compression functor that counts its calls.
struct CountingCompress {
    std::size_t* calls;
    FieldElement operator()(const FieldElement& l, const FieldElement& r) const {
        ++*calls;
        return poseidon2(l, r);
    }
};

}  // namespace zkr::test
