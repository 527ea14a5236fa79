#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "zkrollup/errors.hpp"
#include "zkrollup/field.hpp"
#include "zkrollup/poseidon.hpp"

namespace zkr {

inline constexpr std::size_t kBatchLeaves = 32;
inline constexpr std::size_t kTreeDepth = 5;
/// 16 + 8 + 4 + 2 + 1.
inline constexpr std::size_t kCompressionsPerTree = kBatchLeaves - 1;

using LeafVector = std::array<FieldElement, kBatchLeaves>;

/// Which side of its parent the running node sits on at one level of a path.
enum class PathSide : std::uint8_t { left, right };

struct MerklePath {
    std::size_t leaf_index = 0;
    std::array<FieldElement, kTreeDepth> siblings{};
    std::array<PathSide, kTreeDepth> sides{};
};

struct PoseidonCompress {
    FieldElement operator()(const FieldElement& l, const FieldElement& r) const {
        return poseidon2(l, r);
    }
};

/// Depth-5 tree over exactly 32 leaves. Immutable once built.
///
/// Nodes are kept per level: level 0 holds the leaves, level 5 the root.
class MerkleTree32 {
public:
    template <class Compress = PoseidonCompress>
    static MerkleTree32 build(std::span<const FieldElement> leaves, Compress&& compress = {}) {
        if (leaves.size() != kBatchLeaves) {
            throw SizeError("merkle tree needs exactly 32 leaves, got " +
                            std::to_string(leaves.size()));
        }
        MerkleTree32 t;
        std::copy(leaves.begin(), leaves.end(), t.nodes_.begin());
        std::size_t in = 0;
        std::size_t out = kBatchLeaves;
        for (std::size_t width = kBatchLeaves / 2; width >= 1; width /= 2) {
            for (std::size_t i = 0; i < width; ++i) {
                t.nodes_[out + i] = compress(t.nodes_[in + 2 * i], t.nodes_[in + 2 * i + 1]);
            }
            in = out;
            out += width;
        }
        return t;
    }

    const FieldElement& root() const { return nodes_.back(); }

    std::span<const FieldElement> leaves() const { return level(0); }

    /// Level 0 = 32 leaves, level 1 = 16 nodes, ..., level 5 = {root}.
    std::span<const FieldElement> level(std::size_t k) const {
        if (k > kTreeDepth) throw ValidationError("merkle level out of range");
        return {nodes_.data() + level_offset(k), kBatchLeaves >> k};
    }

    MerklePath prove_membership(std::size_t index) const {
        if (index >= kBatchLeaves) {
            throw ValidationError("leaf index " + std::to_string(index) + " out of range [0,32)");
        }
        MerklePath path;
        path.leaf_index = index;
        std::size_t pos = index;
        for (std::size_t k = 0; k < kTreeDepth; ++k) {
            const bool is_right = (pos & 1U) != 0;
            path.sides[k] = is_right ? PathSide::right : PathSide::left;
            path.siblings[k] = nodes_[level_offset(k) + (pos ^ 1U)];
            pos >>= 1U;
        }
        return path;
    }

private:
    static constexpr std::size_t level_offset(std::size_t k) {
        // 32 + 16 + ... for the levels below k.
        return 2 * kBatchLeaves - (2 * kBatchLeaves >> k);
    }

    std::array<FieldElement, 2 * kBatchLeaves - 1> nodes_{};
};

inline MerkleTree32 build_tree(std::span<const FieldElement> leaves) {
    return MerkleTree32::build(leaves);
}

/// True iff folding `leaf` up through `path` reproduces `root`. Paths whose
/// sides disagree with their leaf index are rejected.
template <class Compress = PoseidonCompress>
bool verify_membership(const FieldElement& root, const FieldElement& leaf, const MerklePath& path,
                       Compress&& compress = {}) {
    if (path.leaf_index >= kBatchLeaves) return false;
    FieldElement acc = leaf;
    std::size_t pos = path.leaf_index;
    for (std::size_t k = 0; k < kTreeDepth; ++k) {
        const bool is_right = (pos & 1U) != 0;
        if ((path.sides[k] == PathSide::right) != is_right) return false;
        acc = is_right ? compress(path.siblings[k], acc) : compress(acc, path.siblings[k]);
        pos >>= 1U;
    }
    return acc == root;
}

}  // namespace zkr
