#include "zkrollup/proof.hpp"

#include <chrono>

#include "zkrollup/errors.hpp"
#include "zkrollup/poseidon.hpp"
#include "zkrollup/sha256.hpp"

namespace zkr {

namespace {

constexpr std::size_t kReferenceProofSize = 1 + kBatchLeaves * FieldElement::kByteLength;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

}  // namespace

std::string_view to_string(ProofBackend b) {
    return b == ProofBackend::reference ? "reference" : "snark";
}

ProofBackend parse_backend(std::string_view name) {
    if (name == "reference") return ProofBackend::reference;
    if (name == "snark") return ProofBackend::snark;
    throw ConfigError("unknown proof backend '" + std::string(name) + "'");
}

RollupCircuit::RollupCircuit() {
    // Same topology as the tree: pair up wires level by level.
    std::vector<std::uint32_t> frontier(kBatchLeaves);
    for (std::uint32_t i = 0; i < kBatchLeaves; ++i) frontier[i] = i;
    std::uint32_t next_wire = kBatchLeaves;
    std::size_t depth = 0;
    while (frontier.size() > 1) {
        std::vector<std::uint32_t> parents;
        for (std::size_t i = 0; i + 1 < frontier.size(); i += 2) {
            gates_.push_back({frontier[i], frontier[i + 1], next_wire});
            parents.push_back(next_wire++);
        }
        frontier = std::move(parents);
        ++depth;
    }
    shape_ = {kBatchLeaves, depth, gates_.size(), 1};
}

const RollupCircuit& RollupCircuit::instance() {
    static const RollupCircuit circuit;
    return circuit;
}

FieldElement RollupCircuit::evaluate(std::span<const FieldElement, kBatchLeaves> leaves) const {
    std::vector<FieldElement> wires(kBatchLeaves + gates_.size());
    std::copy(leaves.begin(), leaves.end(), wires.begin());
    for (const auto& g : gates_) wires[g.out] = poseidon2(wires[g.left], wires[g.right]);
    return wires[gates_.back().out];
}

std::vector<std::uint8_t> ProvingKeyMaterial::serialize() const {
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(backend));
    put_u64(out, seed);
    put_u64(out, circuit_shape.leaves);
    put_u64(out, circuit_shape.depth);
    put_u64(out, circuit_shape.compression_gates);
    put_u64(out, circuit_shape.public_inputs);
    put_u64(out, artifacts.size());
    out.insert(out.end(), artifacts.begin(), artifacts.end());
    return out;
}

std::string RollupProof::proof_hex() const { return to_hex(proof_bytes.data(), proof_bytes.size()); }

ProvingKeyMaterial setup(ProofBackend backend, std::uint64_t seed) {
    if (backend != ProofBackend::reference) {
        throw ConfigError("proof backend '" + std::string(to_string(backend)) +
                          "' is not available in this build");
    }
    ProvingKeyMaterial m;
    m.backend = backend;
    m.seed = seed;
    m.circuit_shape = RollupCircuit::instance().shape();
    return m;
}

RollupProof prove(const ProvingKeyMaterial& material, const RollupStatement& statement) {
    if (material.backend != ProofBackend::reference) {
        throw ConfigError("proving material is for an unavailable backend");
    }
    const auto start = std::chrono::steady_clock::now();
    const FieldElement root = RollupCircuit::instance().evaluate(statement.leaves);
    if (root != statement.public_root) {
        throw ProvingError("witness does not hash to the claimed root " +
                           statement.public_root.to_hex());
    }
    RollupProof proof;
    proof.backend = material.backend;
    proof.public_root = statement.public_root;
    proof.proof_bytes.reserve(kReferenceProofSize);
    proof.proof_bytes.push_back(static_cast<std::uint8_t>(ProofBackend::reference));
    for (const auto& leaf : statement.leaves) {
        const auto bytes = leaf.to_bytes();
        proof.proof_bytes.insert(proof.proof_bytes.end(), bytes.begin(), bytes.end());
    }
    proof.prover_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return proof;
}

bool verify(const ProvingKeyMaterial& material, std::span<const std::uint8_t> proof_bytes,
            const FieldElement& public_root) noexcept {
    if (material.backend != ProofBackend::reference) return false;
    if (proof_bytes.size() != kReferenceProofSize) return false;
    if (proof_bytes[0] != static_cast<std::uint8_t>(ProofBackend::reference)) return false;
    try {
        LeafVector leaves;
        for (std::size_t i = 0; i < kBatchLeaves; ++i) {
            leaves[i] = FieldElement::from_bytes(
                proof_bytes.subspan(1 + i * FieldElement::kByteLength).first<FieldElement::kByteLength>());
        }
        return RollupCircuit::instance().evaluate(leaves) == public_root;
    } catch (...) {
        return false;
    }
}

}  // namespace zkr
