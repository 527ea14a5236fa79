#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zkrollup/field.hpp"
#include "zkrollup/merkle32.hpp"

namespace zkr {

/// One-byte tag that prefixes every serialized proof.
enum class ProofBackend : std::uint8_t { reference = 0x00, snark = 0x01 };

std::string_view to_string(ProofBackend b);
/// "reference" | "snark"; throws ConfigError otherwise.
ProofBackend parse_backend(std::string_view name);

/// Wire indices into the circuit's value table: [0, 32) are the leaves,
/// gate g writes wire 32 + g, and the last gate's output is the public root.
struct CompressionGate {
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t out = 0;
};

struct CircuitShape {
    std::size_t leaves = 0;
    std::size_t depth = 0;
    std::size_t compression_gates = 0;
    std::size_t public_inputs = 0;

    friend bool operator==(const CircuitShape&, const CircuitShape&) = default;
};

/// The fixed batch circuit: 31 Poseidon compression gates wired as a depth-5
/// binary tree, one public input (the root).
class RollupCircuit {
public:
    static const RollupCircuit& instance();

    std::span<const CompressionGate> gates() const { return gates_; }
    CircuitShape shape() const { return shape_; }
    /// Evaluates every gate over the leaf witness; returns the output wire.
    FieldElement evaluate(std::span<const FieldElement, kBatchLeaves> leaves) const;

private:
    RollupCircuit();

    std::vector<CompressionGate> gates_;
    CircuitShape shape_;
};

struct ProvingKeyMaterial {
    ProofBackend backend = ProofBackend::reference;
    std::uint64_t seed = 0;
    CircuitShape circuit_shape;
    std::vector<std::uint8_t> artifacts;  // empty for the transparent reference backend

    std::vector<std::uint8_t> serialize() const;
};

struct RollupStatement {
    FieldElement public_root;
    LeafVector leaves{};  // witness
};

struct RollupProof {
    ProofBackend backend = ProofBackend::reference;
    std::vector<std::uint8_t> proof_bytes;  // proof_bytes[0] == backend tag
    FieldElement public_root;
    double prover_time_ms = 0.0;

    std::string proof_hex() const;
};

/// Throws ConfigError for a backend that is not compiled in.
ProvingKeyMaterial setup(ProofBackend backend, std::uint64_t seed = 0);

/// Refuses (ProvingError) when the witness does not hash to the public root.
RollupProof prove(const ProvingKeyMaterial& material, const RollupStatement& statement);

/// Malformed bytes verify as false; never throws.
bool verify(const ProvingKeyMaterial& material, std::span<const std::uint8_t> proof_bytes,
            const FieldElement& public_root) noexcept;

inline bool verify(const ProvingKeyMaterial& material, const RollupProof& proof) noexcept {
    return verify(material, proof.proof_bytes, proof.public_root);
}

}  // namespace zkr
