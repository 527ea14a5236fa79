#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "zkrollup/field.hpp"
#include "zkrollup/merkle32.hpp"

namespace zkr {

/// A CreateAsset request as it travels through the sequencer.
struct Transaction {
    std::string asset_id;
    std::string participant;
    std::string asset_cid;
    std::int64_t client_timestamp = 0;  // ms since epoch

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

/// Asset id reserved for the padding sentinel; real transactions may not use it.
inline constexpr std::string_view kDummyAssetId = "DUMMY";

/// Throws ValidationError: empty ids, reserved id, malformed CID, invalid UTF-8.
void validate(const Transaction& tx);

/// JSON object with keys assetCid, assetId, clientTimestamp, participant.
nlohmann::json to_json(const Transaction& tx);
/// Strict: all four keys with the right types, nothing else, then validate().
/// clientTimestamp may be omitted when `allow_missing_timestamp` is set.
Transaction transaction_from_json(const nlohmann::json& j, bool allow_missing_timestamp = false);

/// Canonical JSON: keys in lexicographic order (assetCid, assetId,
/// clientTimestamp, participant), no whitespace, UTF-8, integers in decimal.
std::string canonical_bytes(const Transaction& tx);

/// sha256(canonical_bytes(tx)) read as a big-endian integer, reduced mod p.
FieldElement leaf_encode(const Transaction& tx);

/// {assetId: "DUMMY", participant: "DUMMY", assetCid: CID of the empty
/// string, clientTimestamp: 0}.
const Transaction& dummy_transaction();
/// leaf_encode(dummy_transaction()), computed once.
const FieldElement& dummy_leaf();
/// The published value of dummy_leaf().
inline constexpr std::string_view kDummyLeafHex =
    "072f5322dae88b81739a6c4a62e5d45a39d5ed91eec031c5eaed44e0e1070e38";

struct BatchDraft {
    std::vector<Transaction> transactions;  // real transactions, in order
    LeafVector leaves{};
    std::size_t real_count = 0;
};

/// Encodes 1..32 transactions in order and fills the rest with dummy_leaf().
BatchDraft pad_batch(std::span<const Transaction> txs);

/// Randomised CreateAsset payload used by the workload driver and tests:
/// random alphanumeric suffixes on assetId/participant and a synthetic CID.
Transaction random_transaction(std::mt19937_64& rng, std::int64_t timestamp_ms);

}  // namespace zkr
