#include "zkrollup/transaction.hpp"

#include "zkrollup/cid.hpp"
#include "zkrollup/errors.hpp"
#include "zkrollup/sha256.hpp"

namespace zkr {

namespace {

std::string dump_checked(const nlohmann::json& j) {
    try {
        return j.dump();
    } catch (const nlohmann::json::type_error& e) {
        throw ValidationError(std::string("transaction is not valid UTF-8: ") + e.what());
    }
}

std::string random_alnum(std::mt19937_64& rng, std::size_t n) {
    static constexpr std::string_view kChars =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
    std::uniform_int_distribution<std::size_t> pick(0, kChars.size() - 1);
    std::string out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(kChars[pick(rng)]);
    return out;
}

}  // namespace

void validate(const Transaction& tx) {
    if (tx.asset_id.empty()) throw ValidationError("assetId must be non-empty");
    if (tx.participant.empty()) throw ValidationError("participant must be non-empty");
    if (tx.asset_id == kDummyAssetId) throw ValidationError("assetId 'DUMMY' is reserved");
    if (!Cid::is_valid(tx.asset_cid)) {
        throw ValidationError("assetCid is not a valid CID: '" + tx.asset_cid + "'");
    }
    dump_checked(nlohmann::json{{"assetId", tx.asset_id}, {"participant", tx.participant}});
}

nlohmann::json to_json(const Transaction& tx) {
    return nlohmann::json{{"assetCid", tx.asset_cid},
                          {"assetId", tx.asset_id},
                          {"clientTimestamp", tx.client_timestamp},
                          {"participant", tx.participant}};
}

Transaction transaction_from_json(const nlohmann::json& j, bool allow_missing_timestamp) {
    if (!j.is_object()) throw ValidationError("transaction must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (key != "assetCid" && key != "assetId" && key != "clientTimestamp" &&
            key != "participant") {
            throw ValidationError("unknown transaction field '" + key + "'");
        }
    }
    const auto text = [&](const char* key) {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            throw ValidationError(std::string("field '") + key + "' must be a string");
        }
        return it->get<std::string>();
    };
    Transaction tx;
    tx.asset_id = text("assetId");
    tx.participant = text("participant");
    tx.asset_cid = text("assetCid");
    const auto ts = j.find("clientTimestamp");
    if (ts == j.end()) {
        if (!allow_missing_timestamp) throw ValidationError("field 'clientTimestamp' is required");
    } else if (!ts->is_number_integer()) {
        throw ValidationError("field 'clientTimestamp' must be an integer");
    } else {
        tx.client_timestamp = ts->get<std::int64_t>();
    }
    validate(tx);
    return tx;
}

std::string canonical_bytes(const Transaction& tx) {
    validate(tx);
    return to_json(tx).dump();
}

FieldElement leaf_encode(const Transaction& tx) {
    return FieldElement::from_bytes_reduce(sha256(canonical_bytes(tx)));
}

const Transaction& dummy_transaction() {
    static const Transaction dummy{std::string(kDummyAssetId), std::string(kDummyAssetId),
                                   Cid::of("").text(), 0};
    return dummy;
}

const FieldElement& dummy_leaf() {
    // The sentinel bypasses validate(), which reserves its asset id.
    static const FieldElement leaf =
        FieldElement::from_bytes_reduce(sha256(to_json(dummy_transaction()).dump()));
    return leaf;
}

BatchDraft pad_batch(std::span<const Transaction> txs) {
    if (txs.empty() || txs.size() > kBatchLeaves) {
        throw SizeError("a batch holds 1..32 transactions, got " + std::to_string(txs.size()));
    }
    BatchDraft draft;
    draft.transactions.assign(txs.begin(), txs.end());
    draft.real_count = txs.size();
    for (std::size_t i = 0; i < kBatchLeaves; ++i) {
        draft.leaves[i] = i < txs.size() ? leaf_encode(txs[i]) : dummy_leaf();
    }
    return draft;
}

Transaction random_transaction(std::mt19937_64& rng, std::int64_t timestamp_ms) {
    Transaction tx;
    tx.asset_id = "asset-" + random_alnum(rng, 16);
    tx.participant = "participant-" + random_alnum(rng, 8);
    tx.asset_cid = Cid::of("asset-content:" + random_alnum(rng, 32)).text();
    tx.client_timestamp = timestamp_ms;
    return tx;
}

}  // namespace zkr
