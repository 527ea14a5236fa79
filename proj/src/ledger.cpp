#include "zkrollup/ledger.hpp"

#include <limits>
#include <sstream>

#include "zkrollup/cid.hpp"
#include "zkrollup/errors.hpp"
#include "zkrollup/sha256.hpp"

namespace zkr {

namespace {

std::string_view fn_name(ChaincodeFn fn) {
    return fn == ChaincodeFn::create_asset ? "CreateAsset" : "CommitBatch";
}

ChaincodeFn parse_fn(std::string_view name) {
    if (name == "CreateAsset") return ChaincodeFn::create_asset;
    if (name == "CommitBatch") return ChaincodeFn::commit_batch;
    throw ValidationError("unknown chaincode function '" + std::string(name) + "'");
}

std::int64_t ceil_to_grid(std::int64_t t, std::int64_t origin, std::int64_t step) {
    const std::int64_t offset = t - origin;
    const std::int64_t k = offset <= 0 ? 0 : (offset + step - 1) / step;
    return origin + k * step;
}

}  // namespace

void LatencyModel::validate() const {
    if (endorse_ms < 0 || order_ms < 0 || commit_ms < 0 || block_interval_ms < 0) {
        throw ConfigError("latency model delays must be non-negative");
    }
    if (max_tx_per_block < 1) throw ConfigError("latency model maxTxPerBlock must be >= 1");
}

LatencyModel LatencyModel::instant() { return {0, 0, 0, 0, kBatchLeaves}; }

LatencyModel LatencyModel::calibrated() { return {120, 80, 300, 500, 3}; }

nlohmann::json LatencyModel::to_json() const {
    return {{"endorseMs", endorse_ms},
            {"orderMs", order_ms},
            {"commitMs", commit_ms},
            {"blockIntervalMs", block_interval_ms},
            {"maxTxPerBlock", max_tx_per_block}};
}

LatencyModel LatencyModel::from_json(const nlohmann::json& j) {
    try {
        LatencyModel m;
        m.endorse_ms = j.at("endorseMs").get<std::int64_t>();
        m.order_ms = j.at("orderMs").get<std::int64_t>();
        m.commit_ms = j.at("commitMs").get<std::int64_t>();
        m.block_interval_ms = j.at("blockIntervalMs").get<std::int64_t>();
        const auto max_tx = j.at("maxTxPerBlock").get<std::int64_t>();
        if (max_tx < 1) throw ConfigError("latency model maxTxPerBlock must be >= 1");
        m.max_tx_per_block = static_cast<std::size_t>(max_tx);
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("latency model: ") + e.what());
    }
}

double LatencyModel::throughput_ceiling_tps() const {
    const std::int64_t per_block = std::max(block_interval_ms, commit_ms);
    if (per_block == 0) return std::numeric_limits<double>::infinity();
    return 1000.0 * static_cast<double>(max_tx_per_block) / static_cast<double>(per_block);
}

nlohmann::json BatchCommitment::to_json() const {
    return {{"batchNumber", batch_number},
            {"committedAt", committed_at},
            {"ipfsCid", ipfs_cid},
            {"merkleRoot", merkle_root.to_hex()},
            {"proof", to_hex(proof_bytes.data(), proof_bytes.size())},
            {"txCount", tx_count}};
}

BatchCommitment BatchCommitment::from_json(const nlohmann::json& j) {
    try {
        BatchCommitment c;
        c.batch_number = j.at("batchNumber").get<std::uint64_t>();
        c.committed_at = j.at("committedAt").get<std::int64_t>();
        c.ipfs_cid = j.at("ipfsCid").get<std::string>();
        c.merkle_root = FieldElement::from_hex(j.at("merkleRoot").get<std::string>());
        const std::string proof = from_hex(j.at("proof").get<std::string>());
        c.proof_bytes.assign(proof.begin(), proof.end());
        c.tx_count = j.at("txCount").get<std::size_t>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed batch commitment: ") + e.what());
    }
}

std::string batch_key(std::uint64_t batch_number) {
    return std::string(kBatchKeyPrefix) + std::to_string(batch_number);
}

nlohmann::json Block::to_json() const {
    nlohmann::json txs_json = nlohmann::json::array();
    for (const auto& tx : txs) {
        txs_json.push_back({{"fn", fn_name(tx.fn)},
                            {"key", tx.key},
                            {"submittedAt", tx.submitted_at},
                            {"value", tx.value}});
    }
    return {{"number", number}, {"cutAt", cut_at}, {"committedAt", committed_at}, {"txs", txs_json}};
}

Block Block::from_json(const nlohmann::json& j) {
    try {
        Block b;
        b.number = j.at("number").get<std::uint64_t>();
        b.cut_at = j.at("cutAt").get<std::int64_t>();
        b.committed_at = j.at("committedAt").get<std::int64_t>();
        for (const auto& t : j.at("txs")) {
            b.txs.push_back({parse_fn(t.at("fn").get<std::string>()), t.at("key").get<std::string>(),
                             t.at("value").get<std::string>(), t.at("submittedAt").get<std::int64_t>()});
        }
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed block: ") + e.what());
    }
}

CommitmentVerifier proof_gate(ProvingKeyMaterial material) {
    return [material = std::move(material)](const BatchCommitment& c) {
        return verify(material, c.proof_bytes, c.merkle_root);
    };
}

Ledger::Ledger(LatencyModel model, Clock& clock, CommitmentVerifier verifier)
    : model_(model), clock_(clock), verifier_(std::move(verifier)), epoch_ms_(clock.now_ms()) {
    model_.validate();
    if (!verifier_) throw ConfigError("ledger needs a commitment verifier");
    last_arrival_ = epoch_ms_;
    last_commit_at_ = epoch_ms_;
}

CommitReceipt Ledger::submit_create_asset(const Transaction& tx) {
    const std::string value = canonical_bytes(tx);
    std::lock_guard lock(mu_);
    advance_locked();
    if (tx.asset_id.starts_with(kBatchKeyPrefix)) {
        throw EndorsementError("asset id prefix 'BATCH_' is reserved");
    }
    if (state_.contains(tx.asset_id) || pending_keys_.contains(tx.asset_id)) {
        throw EndorsementError("asset " + tx.asset_id + " already exists");
    }
    return enqueue_locked({ChaincodeFn::create_asset, tx.asset_id, value, clock_.now_ms()});
}

CommitReceipt Ledger::create_asset(const Transaction& tx) {
    const CommitReceipt r = submit_create_asset(tx);
    clock_.sleep_until(r.committed_at);
    advance();
    return r;
}

CommitReceipt Ledger::submit_commit_batch(BatchCommitment commitment) {
    if (commitment.tx_count < 1 || commitment.tx_count > kBatchLeaves) {
        throw EndorsementError("batch txCount must be in [1,32]");
    }
    if (!Cid::is_valid(commitment.ipfs_cid)) throw EndorsementError("batch ipfsCid is malformed");
    if (!verifier_(commitment)) {
        throw EndorsementError("proof for batch " + std::to_string(commitment.batch_number) +
                               " does not verify against root " + commitment.merkle_root.to_hex());
    }
    std::lock_guard lock(mu_);
    advance_locked();
    if (commitment.batch_number != next_batch_number_) {
        throw EndorsementError("batch number " + std::to_string(commitment.batch_number) +
                               " is not the successor (expected " +
                               std::to_string(next_batch_number_) + ")");
    }
    // The stored value carries the commit time, which is known only once ordered.
    LedgerTx tx{ChaincodeFn::commit_batch, batch_key(commitment.batch_number), {}, clock_.now_ms()};
    CommitReceipt r = enqueue_locked(std::move(tx));
    commitment.committed_at = r.committed_at;
    pending_.back().txs.back().value = commitment.to_json().dump();
    ++next_batch_number_;
    return r;
}

CommitReceipt Ledger::commit_batch(BatchCommitment commitment) {
    const CommitReceipt r = submit_commit_batch(std::move(commitment));
    clock_.sleep_until(r.committed_at);
    advance();
    return r;
}

CommitReceipt Ledger::enqueue_locked(LedgerTx tx) {
    const std::int64_t arrival =
        std::max(last_arrival_, tx.submitted_at + model_.endorse_ms + model_.order_ms);
    last_arrival_ = arrival;

    const std::int64_t interval = model_.block_interval_ms;
    const std::int64_t candidate = interval > 0 ? ceil_to_grid(arrival, epoch_ms_, interval) : arrival;

    Block* block = nullptr;
    if (!pending_.empty()) {
        Block& open = pending_.back();
        if (open.cut_at >= candidate) {
            if (open.txs.size() < model_.max_tx_per_block) {
                block = &open;
            } else {
                Block next;
                next.cut_at = open.cut_at + interval;
                pending_.push_back(std::move(next));
                block = &pending_.back();
            }
        }
    }
    if (block == nullptr) {
        Block next;
        next.cut_at = candidate;
        pending_.push_back(std::move(next));
        block = &pending_.back();
    }
    if (block->txs.empty()) {
        block->number = next_block_number_++;
        block->committed_at = std::max(block->cut_at, last_commit_at_) + model_.commit_ms;
        last_commit_at_ = block->committed_at;
    }

    CommitReceipt r{tx.key, block->number, tx.submitted_at, block->committed_at};
    pending_keys_.insert(tx.key);
    block->txs.push_back(std::move(tx));
    ++pending_tx_count_;
    return r;
}

void Ledger::advance() {
    std::lock_guard lock(mu_);
    advance_locked();
}

void Ledger::advance_locked() {
    const std::int64_t now = clock_.now_ms();
    while (!pending_.empty() && pending_.front().committed_at <= now) {
        Block block = std::move(pending_.front());
        pending_.pop_front();
        for (const auto& tx : block.txs) {
            state_[tx.key] = tx.value;
            pending_keys_.erase(tx.key);
            if (tx.fn == ChaincodeFn::commit_batch) {
                last_committed_batch_ = std::stoull(tx.key.substr(kBatchKeyPrefix.size()));
            }
        }
        pending_tx_count_ -= block.txs.size();
        if (block_log_.is_open()) {
            block_log_ << block.to_json().dump() << '\n';
            block_log_.flush();
        }
        committed_.push_back(std::move(block));
    }
}

std::optional<std::string> Ledger::query(std::string_view key) {
    std::lock_guard lock(mu_);
    advance_locked();
    const auto it = state_.find(key);
    if (it == state_.end()) return std::nullopt;
    return it->second;
}

std::optional<BatchCommitment> Ledger::query_batch(std::uint64_t batch_number) {
    const auto raw = query(batch_key(batch_number));
    if (!raw) return std::nullopt;
    return BatchCommitment::from_json(nlohmann::json::parse(*raw));
}

std::vector<Block> Ledger::blocks() {
    std::lock_guard lock(mu_);
    advance_locked();
    return committed_;
}

WorldState Ledger::state() {
    std::lock_guard lock(mu_);
    advance_locked();
    return state_;
}

std::string Ledger::export_jsonl() {
    std::lock_guard lock(mu_);
    advance_locked();
    std::ostringstream out;
    for (const auto& b : committed_) out << b.to_json().dump() << '\n';
    return out.str();
}

void Ledger::set_block_log(const std::filesystem::path& path) {
    std::lock_guard lock(mu_);
    block_log_.close();
    block_log_.open(path, std::ios::app);
    if (!block_log_) throw StorageError("cannot open block log " + path.string());
}

std::uint64_t Ledger::last_committed_batch() {
    std::lock_guard lock(mu_);
    advance_locked();
    return last_committed_batch_;
}

std::size_t Ledger::pending_transactions() {
    std::lock_guard lock(mu_);
    advance_locked();
    return pending_tx_count_;
}

WorldState Ledger::replay(std::span<const Block> blocks) {
    WorldState state;
    for (const auto& b : blocks) {
        for (const auto& tx : b.txs) state[tx.key] = tx.value;
    }
    return state;
}

}  // namespace zkr
