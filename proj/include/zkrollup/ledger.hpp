#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zkrollup/clock.hpp"
#include "zkrollup/field.hpp"
#include "zkrollup/proof.hpp"
#include "zkrollup/transaction.hpp"

namespace zkr {

/// Delays of the simulated endorse -> order -> validate/commit pipeline.
///
/// A transaction submitted at t reaches the orderer at t + endorse + order.
/// The orderer cuts blocks on a fixed grid (every block_interval_ms from the
/// ledger's epoch), each holding at most max_tx_per_block transactions in
/// arrival order; overflow rolls to the next cut. Blocks are validated and
/// committed one at a time, commit_ms each. With block_interval_ms == 0 a
/// block is cut the moment a transaction arrives.
struct LatencyModel {
    std::int64_t endorse_ms = 0;
    std::int64_t order_ms = 0;
    std::int64_t commit_ms = 0;
    std::int64_t block_interval_ms = 0;
    std::size_t max_tx_per_block = 1;

    /// Throws ConfigError on negative delays or max_tx_per_block == 0.
    void validate() const;

    /// Zero delays, one cut per arrival instant.
    static LatencyModel instant();
    /// Fitted so 20 closed-loop clients see ~6 TPS at ~3 s per request
    /// (see `rollup-bench calibrate`).
    static LatencyModel calibrated();

    nlohmann::json to_json() const;
    static LatencyModel from_json(const nlohmann::json& j);

    /// Upper bound on sustained commits per second.
    double throughput_ceiling_tps() const;
};

/// On-chain metadata for one settled batch, stored under "BATCH_<n>".
struct BatchCommitment {
    std::uint64_t batch_number = 0;
    FieldElement merkle_root;
    std::string ipfs_cid;
    std::size_t tx_count = 0;
    std::vector<std::uint8_t> proof_bytes;
    std::int64_t committed_at = 0;  // set by the ledger

    nlohmann::json to_json() const;
    static BatchCommitment from_json(const nlohmann::json& j);
};

std::string batch_key(std::uint64_t batch_number);
inline constexpr std::string_view kBatchKeyPrefix = "BATCH_";

enum class ChaincodeFn : std::uint8_t { create_asset, commit_batch };

struct LedgerTx {
    ChaincodeFn fn = ChaincodeFn::create_asset;
    std::string key;
    std::string value;
    std::int64_t submitted_at = 0;
};

struct Block {
    std::uint64_t number = 0;
    std::int64_t cut_at = 0;
    std::int64_t committed_at = 0;
    std::vector<LedgerTx> txs;

    nlohmann::json to_json() const;
    static Block from_json(const nlohmann::json& j);
};

struct CommitReceipt {
    std::string key;
    std::uint64_t block_number = 0;
    std::int64_t submitted_at = 0;
    std::int64_t committed_at = 0;

    std::int64_t latency_ms() const { return committed_at - submitted_at; }
};

using WorldState = std::map<std::string, std::string, std::less<>>;

/// Endorsement-time check that a commitment's proof attests its root.
using CommitmentVerifier = std::function<bool(const BatchCommitment&)>;
CommitmentVerifier proof_gate(ProvingKeyMaterial material);

/// Single-peer stand-in for a permissioned ledger: key-value world state,
/// CreateAsset / CommitBatch chaincode, and an append-only block log.
///
/// Every check happens at endorsement, against committed plus in-flight
/// state, so a rejected call never touches either. The world state only ever
/// reflects fully committed blocks; blocks are applied lazily by whichever
/// call first observes that their commit time has passed.
class Ledger {
public:
    Ledger(LatencyModel model, Clock& clock, CommitmentVerifier verifier);

    /// Endorses and orders the transaction, returning as soon as its commit
    /// time is known. Throws EndorsementError (duplicate or reserved key).
    CommitReceipt submit_create_asset(const Transaction& tx);
    /// submit_create_asset + wait until committed.
    CommitReceipt create_asset(const Transaction& tx);

    /// Throws EndorsementError on a failed proof, a batch number that is not
    /// the successor of the last one, or a tx count outside [1,32].
    CommitReceipt submit_commit_batch(BatchCommitment commitment);
    CommitReceipt commit_batch(BatchCommitment commitment);

    std::optional<std::string> query(std::string_view key);
    std::optional<BatchCommitment> query_batch(std::uint64_t batch_number);

    /// Applies every block whose commit time has passed.
    void advance();

    std::vector<Block> blocks();
    WorldState state();
    std::string export_jsonl();
    /// Streams each committed block as a JSON line to `path` (append).
    void set_block_log(const std::filesystem::path& path);

    std::uint64_t last_committed_batch();
    std::size_t pending_transactions();
    const LatencyModel& model() const { return model_; }
    Clock& clock() { return clock_; }

    static WorldState replay(std::span<const Block> blocks);

private:
    CommitReceipt enqueue_locked(LedgerTx tx);
    void advance_locked();

    LatencyModel model_;
    Clock& clock_;
    CommitmentVerifier verifier_;
    std::int64_t epoch_ms_;

    std::mutex mu_;
    WorldState state_;
    std::vector<Block> committed_;
    std::deque<Block> pending_;
    std::set<std::string, std::less<>> pending_keys_;
    std::int64_t last_arrival_ = 0;
    std::int64_t last_commit_at_ = 0;
    std::uint64_t next_block_number_ = 1;
    std::uint64_t next_batch_number_ = 1;      // counting in-flight commitments
    std::uint64_t last_committed_batch_ = 0;
    std::size_t pending_tx_count_ = 0;
    std::ofstream block_log_;
};

}  // namespace zkr
