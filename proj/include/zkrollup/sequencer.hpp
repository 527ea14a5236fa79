#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "zkrollup/batch_store.hpp"
#include "zkrollup/clock.hpp"
#include "zkrollup/ledger.hpp"
#include "zkrollup/proof.hpp"
#include "zkrollup/tx_pool.hpp"

namespace zkr {

enum class SettlementStatus : std::uint8_t { sealed, proved, stored, committed, failed };

std::string_view to_string(SettlementStatus s);
SettlementStatus parse_settlement_status(std::string_view s);

/// What the sequencer knows about one settlement attempt.
struct SettlementRecord {
    std::uint64_t batch_number = 0;
    std::size_t real_count = 0;
    FieldElement merkle_root;
    std::string cid;
    double proof_gen_ms = 0.0;
    double upload_ms = 0.0;
    double l1_commit_ms = 0.0;
    SettlementStatus status = SettlementStatus::sealed;
    std::string failed_stage;
    std::string error;
    std::uint32_t attempt = 1;
    std::int64_t sealed_at = 0;
    std::int64_t committed_at = 0;
    std::vector<std::uint64_t> tracking_ids;

    /// sealed -> proved -> stored -> committed, or failed from any
    /// non-terminal state. Throws std::logic_error otherwise.
    void advance(SettlementStatus next);

    nlohmann::json to_json() const;
    static SettlementRecord from_json(const nlohmann::json& j);
};

using Prover = std::function<RollupProof(const RollupStatement&)>;

/// zkr::prove over `material`, optionally padded with a fixed delay to stand
/// in for hardware-bound proving cost.
Prover reference_prover(ProvingKeyMaterial material,
                        std::chrono::milliseconds simulated_cost = std::chrono::milliseconds{0});

struct SequencerOptions {
    /// Settle a partial batch after this long; a full pool settles at once.
    std::int64_t settle_interval_ms = 2000;
    /// Consecutive failed attempts before the background loop pauses.
    std::uint32_t max_settle_retries = 5;
    std::int64_t retry_backoff_ms = 250;
    /// One JSON line per settlement attempt; empty disables the file.
    std::filesystem::path settlement_log;
};

struct AcceptanceReceipt {
    std::uint64_t tracking_id = 0;
    std::int64_t accepted_at = 0;
};

struct BatchView {
    SettlementRecord record;
    std::optional<BatchCommitment> commitment;
};

/// Layer-2 sequencer: immediate acceptance into the pool, and a single
/// settlement worker that seals up to 32 transactions, pads, builds the
/// tree, proves, stores the payload and commits the metadata on the ledger.
class Sequencer {
public:
    Sequencer(SequencerOptions options, Clock& clock, TxPool& pool, BatchStore& store,
              Ledger& ledger, Prover prover);
    ~Sequencer();

    Sequencer(const Sequencer&) = delete;
    Sequencer& operator=(const Sequencer&) = delete;

    /// Throws ValidationError or PoolFullError; never waits on settlement.
    AcceptanceReceipt submit(const Transaction& tx);
    /// CreateAsset straight on the ledger; returns after the simulated commit.
    CommitReceipt submit_direct(const Transaction& tx);

    /// One settlement pass. nullopt when the pool is empty. Stage failures are
    /// reported in the record (status failed) with the batch requeued at the
    /// head of the pool.
    std::optional<SettlementRecord> settle_once();

    std::optional<BatchView> get_batch(std::uint64_t batch_number);

    void start();
    void stop();
    /// Clears a pause caused by repeated settlement failures.
    void resume();
    /// Waits until nothing is queued or in flight. False on timeout.
    bool drain(std::chrono::milliseconds timeout);

    bool healthy() const { return !paused_.load(); }
    nlohmann::json metrics_json();
    std::vector<SettlementRecord> settlement_log() const;

    TxPool& pool() { return pool_; }
    Ledger& ledger() { return ledger_; }
    BatchStore& store() { return store_; }

private:
    void run_loop();
    void record(const SettlementRecord& rec);

    SequencerOptions options_;
    Clock& clock_;
    TxPool& pool_;
    BatchStore& store_;
    Ledger& ledger_;
    Prover prover_;

    std::mutex settle_mu_;
    std::uint64_t next_batch_;
    std::uint32_t consecutive_failures_ = 0;

    mutable std::mutex records_mu_;
    std::map<std::uint64_t, SettlementRecord> records_;
    std::vector<SettlementRecord> log_;
    std::ofstream log_file_;

    std::atomic<bool> running_{false};
    std::atomic<bool> paused_{false};
    std::thread worker_;

    std::atomic<std::uint64_t> accepted_{0};
    std::atomic<std::uint64_t> rejected_invalid_{0};
    std::atomic<std::uint64_t> rejected_full_{0};
    std::atomic<std::uint64_t> direct_committed_{0};
    std::atomic<std::uint64_t> direct_failed_{0};
};

}  // namespace zkr
