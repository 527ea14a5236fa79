#include "zkrollup/sequencer.hpp"

#include <algorithm>
#include <stdexcept>

#include "zkrollup/errors.hpp"
#include "zkrollup/merkle32.hpp"

namespace zkr {

namespace {

using SteadyClock = std::chrono::steady_clock;

double elapsed_ms(SteadyClock::time_point since) {
    return std::chrono::duration<double, std::milli>(SteadyClock::now() - since).count();
}

nlohmann::json timing_summary(const std::vector<double>& xs) {
    if (xs.empty()) return {{"count", 0}, {"mean", 0.0}, {"max", 0.0}};
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return {{"count", xs.size()},
            {"mean", sum / static_cast<double>(xs.size())},
            {"max", *std::max_element(xs.begin(), xs.end())}};
}

}  // namespace

std::string_view to_string(SettlementStatus s) {
    switch (s) {
        case SettlementStatus::sealed: return "sealed";
        case SettlementStatus::proved: return "proved";
        case SettlementStatus::stored: return "stored";
        case SettlementStatus::committed: return "committed";
        case SettlementStatus::failed: return "failed";
    }
    return "unknown";
}

SettlementStatus parse_settlement_status(std::string_view s) {
    for (const auto st : {SettlementStatus::sealed, SettlementStatus::proved, SettlementStatus::stored,
                          SettlementStatus::committed, SettlementStatus::failed}) {
        if (to_string(st) == s) return st;
    }
    throw ValidationError("unknown settlement status '" + std::string(s) + "'");
}

void SettlementRecord::advance(SettlementStatus next) {
    const bool terminal = status == SettlementStatus::committed || status == SettlementStatus::failed;
    const bool ok = !terminal && (next == SettlementStatus::failed ||
                                  static_cast<int>(next) == static_cast<int>(status) + 1);
    if (!ok) {
        throw std::logic_error("illegal settlement transition " + std::string(to_string(status)) +
                               " -> " + std::string(to_string(next)));
    }
    status = next;
}

nlohmann::json SettlementRecord::to_json() const {
    nlohmann::json j{{"batchNumber", batch_number},
                     {"realCount", real_count},
                     {"merkleRoot", merkle_root.to_hex()},
                     {"cid", cid},
                     {"proofGenMs", proof_gen_ms},
                     {"uploadMs", upload_ms},
                     {"l1CommitMs", l1_commit_ms},
                     {"status", to_string(status)},
                     {"attempt", attempt},
                     {"sealedAt", sealed_at},
                     {"committedAt", committed_at},
                     {"trackingIds", tracking_ids}};
    if (status == SettlementStatus::failed) {
        j["failedStage"] = failed_stage;
        j["error"] = error;
    }
    return j;
}

SettlementRecord SettlementRecord::from_json(const nlohmann::json& j) {
    try {
        SettlementRecord r;
        r.batch_number = j.at("batchNumber").get<std::uint64_t>();
        r.real_count = j.at("realCount").get<std::size_t>();
        r.merkle_root = FieldElement::from_hex(j.at("merkleRoot").get<std::string>());
        r.cid = j.at("cid").get<std::string>();
        r.proof_gen_ms = j.at("proofGenMs").get<double>();
        r.upload_ms = j.at("uploadMs").get<double>();
        r.l1_commit_ms = j.at("l1CommitMs").get<double>();
        r.status = parse_settlement_status(j.at("status").get<std::string>());
        r.attempt = j.value("attempt", 1U);
        r.sealed_at = j.value("sealedAt", std::int64_t{0});
        r.committed_at = j.value("committedAt", std::int64_t{0});
        r.tracking_ids = j.value("trackingIds", std::vector<std::uint64_t>{});
        r.failed_stage = j.value("failedStage", "");
        r.error = j.value("error", "");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed settlement record: ") + e.what());
    }
}

Prover reference_prover(ProvingKeyMaterial material, std::chrono::milliseconds simulated_cost) {
    return [material = std::move(material), simulated_cost](const RollupStatement& st) {
        const auto start = SteadyClock::now();
        RollupProof proof = prove(material, st);
        if (simulated_cost.count() > 0) std::this_thread::sleep_for(simulated_cost);
        proof.prover_time_ms = elapsed_ms(start);
        return proof;
    };
}

Sequencer::Sequencer(SequencerOptions options, Clock& clock, TxPool& pool, BatchStore& store,
                     Ledger& ledger, Prover prover)
    : options_(std::move(options)),
      clock_(clock),
      pool_(pool),
      store_(store),
      ledger_(ledger),
      prover_(std::move(prover)),
      next_batch_(ledger.last_committed_batch() + 1) {
    if (!prover_) throw ConfigError("sequencer needs a prover");
    if (options_.settle_interval_ms <= 0) throw ConfigError("settle interval must be positive");
    if (!options_.settlement_log.empty()) {
        log_file_.open(options_.settlement_log, std::ios::app);
        if (!log_file_) {
            throw StorageError("cannot open settlement log " + options_.settlement_log.string());
        }
    }
}

Sequencer::~Sequencer() { stop(); }

AcceptanceReceipt Sequencer::submit(const Transaction& tx) {
    try {
        validate(tx);
    } catch (const ValidationError&) {
        rejected_invalid_.fetch_add(1);
        throw;
    }
    const std::int64_t now = clock_.now_ms();
    try {
        const std::uint64_t id = pool_.push(tx, now);
        accepted_.fetch_add(1);
        return {id, now};
    } catch (const PoolFullError&) {
        rejected_full_.fetch_add(1);
        throw;
    }
}

CommitReceipt Sequencer::submit_direct(const Transaction& tx) {
    try {
        validate(tx);
        CommitReceipt r = ledger_.create_asset(tx);
        direct_committed_.fetch_add(1);
        return r;
    } catch (...) {
        direct_failed_.fetch_add(1);
        throw;
    }
}

std::optional<SettlementRecord> Sequencer::settle_once() {
    std::lock_guard settle_lock(settle_mu_);
    std::vector<PooledTx> entries = pool_.take(kBatchLeaves);
    if (entries.empty()) return std::nullopt;

    SettlementRecord rec;
    rec.batch_number = next_batch_;
    rec.real_count = entries.size();
    rec.attempt = consecutive_failures_ + 1;
    rec.sealed_at = clock_.now_ms();
    std::vector<Transaction> txs;
    txs.reserve(entries.size());
    for (const auto& e : entries) {
        txs.push_back(e.tx);
        rec.tracking_ids.push_back(e.tracking_id);
    }

    std::string_view stage = "seal";
    try {
        const BatchDraft draft = pad_batch(txs);
        const MerkleTree32 tree = build_tree(draft.leaves);
        rec.merkle_root = tree.root();

        stage = "prove";
        auto t0 = SteadyClock::now();
        const RollupProof proof = prover_(RollupStatement{tree.root(), draft.leaves});
        rec.proof_gen_ms = elapsed_ms(t0);
        rec.advance(SettlementStatus::proved);

        stage = "store";
        BatchPayload payload{rec.batch_number, txs, rec.tracking_ids, rec.real_count, clock_.now_ms()};
        t0 = SteadyClock::now();
        const Cid cid = store_.put(payload);
        rec.upload_ms = elapsed_ms(t0);
        rec.cid = cid.text();
        rec.advance(SettlementStatus::stored);

        stage = "commit";
        BatchCommitment commitment;
        commitment.batch_number = rec.batch_number;
        commitment.merkle_root = rec.merkle_root;
        commitment.ipfs_cid = rec.cid;
        commitment.tx_count = rec.real_count;
        commitment.proof_bytes = proof.proof_bytes;
        const CommitReceipt receipt = ledger_.commit_batch(std::move(commitment));
        rec.l1_commit_ms = static_cast<double>(receipt.latency_ms());
        rec.committed_at = receipt.committed_at;
        rec.advance(SettlementStatus::committed);

        pool_.acknowledge(entries);
        ++next_batch_;
        consecutive_failures_ = 0;
    } catch (const std::exception& e) {
        rec.advance(SettlementStatus::failed);
        rec.failed_stage = std::string(stage);
        rec.error = e.what();
        pool_.requeue_front(std::move(entries));
        ++consecutive_failures_;
        if (running_.load() && consecutive_failures_ >= options_.max_settle_retries) paused_ = true;
    }
    record(rec);
    return rec;
}

void Sequencer::record(const SettlementRecord& rec) {
    std::lock_guard lock(records_mu_);
    records_[rec.batch_number] = rec;
    log_.push_back(rec);
    if (log_file_.is_open()) {
        log_file_ << rec.to_json().dump() << '\n';
        log_file_.flush();
    }
}

std::optional<BatchView> Sequencer::get_batch(std::uint64_t batch_number) {
    std::optional<SettlementRecord> rec;
    {
        std::lock_guard lock(records_mu_);
        const auto it = records_.find(batch_number);
        if (it != records_.end()) rec = it->second;
    }
    if (!rec) return std::nullopt;
    return BatchView{*rec, ledger_.query_batch(batch_number)};
}

void Sequencer::start() {
    if (running_.exchange(true)) return;
    worker_ = std::thread([this] { run_loop(); });
}

void Sequencer::stop() {
    if (!running_.exchange(false)) return;
    pool_.interrupt();
    if (worker_.joinable()) worker_.join();
}

void Sequencer::resume() {
    std::lock_guard lock(settle_mu_);
    consecutive_failures_ = 0;
    paused_ = false;
}

void Sequencer::run_loop() {
    const auto interval = std::chrono::milliseconds(options_.settle_interval_ms);
    while (running_.load()) {
        const std::size_t queued = pool_.wait_for(kBatchLeaves, interval);
        if (!running_.load()) break;
        if (paused_.load() || queued == 0) {
            if (paused_.load()) std::this_thread::sleep_for(interval);
            continue;
        }
        const auto rec = settle_once();
        if (rec && rec->status == SettlementStatus::failed) {
            std::this_thread::sleep_for(std::chrono::milliseconds(options_.retry_backoff_ms));
        }
    }
}

bool Sequencer::drain(std::chrono::milliseconds timeout) {
    const auto deadline = SteadyClock::now() + timeout;
    while (SteadyClock::now() < deadline) {
        if (pool_.size() == 0 && pool_.in_flight() == 0) return true;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    return pool_.size() == 0 && pool_.in_flight() == 0;
}

std::vector<SettlementRecord> Sequencer::settlement_log() const {
    std::lock_guard lock(records_mu_);
    return log_;
}

nlohmann::json Sequencer::metrics_json() {
    std::vector<double> proof_ms, upload_ms, commit_ms;
    std::uint64_t committed = 0, failed = 0;
    {
        std::lock_guard lock(records_mu_);
        for (const auto& r : log_) {
            if (r.status == SettlementStatus::committed) {
                ++committed;
                proof_ms.push_back(r.proof_gen_ms);
                upload_ms.push_back(r.upload_ms);
                commit_ms.push_back(r.l1_commit_ms);
            } else if (r.status == SettlementStatus::failed) {
                ++failed;
            }
        }
    }
    return {{"accepted", accepted_.load()},
            {"rejectedInvalid", rejected_invalid_.load()},
            {"rejectedFull", rejected_full_.load()},
            {"directCommitted", direct_committed_.load()},
            {"directFailed", direct_failed_.load()},
            {"batchesCommitted", committed},
            {"batchesFailed", failed},
            {"poolSize", pool_.size()},
            {"inFlight", pool_.in_flight()},
            {"lastCommittedBatch", ledger_.last_committed_batch()},
            {"paused", paused_.load()},
            {"stages",
             {{"proofGenMs", timing_summary(proof_ms)},
              {"uploadMs", timing_summary(upload_ms)},
              {"l1CommitMs", timing_summary(commit_ms)}}}};
}

}  // namespace zkr
