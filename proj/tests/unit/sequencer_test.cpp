#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "support.hpp"
#include "zkrollup/bench.hpp"
#include "zkrollup/errors.hpp"
#include "zkrollup/sequencer.hpp"

namespace zkr {
namespace {

// Local store whose puts fail while `failures` is positive.
class FlakyStore final : public BatchStore {
public:
    explicit FlakyStore(std::filesystem::path dir) : inner_(std::move(dir)) {}
    Cid put_bytes(std::string_view bytes) override {
        if (failures.load() > 0) {
            --failures;
            throw StorageError("injected store failure");
        }
        return inner_.put_bytes(bytes);
    }
    std::string get(const Cid& cid) override { return inner_.get(cid); }

    std::atomic<int> failures{0};

private:
    LocalBatchStore inner_;
};

struct Rig {
    explicit Rig(LatencyModel model = LatencyModel::instant(), Prover prover = {}, SequencerOptions opts = {})
        : km(setup(ProofBackend::reference)),
          store(dir.path() / "store"),
          pool(10000),
          ledger(model, clock, proof_gate(km)),
          seq(opts, clock, pool, store, ledger, prover ? std::move(prover) : reference_prover(km)) {}

    std::vector<std::uint64_t> submit(std::size_t n, std::uint64_t seed = 101) {
        std::mt19937_64 rng(seed);
        std::vector<std::uint64_t> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back(seq.submit(random_transaction(rng, clock.now_ms())).tracking_id);
        return ids;
    }

    std::vector<BatchPayload> committed_payloads() {
        std::vector<BatchPayload> out;
        for (std::uint64_t n = 1; n <= ledger.last_committed_batch(); ++n) {
            const auto c = ledger.query_batch(n);
            out.push_back(BatchPayload::parse(store.get(Cid::parse(c->ipfs_cid))));
        }
        return out;
    }

    test::TempDir dir;
    ProvingKeyMaterial km;
    SimClock clock{1000};
    FlakyStore store;
    TxPool pool;
    Ledger ledger;
    Sequencer seq;
};

TEST(SettlementRecord, TransitionsOnlyForward) {
    SettlementRecord r;
    r.advance(SettlementStatus::proved);
    EXPECT_THROW(r.advance(SettlementStatus::proved), std::logic_error);
    EXPECT_THROW(r.advance(SettlementStatus::committed), std::logic_error);
    r.advance(SettlementStatus::stored);
    r.advance(SettlementStatus::committed);
    EXPECT_THROW(r.advance(SettlementStatus::failed), std::logic_error);
    SettlementRecord f;
    f.advance(SettlementStatus::failed);
    EXPECT_THROW(f.advance(SettlementStatus::proved), std::logic_error);
}

TEST(SettlementRecord, JsonRoundTrip) {
    SettlementRecord r;
    r.batch_number = 3;
    r.real_count = 5;
    r.merkle_root = FieldElement::from_u64(9);
    r.cid = Cid::of("x").text();
    r.proof_gen_ms = 1.25;
    r.upload_ms = 0.5;
    r.l1_commit_ms = 800;
    r.status = SettlementStatus::failed;
    r.failed_stage = "store";
    r.error = "boom";
    r.tracking_ids = {1, 2, 3, 4, 5};
    const auto back = SettlementRecord::from_json(r.to_json());
    EXPECT_EQ(back.to_json(), r.to_json());
}

TEST(Sequencer, SealsFullThenPartialBatch) {
    Rig rig;
    const auto ids = rig.submit(37);
    const auto first = rig.seq.settle_once();
    ASSERT_TRUE(first);
    EXPECT_EQ(first->status, SettlementStatus::committed);
    EXPECT_EQ(first->real_count, 32U);
    EXPECT_EQ(first->batch_number, 1U);
    const auto second = rig.seq.settle_once();
    ASSERT_TRUE(second);
    EXPECT_EQ(second->real_count, 5U);
    EXPECT_EQ(second->batch_number, 2U);
    EXPECT_FALSE(rig.seq.settle_once());
    EXPECT_EQ(rig.ledger.query_batch(1)->tx_count, 32U);
    EXPECT_EQ(rig.ledger.query_batch(2)->tx_count, 5U);
    EXPECT_EQ(rig.pool.size() + rig.pool.in_flight(), 0U);

    const auto payloads = rig.committed_payloads();
    const auto r = bench::reconcile(ids, payloads, rig.pool.pending_ids());
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.settled_once, 37U);
}

TEST(Sequencer, AuditorRecomputesRootFromPublicData) {
    for (const std::size_t n : {1U, 5U, 31U, 32U}) {
        Rig rig;
        rig.submit(n, 200 + n);
        const auto rec = rig.seq.settle_once();
        ASSERT_EQ(rec->status, SettlementStatus::committed);
        // Only the on-chain commitment, the stored payload and the published dummy leaf.
        const auto onchain = rig.ledger.query_batch(rec->batch_number);
        const auto payload = BatchPayload::parse(rig.store.get(Cid::parse(onchain->ipfs_cid)));
        LeafVector leaves;
        leaves.fill(FieldElement::from_hex(kDummyLeafHex));
        for (std::size_t i = 0; i < payload.transactions.size(); ++i) leaves[i] = leaf_encode(payload.transactions[i]);
        EXPECT_EQ(build_tree(leaves).root(), onchain->merkle_root) << n;
        EXPECT_EQ(payload.real_count, n);
    }
}

TEST(Sequencer, StoreFailureRequeuesAndRetries) {
    Rig rig;
    const auto ids = rig.submit(10);
    rig.store.failures = 2;
    auto rec = rig.seq.settle_once();
    EXPECT_EQ(rec->status, SettlementStatus::failed);
    EXPECT_EQ(rec->failed_stage, "store");
    EXPECT_EQ(rig.pool.size(), 10U);
    rec = rig.seq.settle_once();
    EXPECT_EQ(rec->status, SettlementStatus::failed);
    EXPECT_EQ(rec->attempt, 2U);
    rec = rig.seq.settle_once();
    EXPECT_EQ(rec->status, SettlementStatus::committed);
    EXPECT_EQ(rec->batch_number, 1U);
    EXPECT_EQ(rec->tracking_ids, ids);

    const auto r = bench::reconcile(ids, rig.committed_payloads(), rig.pool.pending_ids());
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.settled_once, 10U);
    EXPECT_EQ(rig.seq.settlement_log().size(), 3U);
}

TEST(Sequencer, ProverFailureIsReported) {
    std::atomic<int> calls{0};
    auto km = setup(ProofBackend::reference);
    Rig rig(LatencyModel::instant(), [&calls, km](const RollupStatement& st) {
        if (calls++ == 0) throw ProvingError("injected prover failure");
        return prove(km, st);
    });
    rig.submit(3);
    EXPECT_EQ(rig.seq.settle_once()->failed_stage, "prove");
    EXPECT_EQ(rig.seq.settle_once()->status, SettlementStatus::committed);
}

TEST(Sequencer, InvalidProofRejectedByLedger) {
    auto km = setup(ProofBackend::reference);
    Rig rig(LatencyModel::instant(), [km](const RollupStatement& st) {
        auto p = prove(km, st);
        p.proof_bytes[40] ^= 1;
        return p;
    });
    rig.submit(4);
    const auto rec = rig.seq.settle_once();
    EXPECT_EQ(rec->status, SettlementStatus::failed);
    EXPECT_EQ(rec->failed_stage, "commit");
    EXPECT_TRUE(rig.ledger.state().empty());
    EXPECT_EQ(rig.pool.size(), 4U);
}

TEST(Sequencer, GetBatch) {
    Rig rig;
    rig.submit(2);
    rig.seq.settle_once();
    const auto view = rig.seq.get_batch(1);
    ASSERT_TRUE(view);
    EXPECT_EQ(view->record.status, SettlementStatus::committed);
    ASSERT_TRUE(view->commitment);
    EXPECT_EQ(view->commitment->merkle_root, view->record.merkle_root);
    EXPECT_FALSE(rig.seq.get_batch(2));
}

TEST(Sequencer, RejectsInvalidSubmissions) {
    Rig rig;
    Transaction bad{"DUMMY", "p", Cid::of("").text(), 0};
    EXPECT_THROW(rig.seq.submit(bad), ValidationError);
    EXPECT_EQ(rig.seq.metrics_json()["rejectedInvalid"], 1);
}

TEST(Sequencer, IngestionDoesNotWaitForSettlement) {
    auto km = setup(ProofBackend::reference);
    SequencerOptions opts;
    opts.settle_interval_ms = 20;
    Rig rig(LatencyModel::instant(), reference_prover(km, std::chrono::milliseconds(300)), opts);
    rig.seq.start();
    rig.submit(1, 1);
    std::this_thread::sleep_for(std::chrono::milliseconds(60));  // settlement is now proving
    std::mt19937_64 rng(5);
    double worst_ms = 0;
    for (int i = 0; i < 50; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        rig.seq.submit(random_transaction(rng, 0));
        worst_ms = std::max(worst_ms, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    EXPECT_LT(worst_ms, 100.0);
    EXPECT_TRUE(rig.seq.drain(std::chrono::seconds(10)));
    rig.seq.stop();
    EXPECT_EQ(rig.ledger.last_committed_batch(), 3U);  // 1, then 32 + 18 after the slow proof
}

TEST(Sequencer, LoopPausesAfterRetryCap) {
    SequencerOptions opts;
    opts.settle_interval_ms = 10;
    opts.max_settle_retries = 3;
    opts.retry_backoff_ms = 1;
    Rig rig(LatencyModel::instant(), {}, opts);
    rig.store.failures = 1000;
    rig.submit(2);
    rig.seq.start();
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (rig.seq.healthy() && std::chrono::steady_clock::now() < deadline) {
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    EXPECT_FALSE(rig.seq.healthy());
    EXPECT_EQ(rig.seq.settlement_log().size(), 3U);
    rig.store.failures = 0;
    rig.seq.resume();
    EXPECT_TRUE(rig.seq.drain(std::chrono::seconds(5)));
    rig.seq.stop();
    EXPECT_TRUE(rig.seq.healthy());
    EXPECT_EQ(rig.ledger.last_committed_batch(), 1U);
}

TEST(Sequencer, SettlementLogFile) {
    test::TempDir dir;
    SequencerOptions opts;
    opts.settlement_log = dir / "settlement.jsonl";
    Rig rig(LatencyModel::instant(), {}, opts);
    rig.submit(40);
    rig.seq.settle_once();
    rig.seq.settle_once();
    const auto records = bench::load_settlement_log(opts.settlement_log);
    ASSERT_EQ(records.size(), 2U);
    for (const auto& r : records) {
        EXPECT_EQ(r.status, SettlementStatus::committed);
        EXPECT_GE(r.proof_gen_ms, 0.0);
        EXPECT_GE(r.upload_ms, 0.0);
        EXPECT_GE(r.l1_commit_ms, 0.0);
    }
    const auto m = rig.seq.metrics_json();
    EXPECT_EQ(m["batchesCommitted"], 2);
    EXPECT_EQ(m["stages"]["proofGenMs"]["count"], 2);
}

}  // namespace
}  // namespace zkr
