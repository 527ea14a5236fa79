#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "support.hpp"
#include "zkrollup/bench.hpp"
#include "zkrollup/cid.hpp"
#include "zkrollup/errors.hpp"
#include "zkrollup/ledger.hpp"

namespace zkr {
namespace {

const ProvingKeyMaterial& material() {
    static const ProvingKeyMaterial km = setup(ProofBackend::reference);
    return km;
}

BatchCommitment honest_commitment(std::uint64_t batch, std::mt19937_64& rng, std::size_t n = 4) {
    std::vector<Transaction> txs;
    for (std::size_t i = 0; i < n; ++i) txs.push_back(random_transaction(rng, 1));
    const auto draft = pad_batch(txs);
    const auto root = build_tree(draft.leaves).root();
    BatchCommitment c;
    c.batch_number = batch;
    c.merkle_root = root;
    c.ipfs_cid = Cid::of("payload-" + std::to_string(batch)).text();
    c.tx_count = n;
    c.proof_bytes = prove(material(), {root, draft.leaves}).proof_bytes;
    return c;
}

Transaction tx_with_id(const std::string& id) {
    return {id, "participant", Cid::of(id).text(), 42};
}

TEST(Ledger, InstantModelCommitsImmediately) {
    SimClock clock(1000);
    Ledger ledger(LatencyModel::instant(), clock, proof_gate(material()));
    const auto r = ledger.create_asset(tx_with_id("a1"));
    EXPECT_EQ(r.latency_ms(), 0);
    EXPECT_EQ(clock.now_ms(), 1000);
    EXPECT_EQ(ledger.query("a1"), canonical_bytes(tx_with_id("a1")));
    EXPECT_EQ(ledger.query("nope"), std::nullopt);
}

TEST(Ledger, DuplicateAndReservedKeysRejected) {
    SimClock clock;
    Ledger ledger(LatencyModel::calibrated(), clock, proof_gate(material()));
    ledger.submit_create_asset(tx_with_id("dup"));
    // Still in flight: the duplicate check covers pending keys too.
    EXPECT_THROW(ledger.submit_create_asset(tx_with_id("dup")), EndorsementError);
    clock.advance_by(5000);
    const auto before = ledger.state();
    const auto blocks_before = ledger.blocks().size();
    EXPECT_THROW(ledger.create_asset(tx_with_id("dup")), EndorsementError);
    EXPECT_THROW(ledger.create_asset(tx_with_id("BATCH_9")), EndorsementError);
    EXPECT_EQ(ledger.state(), before);
    EXPECT_EQ(ledger.blocks().size(), blocks_before);
}

TEST(Ledger, SingleTransactionLatencyWindow) {
    const LatencyModel m{300, 500, 200, 500, 10};
    for (std::int64_t offset = 0; offset < 2000; offset += 7) {
        SimClock clock(0);
        Ledger ledger(m, clock, proof_gate(material()));
        clock.advance_to(offset);
        const auto r = ledger.create_asset(tx_with_id("x"));
        ASSERT_GE(r.latency_ms(), 1000) << offset;
        ASSERT_LE(r.latency_ms(), 1000 + m.block_interval_ms) << offset;
        ASSERT_EQ(clock.now_ms(), r.committed_at);
    }
}

TEST(Ledger, StateOnlyReflectsCommittedBlocks) {
    SimClock clock;
    Ledger ledger(LatencyModel::calibrated(), clock, proof_gate(material()));
    const auto r = ledger.submit_create_asset(tx_with_id("p"));
    EXPECT_EQ(ledger.query("p"), std::nullopt);
    EXPECT_EQ(ledger.pending_transactions(), 1U);
    clock.advance_to(r.committed_at - 1);
    EXPECT_EQ(ledger.query("p"), std::nullopt);
    clock.advance_to(r.committed_at);
    EXPECT_TRUE(ledger.query("p").has_value());
    EXPECT_EQ(ledger.pending_transactions(), 0U);
}

TEST(Ledger, BlocksRespectCapacityAndCommitOrder) {
    SimClock clock;
    const LatencyModel m = LatencyModel::calibrated();
    Ledger ledger(m, clock, proof_gate(material()));
    for (int i = 0; i < 20; ++i) ledger.submit_create_asset(tx_with_id("k" + std::to_string(i)));
    clock.advance_by(60000);
    const auto blocks = ledger.blocks();
    std::size_t total = 0;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        ASSERT_LE(blocks[i].txs.size(), m.max_tx_per_block);
        ASSERT_EQ(blocks[i].number, i + 1);
        ASSERT_GE(blocks[i].committed_at, blocks[i].cut_at + m.commit_ms);
        if (i > 0) {
            ASSERT_GE(blocks[i].committed_at, blocks[i - 1].committed_at + m.commit_ms);
        }
        total += blocks[i].txs.size();
    }
    EXPECT_EQ(total, 20U);
    EXPECT_EQ(blocks.size(), 7U);  // ceil(20 / 3)
}

TEST(Ledger, CommitBatchStoresMetadataOnly) {
    SimClock clock;
    std::mt19937_64 rng(81);
    Ledger ledger(LatencyModel::instant(), clock, proof_gate(material()));
    const auto c = honest_commitment(1, rng);
    ledger.commit_batch(c);
    const auto stored = ledger.query_batch(1);
    ASSERT_TRUE(stored.has_value());
    EXPECT_EQ(stored->merkle_root, c.merkle_root);
    EXPECT_EQ(stored->ipfs_cid, c.ipfs_cid);
    EXPECT_EQ(stored->tx_count, c.tx_count);
    EXPECT_EQ(stored->proof_bytes, c.proof_bytes);
    EXPECT_EQ(ledger.state().size(), 1U);
    EXPECT_EQ(ledger.last_committed_batch(), 1U);
    EXPECT_TRUE(ledger.query("BATCH_1").has_value());
}

TEST(Ledger, CommitBatchOrderingRules) {
    SimClock clock;
    std::mt19937_64 rng(82);
    Ledger ledger(LatencyModel::instant(), clock, proof_gate(material()));
    EXPECT_THROW(ledger.commit_batch(honest_commitment(2, rng)), EndorsementError);  // gap
    ledger.commit_batch(honest_commitment(1, rng));
    EXPECT_THROW(ledger.commit_batch(honest_commitment(1, rng)), EndorsementError);  // replay
    auto zero = honest_commitment(2, rng);
    zero.tx_count = 0;
    EXPECT_THROW(ledger.commit_batch(zero), EndorsementError);
    auto too_many = honest_commitment(2, rng);
    too_many.tx_count = 33;
    EXPECT_THROW(ledger.commit_batch(too_many), EndorsementError);
    auto bad_cid = honest_commitment(2, rng);
    bad_cid.ipfs_cid = "Qm-not-a-cid";
    EXPECT_THROW(ledger.commit_batch(bad_cid), EndorsementError);
    ledger.commit_batch(honest_commitment(2, rng));
    EXPECT_EQ(ledger.last_committed_batch(), 2U);
}

TEST(Ledger, ProofGateNeverWrites) {
    SimClock clock;
    std::mt19937_64 rng(83);
    Ledger ledger(LatencyModel::instant(), clock, proof_gate(material()));
    ledger.commit_batch(honest_commitment(1, rng));
    const auto state = ledger.state();
    const auto log = ledger.export_jsonl();
    for (int i = 0; i < 150; ++i) {
        auto c = honest_commitment(2, rng);
        if (i % 3 == 0) {
            c.merkle_root = honest_commitment(2, rng).merkle_root;  // root from another batch
        } else if (i % 3 == 1) {
            const std::size_t bit = rng() % (c.proof_bytes.size() * 8);
            c.proof_bytes[bit / 8] ^= static_cast<std::uint8_t>(1U << (bit % 8));
        } else {
            c.proof_bytes.resize(rng() % c.proof_bytes.size());
        }
        ASSERT_THROW(ledger.commit_batch(c), EndorsementError);
        ASSERT_EQ(ledger.state(), state);
        ASSERT_EQ(ledger.export_jsonl(), log);
    }
    EXPECT_NO_THROW(ledger.commit_batch(honest_commitment(2, rng)));
}

TEST(Ledger, ReplayReproducesState) {
    SimClock clock;
    std::mt19937_64 rng(84);
    Ledger ledger(LatencyModel::calibrated(), clock, proof_gate(material()));
    for (int i = 0; i < 10; ++i) {
        ledger.create_asset(random_transaction(rng, clock.now_ms()));
        if (i % 3 == 0) ledger.commit_batch(honest_commitment(ledger.last_committed_batch() + 1, rng));
    }
    const auto blocks = ledger.blocks();
    EXPECT_EQ(Ledger::replay(blocks), ledger.state());

    std::vector<Block> parsed;
    std::istringstream in(ledger.export_jsonl());
    for (std::string line; std::getline(in, line);) parsed.push_back(Block::from_json(nlohmann::json::parse(line)));
    EXPECT_EQ(Ledger::replay(parsed), ledger.state());
}

TEST(Ledger, DeterministicBlockLog) {
    const auto run = [] {
        SimClock clock;
        std::mt19937_64 rng(85);
        Ledger ledger(LatencyModel::calibrated(), clock, proof_gate(material()));
        for (int i = 0; i < 50; ++i) {
            clock.advance_by(static_cast<std::int64_t>(rng() % 300));
            ledger.submit_create_asset(random_transaction(rng, clock.now_ms()));
        }
        clock.advance_by(60000);
        return ledger.export_jsonl();
    };
    const std::string a = run();
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, run());
}

TEST(Ledger, BlockLogFile) {
    test::TempDir dir;
    SimClock clock;
    Ledger ledger(LatencyModel::instant(), clock, proof_gate(material()));
    ledger.set_block_log(dir / "blocks.jsonl");
    ledger.create_asset(tx_with_id("f1"));
    ledger.create_asset(tx_with_id("f2"));
    ledger.advance();
    std::ifstream in(dir / "blocks.jsonl");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), ledger.export_jsonl());
}

TEST(Ledger, ThroughputCeiling) {
    const auto m = LatencyModel::calibrated();
    EXPECT_DOUBLE_EQ(m.throughput_ceiling_tps(), 6.0);
    // Saturated: many more clients than block slots.
    const auto heavy = bench::simulate_direct_load(m, 200, 60, 0);
    EXPECT_LE(heavy.throughput_rps, m.throughput_ceiling_tps() * 1.1);
    EXPECT_GE(heavy.throughput_rps, m.throughput_ceiling_tps() * 0.9);
    const auto base = bench::simulate_direct_load(m, 20, 30, 0);
    EXPECT_GE(base.throughput_rps, 5.0 * 0.8);
    EXPECT_LE(base.throughput_rps, 7.0 * 1.2);
    EXPECT_GE(base.mean_latency_ms, 2500.0 * 0.8);
    EXPECT_LE(base.mean_latency_ms, 3500.0 * 1.2);
}

TEST(Ledger, LatencyModelJsonAndValidation) {
    const auto m = LatencyModel::calibrated();
    const auto back = LatencyModel::from_json(m.to_json());
    EXPECT_EQ(back.to_json(), m.to_json());
    auto j = m.to_json();
    j["commitMs"] = -1;
    EXPECT_THROW(LatencyModel::from_json(j), ConfigError);
    j = m.to_json();
    j["maxTxPerBlock"] = 0;
    EXPECT_THROW(LatencyModel::from_json(j), ConfigError);
    j.erase("orderMs");
    EXPECT_THROW(LatencyModel::from_json(j), ConfigError);
}

}  // namespace
}  // namespace zkr
