#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "zkrollup/bench.hpp"
#include "zkrollup/config.hpp"
#include "zkrollup/errors.hpp"

namespace zkr::bench {
namespace {

BenchReport synthetic_report(WorkloadMode mode, std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    BenchReport r;
    r.spec = WorkloadSpec::defaults(mode);
    for (std::size_t i = 0; i < n; ++i) {
        RequestSample s;
        s.vu = static_cast<std::uint32_t>(i % 7);
        s.start_ms = static_cast<double>(i) * 13.37;
        s.latency_ms = std::uniform_real_distribution<double>(0.1, 4000.0)(rng);
        s.status = i % 17 == 0 ? 409 : 200;
        s.tracking_id = mode == WorkloadMode::rollup ? i + 1 : 0;
        r.samples.push_back(s);
    }
    r.summarize();
    return r;
}

TEST(LatencyStats, NearestRank) {
    std::vector<double> v;
    for (int i = 100; i >= 1; --i) v.push_back(i);
    const auto s = LatencyStats::compute(v);
    EXPECT_EQ(s.count, 100U);
    EXPECT_DOUBLE_EQ(s.min, 1);
    EXPECT_DOUBLE_EQ(s.max, 100);
    EXPECT_DOUBLE_EQ(s.avg, 50.5);
    EXPECT_DOUBLE_EQ(s.p50, 50);
    EXPECT_DOUBLE_EQ(s.p90, 90);
    EXPECT_DOUBLE_EQ(s.p95, 95);
    EXPECT_EQ(LatencyStats::compute({}), LatencyStats{});
    const std::vector<double> one{7.5};
    EXPECT_DOUBLE_EQ(LatencyStats::compute(one).p95, 7.5);
}

TEST(WorkloadSpec, Defaults) {
    const auto b = WorkloadSpec::defaults(WorkloadMode::baseline);
    EXPECT_EQ(b.virtual_users, 20U);
    EXPECT_EQ(b.duration_sec, 30);
    EXPECT_EQ(b.endpoint, "/submit-direct");
    EXPECT_EQ(b.think_time_ms, 0);
    const auto r = WorkloadSpec::defaults(WorkloadMode::rollup);
    EXPECT_EQ(r.virtual_users, 50U);
    EXPECT_EQ(r.endpoint, "/submit");
    EXPECT_THROW(parse_mode("burst"), ConfigError);
}

TEST(BenchReport, ThroughputAndSuccessRate) {
    const auto r = synthetic_report(WorkloadMode::baseline, 1, 300);
    const std::size_t failures = (300 + 16) / 17;
    EXPECT_EQ(r.successes, 300 - failures);
    EXPECT_DOUBLE_EQ(r.throughput_rps, static_cast<double>(300 - failures) / 30.0);
    EXPECT_DOUBLE_EQ(r.success_rate, static_cast<double>(300 - failures) / 300.0);
}

TEST(BenchReport, StatsRecomputeFromRawDump) {
    test::TempDir dir;
    const auto r = synthetic_report(WorkloadMode::rollup, 2, 5000);
    write_report(r, dir.path());
    auto loaded = load_report(dir.path());
    ASSERT_EQ(loaded.samples.size(), r.samples.size());
    const LatencyStats stored = loaded.latency;
    const double stored_tps = loaded.throughput_rps;
    loaded.summarize();
    EXPECT_EQ(loaded.latency, stored);
    EXPECT_EQ(loaded.latency, r.latency);
    EXPECT_EQ(loaded.throughput_rps, stored_tps);
    EXPECT_EQ(loaded.accepted_ids(), r.accepted_ids());
}

TEST(BenchReport, CsvRejectsGarbage) {
    EXPECT_THROW(samples_from_csv("h\n1,2,3\n"), ValidationError);
    EXPECT_THROW(samples_from_csv("h\n1,x,3,200,0\n"), ValidationError);
    EXPECT_TRUE(samples_from_csv("vu,start_ms,latency_ms,status,tracking_id\n").empty());
}

TEST(Compare, IdenticalReportsGiveUnitRatios) {
    const auto r = synthetic_report(WorkloadMode::baseline, 3, 200);
    const auto c = compare(r, r);
    EXPECT_DOUBLE_EQ(c.document["throughputRatio"].get<double>(), 1.0);
    for (const auto& [name, v] : c.document["latencyRatios"].items()) EXPECT_DOUBLE_EQ(v.get<double>(), 1.0) << name;
    EXPECT_TRUE(c.document["warnings"].empty());
}

TEST(Compare, RatiosSeriesAndWarnings) {
    auto base = synthetic_report(WorkloadMode::baseline, 4, 180);
    auto roll = synthetic_report(WorkloadMode::rollup, 5, 3000);
    for (auto& s : roll.samples) s.latency_ms /= 10.0;
    roll.summarize();
    roll.spec.duration_sec = 31;
    roll.summarize();
    for (std::uint64_t b = 1; b <= 4; ++b) {
        SettlementRecord rec;
        rec.batch_number = b;
        rec.real_count = 32;
        rec.proof_gen_ms = 10.0 * b;
        rec.status = b == 3 ? SettlementStatus::failed : SettlementStatus::committed;
        roll.settlement.push_back(rec);
    }
    const auto c = compare(base, roll);
    EXPECT_NEAR(c.document["throughputRatio"].get<double>(), roll.throughput_rps / base.throughput_rps, 1e-12);
    EXPECT_EQ(c.document["settlementSeries"].size(), 3U);
    EXPECT_EQ(c.document["warnings"].size(), 1U);
    EXPECT_NE(c.table.find("warning: durations differ"), std::string::npos);
    EXPECT_EQ(std::count(c.settlement_csv.begin(), c.settlement_csv.end(), '\n'), 4);
    EXPECT_NE(c.csv.find("latency_avg_ms,"), std::string::npos);
}

TEST(Reconcile, CleanLostDuplicatedPending) {
    BatchPayload a, b;
    a.tracking_ids = {1, 2, 3};
    b.tracking_ids = {4, 5};
    std::vector<std::uint64_t> accepted{1, 2, 3, 4, 5};
    std::vector<BatchPayload> payloads{a, b};
    auto r = reconcile(accepted, payloads, {});
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.settled_once, 5U);

    accepted.push_back(6);
    accepted.push_back(7);
    const std::vector<std::uint64_t> pending{7};
    r = reconcile(accepted, payloads, pending);
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(r.lost, std::vector<std::uint64_t>{6});
    EXPECT_EQ(r.pending, std::vector<std::uint64_t>{7});

    payloads[1].tracking_ids.push_back(2);
    payloads[1].tracking_ids.push_back(99);
    r = reconcile(accepted, payloads, pending);
    EXPECT_EQ(r.duplicated, std::vector<std::uint64_t>{2});
    EXPECT_EQ(r.unexpected, std::vector<std::uint64_t>{99});
}

TEST(RunWorkload, ZeroUsersGivesEmptyReport) {
    auto spec = WorkloadSpec::defaults(WorkloadMode::baseline);
    spec.virtual_users = 0;
    spec.base_url = "http://127.0.0.1:1";
    const auto r = run_workload(spec);
    EXPECT_EQ(r.requests, 0U);
    EXPECT_EQ(r.throughput_rps, 0.0);
}

TEST(RunWorkload, UnreachableTargetAborts) {
    auto spec = WorkloadSpec::defaults(WorkloadMode::baseline);
    spec.base_url = "http://127.0.0.1:1";
    EXPECT_THROW(run_workload(spec), Error);
}

TEST(RunWorkload, LiveRollupRunReconciles) {
    test::TempDir dir;
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.http_threads = 16;
    cfg.store_dir = dir / "store";
    cfg.latency = LatencyModel::instant();
    cfg.sequencer.settle_interval_ms = 50;
    RollupNode node(cfg);
    const int port = node.start();

    auto spec = WorkloadSpec::defaults(WorkloadMode::rollup);
    spec.virtual_users = 4;
    spec.duration_sec = 1;
    spec.base_url = "http://127.0.0.1:" + std::to_string(port);
    const auto report = run_workload(spec);
    EXPECT_GT(report.successes, 0U);
    EXPECT_EQ(report.successes, report.requests);
    for (std::size_t i = 1; i < report.samples.size(); ++i) {
        ASSERT_LE(report.samples[i - 1].start_ms, report.samples[i].start_ms);
    }
    // At most one request in flight per user: per-user intervals never overlap.
    std::map<std::uint32_t, double> busy_until;
    for (const auto& s : report.samples) {
        ASSERT_GE(s.start_ms + 1e-6, busy_until[s.vu]);
        busy_until[s.vu] = s.start_ms + s.latency_ms;
    }
    ASSERT_TRUE(node.sequencer().drain(std::chrono::seconds(20)));
    const auto r = reconcile_remote(report, spec.base_url);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.settled_once, report.successes);
    EXPECT_TRUE(r.pending.empty());
    node.stop();
}

TEST(Calibration, SweepFindsTarget) {
    const auto points = calibrate(LatencyModel::calibrated(), 20, 30, 0, 6.0, 3000.0);
    ASSERT_FALSE(points.empty());
    EXPECT_LT(points.front().score, 0.2);
    for (std::size_t i = 1; i < points.size(); ++i) ASSERT_LE(points[i - 1].score, points[i].score);
    EXPECT_EQ(simulate_direct_load(LatencyModel::calibrated(), 0, 30, 0).requests, 0U);
}

}  // namespace
}  // namespace zkr::bench
