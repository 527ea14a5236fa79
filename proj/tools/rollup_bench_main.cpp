// Workload driver and report tooling for the sequencer.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>

#include "zkrollup/bench.hpp"
#include "zkrollup/errors.hpp"

namespace bench = zkr::bench;

namespace {

// Polls /pool until nothing is pending or the timeout passes.
bool wait_for_drain(const std::string& base_url, int timeout_sec) {
    httplib::Client cli(base_url);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeout_sec);
    while (std::chrono::steady_clock::now() < deadline) {
        auto res = cli.Get("/pool");
        if (res && res->status == 200) {
            const auto j = nlohmann::json::parse(res->body, nullptr, false);
            if (j.is_object() && j["pending"].empty()) return true;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(250));
    }
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rollup-bench: closed-loop workloads, comparisons, reconciliation"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one workload and write report.json + latencies.csv");
    std::string mode = "baseline";
    int vus = -1;
    int duration = 30;
    std::string target = "http://127.0.0.1:8080";
    std::string endpoint;
    std::string out = "bench-out";
    std::int64_t think_ms = 0;
    std::uint64_t seed = 1;
    std::string settlement_log;
    int drain_timeout = 0;
    run->add_option("--mode", mode, "baseline | rollup")->check(CLI::IsMember({"baseline", "rollup"}));
    run->add_option("--vus", vus, "virtual users (default 20 baseline, 50 rollup)");
    run->add_option("--duration", duration, "seconds");
    run->add_option("--target", target, "sequencer base URL");
    run->add_option("--endpoint", endpoint, "override the mode's endpoint");
    run->add_option("--out", out, "report directory");
    run->add_option("--think-ms", think_ms, "pause between a response and the next request");
    run->add_option("--seed", seed, "transaction generator seed");
    run->add_option("--settlement-log", settlement_log, "sequencer settlement log to attach");
    run->add_option("--drain-timeout", drain_timeout, "wait up to N s for the pool to drain before reading the log");

    auto* cmp = app.add_subcommand("compare", "compare a baseline and a rollup report");
    std::string baseline_dir, rollup_dir, cmp_out = "bench-compare";
    cmp->add_option("--baseline", baseline_dir, "baseline report directory")->required();
    cmp->add_option("--rollup", rollup_dir, "rollup report directory")->required();
    cmp->add_option("--out", cmp_out, "output directory");

    auto* rec = app.add_subcommand("reconcile", "check every accepted id settled exactly once");
    std::string rec_report;
    std::string rec_target = "http://127.0.0.1:8080";
    rec->add_option("--report", rec_report, "rollup report directory")->required();
    rec->add_option("--target", rec_target, "sequencer base URL");

    auto* cal = app.add_subcommand("calibrate", "fit ledger delays to a throughput/latency target");
    std::size_t cal_vus = 20;
    int cal_duration = 30;
    std::int64_t cal_think = 0;
    double cal_tps = 6.0, cal_latency = 3000.0;
    std::size_t cal_top = 10;
    cal->add_option("--vus", cal_vus, "closed-loop clients");
    cal->add_option("--duration", cal_duration, "simulated seconds");
    cal->add_option("--think-ms", cal_think, "client think time");
    cal->add_option("--tps", cal_tps, "target throughput");
    cal->add_option("--latency-ms", cal_latency, "target mean latency");
    cal->add_option("--top", cal_top, "rows to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto spec = bench::WorkloadSpec::defaults(bench::parse_mode(mode));
            if (vus >= 0) spec.virtual_users = static_cast<std::size_t>(vus);
            if (!endpoint.empty()) spec.endpoint = endpoint;
            spec.duration_sec = duration;
            spec.base_url = target;
            spec.think_time_ms = think_ms;
            spec.seed = seed;
            auto report = bench::run_workload(spec);
            if (drain_timeout > 0 && !wait_for_drain(target, drain_timeout)) {
                std::cerr << "warning: pool not drained after " << drain_timeout << " s\n";
            }
            if (!settlement_log.empty()) report.settlement = bench::load_settlement_log(settlement_log);
            bench::write_report(report, out);
            std::printf("%s: %zu requests, %zu ok, %.2f req/s, mean %.1f ms, p95 %.1f ms -> %s\n",
                        mode.c_str(), report.requests, report.successes, report.throughput_rps,
                        report.latency.avg, report.latency.p95, out.c_str());
            return 0;
        }
        if (cmp->parsed()) {
            const auto c = bench::compare(bench::load_report(baseline_dir), bench::load_report(rollup_dir));
            bench::write_comparison(c, cmp_out);
            std::cout << c.table;
            return 0;
        }
        if (rec->parsed()) {
            const auto report = bench::load_report(rec_report);
            const auto result = bench::reconcile_remote(report, rec_target);
            const auto j = result.to_json();
            std::ofstream(std::filesystem::path(rec_report) / "reconcile.json") << j.dump(2) << "\n";
            std::printf("accepted %zu, settled once %zu, pending %zu, lost %zu, duplicated %zu (%zu batches)\n",
                        result.accepted, result.settled_once, result.pending.size(), result.lost.size(),
                        result.duplicated.size(), result.batches_checked);
            if (!result.ok()) {
                std::cerr << "lost: " << nlohmann::json(result.lost).dump() << "\n"
                          << "duplicated: " << nlohmann::json(result.duplicated).dump() << "\n";
                return 1;
            }
            return 0;
        }
        if (cal->parsed()) {
            const auto points = bench::calibrate(zkr::LatencyModel::calibrated(), cal_vus, cal_duration,
                                                 cal_think, cal_tps, cal_latency);
            std::printf("%10s %10s %10s %12s %8s\n", "interval", "commit", "tps", "latency ms", "score");
            for (std::size_t i = 0; i < std::min(cal_top, points.size()); ++i) {
                const auto& p = points[i];
                std::printf("%10lld %10lld %10.2f %12.1f %8.3f\n",
                            static_cast<long long>(p.model.block_interval_ms),
                            static_cast<long long>(p.model.commit_ms), p.run.throughput_rps,
                            p.run.mean_latency_ms, p.score);
            }
            const auto builtin = bench::simulate_direct_load(zkr::LatencyModel::calibrated(), cal_vus,
                                                             cal_duration, cal_think);
            std::printf("built-in profile: %.2f tps, %.1f ms\n", builtin.throughput_rps, builtin.mean_latency_ms);
            return 0;
        }
    } catch (const zkr::Error& e) {
        std::cerr << "rollup-bench: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "rollup-bench: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
