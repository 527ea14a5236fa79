#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zkrollup/batch_store.hpp"
#include "zkrollup/ledger.hpp"
#include "zkrollup/sequencer.hpp"

namespace zkr::bench {

enum class WorkloadMode : std::uint8_t { baseline, rollup };

std::string_view to_string(WorkloadMode m);
WorkloadMode parse_mode(std::string_view s);

struct WorkloadSpec {
    WorkloadMode mode = WorkloadMode::baseline;
    std::size_t virtual_users = 20;
    int duration_sec = 30;
    std::string base_url = "http://127.0.0.1:8080";
    std::string endpoint = "/submit-direct";
    std::int64_t think_time_ms = 0;
    std::uint64_t seed = 1;

    /// baseline: 20 users, 30 s, /submit-direct. rollup: 50 users, 30 s, /submit.
    static WorkloadSpec defaults(WorkloadMode mode);
    void validate() const;
    nlohmann::json to_json() const;
    static WorkloadSpec from_json(const nlohmann::json& j);
};

struct RequestSample {
    std::uint32_t vu = 0;
    double start_ms = 0.0;  // offset from the start of the run
    double latency_ms = 0.0;
    int status = 0;  // HTTP status, 0 on a transport failure
    std::uint64_t tracking_id = 0;

    bool ok() const { return status >= 200 && status < 300; }
};

struct LatencyStats {
    std::size_t count = 0;
    double min = 0.0;
    double avg = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
    double p95 = 0.0;
    double max = 0.0;

    /// Nearest-rank percentiles over the whole sample.
    static LatencyStats compute(std::span<const double> latencies_ms);
    nlohmann::json to_json() const;
    static LatencyStats from_json(const nlohmann::json& j);
    bool operator==(const LatencyStats&) const = default;
};

struct BenchReport {
    WorkloadSpec spec;
    std::size_t requests = 0;
    std::size_t successes = 0;
    double throughput_rps = 0.0;  // successes / spec.duration_sec
    double success_rate = 0.0;
    LatencyStats latency;         // every completed request
    std::vector<RequestSample> samples;
    std::vector<SettlementRecord> settlement;  // attempts, in log order
    nlohmann::json metadata = nlohmann::json::object();

    /// Fills the counters and stats from `samples`.
    void summarize();
    /// Settlement attempts that committed.
    std::vector<SettlementRecord> committed_batches() const;
    std::vector<std::uint64_t> accepted_ids() const;

    /// Summary only; the raw samples go to the CSV.
    nlohmann::json to_json() const;
    static BenchReport from_json(const nlohmann::json& j);
};

/// Header "vu,start_ms,latency_ms,status,tracking_id"; doubles round-trip exactly.
std::string samples_to_csv(std::span<const RequestSample> samples);
std::vector<RequestSample> samples_from_csv(std::string_view csv);

/// Writes <dir>/report.json and <dir>/latencies.csv.
void write_report(const BenchReport& report, const std::filesystem::path& dir);
BenchReport load_report(const std::filesystem::path& dir);

/// Reads a sequencer settlement log (one JSON record per line).
std::vector<SettlementRecord> load_settlement_log(const std::filesystem::path& path);

/// Closed-loop load: each virtual user sends one randomized transaction,
/// waits for the answer, sleeps think_time_ms and repeats until the duration
/// has elapsed. Throws Error when the target does not answer /health.
BenchReport run_workload(const WorkloadSpec& spec);

struct Comparison {
    nlohmann::json document;
    std::string csv;             // metric,baseline,rollup,ratio
    std::string settlement_csv;  // one row per committed batch
    std::string table;
};

/// Throughput ratio is rollup / baseline; latency ratios are baseline / rollup,
/// so both read as "times better" for the rollup path.
Comparison compare(const BenchReport& baseline, const BenchReport& rollup);
/// Writes comparison.json, comparison.csv, settlement.csv and comparison.txt.
void write_comparison(const Comparison& c, const std::filesystem::path& dir);

struct ReconcileResult {
    std::size_t accepted = 0;
    std::size_t settled_once = 0;
    std::vector<std::uint64_t> lost;
    std::vector<std::uint64_t> duplicated;
    std::vector<std::uint64_t> pending;     // accepted, still in the pool
    std::vector<std::uint64_t> unexpected;  // settled but not in the accepted set
    std::size_t batches_checked = 0;

    bool ok() const { return lost.empty() && duplicated.empty(); }
    nlohmann::json to_json() const;
};

/// Matches accepted ids against committed payloads. Ids still pending in the
/// pool are reported as pending rather than lost.
ReconcileResult reconcile(std::span<const std::uint64_t> accepted,
                          std::span<const BatchPayload> committed_payloads,
                          std::span<const std::uint64_t> pending_ids);

/// Walks /batch/1.. on a running sequencer, fetches each committed payload
/// through /objects/<cid>, checks it against its CID and reconciles.
ReconcileResult reconcile_remote(const BenchReport& report, const std::string& base_url);

struct SimulatedRun {
    double throughput_rps = 0.0;
    double mean_latency_ms = 0.0;
    std::size_t requests = 0;
};

/// Discrete-event replay of closed-loop clients against the ledger model in
/// simulated time.
SimulatedRun simulate_direct_load(const LatencyModel& model, std::size_t virtual_users,
                                  int duration_sec, std::int64_t think_time_ms, std::uint64_t seed = 1);

struct CalibrationPoint {
    LatencyModel model;
    SimulatedRun run;
    double score = 0.0;  // relative distance to the target, lower is better
};

/// Sweeps block interval and commit delay around `base`, scoring each against
/// the target throughput and mean latency. Sorted best first.
std::vector<CalibrationPoint> calibrate(const LatencyModel& base, std::size_t virtual_users,
                                        int duration_sec, std::int64_t think_time_ms,
                                        double target_tps, double target_latency_ms);

}  // namespace zkr::bench
