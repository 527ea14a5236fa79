#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "zkrollup/bench.hpp"
#include "zkrollup/errors.hpp"

namespace zkr::bench {

SimulatedRun simulate_direct_load(const LatencyModel& model, std::size_t virtual_users, int duration_sec,
                                  std::int64_t think_time_ms, std::uint64_t seed) {
    if (duration_sec <= 0) throw ConfigError("duration must be positive");
    SimulatedRun run;
    if (virtual_users == 0) return run;

    SimClock clock(0);
    Ledger ledger(model, clock, [](const BatchCommitment&) { return true; });
    std::mt19937_64 rng(seed);

    // (next send time, user); ties go to the lower user index.
    using Ready = std::pair<std::int64_t, std::size_t>;
    std::priority_queue<Ready, std::vector<Ready>, std::greater<>> ready;
    for (std::size_t vu = 0; vu < virtual_users; ++vu) ready.emplace(0, vu);

    const std::int64_t end = static_cast<std::int64_t>(duration_sec) * 1000;
    double latency_sum = 0.0;
    while (!ready.empty() && ready.top().first < end) {
        const auto [t, vu] = ready.top();
        ready.pop();
        clock.advance_to(t);
        const CommitReceipt r = ledger.submit_create_asset(random_transaction(rng, t));
        // Only responses that arrive inside the window count, as with a live client.
        if (r.committed_at <= end) {
            latency_sum += static_cast<double>(r.latency_ms());
            ++run.requests;
        }
        ready.emplace(r.committed_at + think_time_ms, vu);
    }
    run.throughput_rps = static_cast<double>(run.requests) / duration_sec;
    run.mean_latency_ms = run.requests > 0 ? latency_sum / static_cast<double>(run.requests) : 0.0;
    return run;
}

std::vector<CalibrationPoint> calibrate(const LatencyModel& base, std::size_t virtual_users, int duration_sec,
                                        std::int64_t think_time_ms, double target_tps,
                                        double target_latency_ms) {
    if (target_tps <= 0.0 || target_latency_ms <= 0.0) throw ConfigError("calibration targets must be positive");
    std::vector<CalibrationPoint> points;
    for (std::int64_t interval = 200; interval <= 1000; interval += 50) {
        for (std::int64_t commit = 100; commit <= 800; commit += 50) {
            LatencyModel m = base;
            m.block_interval_ms = interval;
            m.commit_ms = commit;
            CalibrationPoint p{m, simulate_direct_load(m, virtual_users, duration_sec, think_time_ms), 0.0};
            p.score = std::abs(p.run.throughput_rps - target_tps) / target_tps +
                      std::abs(p.run.mean_latency_ms - target_latency_ms) / target_latency_ms;
            points.push_back(p);
        }
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const CalibrationPoint& a, const CalibrationPoint& b) { return a.score < b.score; });
    return points;
}

}  // namespace zkr::bench
