#include "zkrollup/bench.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "zkrollup/cid.hpp"
#include "zkrollup/errors.hpp"

namespace zkr::bench {

namespace {

using SteadyClock = std::chrono::steady_clock;

std::int64_t wall_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string fmt_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <typename T>
T parse_number(std::string_view field, std::string_view what) {
    T v{};
    const auto r = std::from_chars(field.data(), field.data() + field.size(), v);
    if (r.ec != std::errc{} || r.ptr != field.data() + field.size()) {
        throw ValidationError("latency csv: bad " + std::string(what) + " '" + std::string(field) + "'");
    }
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + path.string());
    out << data;
    if (!out) throw StorageError("write failed: " + path.string());
}

nlohmann::json ratio(double num, double den) {
    if (den == 0.0 || !std::isfinite(num) || !std::isfinite(den)) return nullptr;
    return num / den;
}

std::unique_ptr<httplib::Client> make_client(const std::string& base_url, int timeout_sec) {
    auto cli = std::make_unique<httplib::Client>(base_url);
    if (!cli->is_valid()) throw ConfigError("bad target url '" + base_url + "'");
    cli->set_keep_alive(true);
    cli->set_connection_timeout(5, 0);
    cli->set_read_timeout(timeout_sec, 0);
    cli->set_write_timeout(timeout_sec, 0);
    return cli;
}

nlohmann::json get_json(httplib::Client& cli, const std::string& path, int* status) {
    auto res = cli.Get(path);
    if (!res) throw StorageError("GET " + path + " failed: " + httplib::to_string(res.error()));
    *status = res->status;
    if (res->status != 200) return nullptr;
    return nlohmann::json::parse(res->body);
}

}  // namespace

std::string_view to_string(WorkloadMode m) { return m == WorkloadMode::baseline ? "baseline" : "rollup"; }

WorkloadMode parse_mode(std::string_view s) {
    if (s == "baseline") return WorkloadMode::baseline;
    if (s == "rollup") return WorkloadMode::rollup;
    throw ConfigError("unknown workload mode '" + std::string(s) + "'");
}

WorkloadSpec WorkloadSpec::defaults(WorkloadMode mode) {
    WorkloadSpec s;
    s.mode = mode;
    if (mode == WorkloadMode::rollup) {
        s.virtual_users = 50;
        s.endpoint = "/submit";
    }
    return s;
}

void WorkloadSpec::validate() const {
    if (duration_sec <= 0) throw ConfigError("duration must be positive");
    if (think_time_ms < 0) throw ConfigError("think time must be non-negative");
    if (endpoint.empty() || endpoint.front() != '/') throw ConfigError("endpoint must start with '/'");
}

nlohmann::json WorkloadSpec::to_json() const {
    return {{"mode", to_string(mode)},
            {"virtualUsers", virtual_users},
            {"durationSec", duration_sec},
            {"target", base_url + endpoint},
            {"baseUrl", base_url},
            {"endpoint", endpoint},
            {"thinkTimeMs", think_time_ms},
            {"seed", seed}};
}

WorkloadSpec WorkloadSpec::from_json(const nlohmann::json& j) {
    try {
        WorkloadSpec s;
        s.mode = parse_mode(j.at("mode").get<std::string>());
        s.virtual_users = j.at("virtualUsers").get<std::size_t>();
        s.duration_sec = j.at("durationSec").get<int>();
        s.base_url = j.at("baseUrl").get<std::string>();
        s.endpoint = j.at("endpoint").get<std::string>();
        s.think_time_ms = j.value("thinkTimeMs", std::int64_t{0});
        s.seed = j.value("seed", std::uint64_t{1});
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed workload spec: ") + e.what());
    }
}

LatencyStats LatencyStats::compute(std::span<const double> latencies_ms) {
    LatencyStats s;
    s.count = latencies_ms.size();
    if (s.count == 0) return s;
    std::vector<double> v(latencies_ms.begin(), latencies_ms.end());
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (const double x : v) sum += x;
    const auto rank = [&](double q) {
        const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
        return v[std::clamp<std::size_t>(k, 1, v.size()) - 1];
    };
    s.min = v.front();
    s.max = v.back();
    s.avg = sum / static_cast<double>(v.size());
    s.p50 = rank(0.50);
    s.p90 = rank(0.90);
    s.p95 = rank(0.95);
    return s;
}

nlohmann::json LatencyStats::to_json() const {
    return {{"count", count}, {"min", min}, {"avg", avg}, {"p50", p50},
            {"p90", p90},     {"p95", p95}, {"max", max}};
}

LatencyStats LatencyStats::from_json(const nlohmann::json& j) {
    LatencyStats s;
    s.count = j.at("count").get<std::size_t>();
    s.min = j.at("min").get<double>();
    s.avg = j.at("avg").get<double>();
    s.p50 = j.at("p50").get<double>();
    s.p90 = j.at("p90").get<double>();
    s.p95 = j.at("p95").get<double>();
    s.max = j.at("max").get<double>();
    return s;
}

void BenchReport::summarize() {
    requests = samples.size();
    successes = static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const RequestSample& s) { return s.ok(); }));
    throughput_rps = spec.duration_sec > 0 ? static_cast<double>(successes) / spec.duration_sec : 0.0;
    success_rate = requests > 0 ? static_cast<double>(successes) / static_cast<double>(requests) : 0.0;
    std::vector<double> lat;
    lat.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.status != 0) lat.push_back(s.latency_ms);
    }
    latency = LatencyStats::compute(lat);
}

std::vector<SettlementRecord> BenchReport::committed_batches() const {
    std::vector<SettlementRecord> out;
    for (const auto& r : settlement) {
        if (r.status == SettlementStatus::committed) out.push_back(r);
    }
    return out;
}

std::vector<std::uint64_t> BenchReport::accepted_ids() const {
    std::vector<std::uint64_t> ids;
    for (const auto& s : samples) {
        if (s.ok() && s.tracking_id != 0) ids.push_back(s.tracking_id);
    }
    return ids;
}

nlohmann::json BenchReport::to_json() const {
    nlohmann::json settle = nlohmann::json::array();
    for (const auto& r : settlement) settle.push_back(r.to_json());
    return {{"spec", spec.to_json()},
            {"requests", requests},
            {"successes", successes},
            {"throughputRps", throughput_rps},
            {"successRate", success_rate},
            {"latencyMs", latency.to_json()},
            {"settlement", settle},
            {"metadata", metadata}};
}

BenchReport BenchReport::from_json(const nlohmann::json& j) {
    try {
        BenchReport r;
        r.spec = WorkloadSpec::from_json(j.at("spec"));
        r.requests = j.at("requests").get<std::size_t>();
        r.successes = j.at("successes").get<std::size_t>();
        r.throughput_rps = j.at("throughputRps").get<double>();
        r.success_rate = j.at("successRate").get<double>();
        r.latency = LatencyStats::from_json(j.at("latencyMs"));
        for (const auto& s : j.value("settlement", nlohmann::json::array())) {
            r.settlement.push_back(SettlementRecord::from_json(s));
        }
        r.metadata = j.value("metadata", nlohmann::json::object());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed report: ") + e.what());
    }
}

std::string samples_to_csv(std::span<const RequestSample> samples) {
    std::string out = "vu,start_ms,latency_ms,status,tracking_id\n";
    for (const auto& s : samples) {
        out += std::to_string(s.vu);
        out += ',';
        out += fmt_double(s.start_ms);
        out += ',';
        out += fmt_double(s.latency_ms);
        out += ',';
        out += std::to_string(s.status);
        out += ',';
        out += std::to_string(s.tracking_id);
        out += '\n';
    }
    return out;
}

std::vector<RequestSample> samples_from_csv(std::string_view csv) {
    std::vector<RequestSample> out;
    bool header = true;
    while (!csv.empty()) {
        const auto nl = csv.find('\n');
        std::string_view line = csv.substr(0, nl);
        csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        for (std::size_t pos = 0;;) {
            const auto comma = line.find(',', pos);
            f.push_back(line.substr(pos, comma - pos));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        if (f.size() != 5) throw ValidationError("latency csv: expected 5 fields");
        RequestSample s;
        s.vu = parse_number<std::uint32_t>(f[0], "vu");
        s.start_ms = parse_number<double>(f[1], "start_ms");
        s.latency_ms = parse_number<double>(f[2], "latency_ms");
        s.status = parse_number<int>(f[3], "status");
        s.tracking_id = parse_number<std::uint64_t>(f[4], "tracking_id");
        out.push_back(s);
    }
    return out;
}

void write_report(const BenchReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "report.json", report.to_json().dump(2) + "\n");
    write_file(dir / "latencies.csv", samples_to_csv(report.samples));
}

BenchReport load_report(const std::filesystem::path& dir) {
    BenchReport r = BenchReport::from_json(nlohmann::json::parse(read_file(dir / "report.json")));
    if (std::filesystem::exists(dir / "latencies.csv")) {
        r.samples = samples_from_csv(read_file(dir / "latencies.csv"));
    }
    return r;
}

std::vector<SettlementRecord> load_settlement_log(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::vector<SettlementRecord> out;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        out.push_back(SettlementRecord::from_json(nlohmann::json::parse(line)));
    }
    return out;
}

BenchReport run_workload(const WorkloadSpec& spec) {
    spec.validate();
    BenchReport report;
    report.spec = spec;
    report.metadata = {{"startedAt", wall_ms()},
                       {"topology", "single service endpoint; per-organization ports collapsed"}};
    if (spec.virtual_users == 0) {
        report.summarize();
        return report;
    }

    {
        auto probe = make_client(spec.base_url, 5);
        auto res = probe->Get("/health");
        if (!res) {
            throw Error("target " + spec.base_url + " is unreachable: " + httplib::to_string(res.error()));
        }
    }

    std::mutex sink_mu;
    std::vector<RequestSample> sink;
    const auto t0 = SteadyClock::now();
    const auto end = t0 + std::chrono::seconds(spec.duration_sec);
    const auto since_start = [t0](SteadyClock::time_point t) {
        return std::chrono::duration<double, std::milli>(t - t0).count();
    };

    std::vector<std::thread> users;
    users.reserve(spec.virtual_users);
    for (std::size_t vu = 0; vu < spec.virtual_users; ++vu) {
        users.emplace_back([&, vu] {
            std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ULL + vu);
            auto cli = make_client(spec.base_url, 120);
            std::vector<RequestSample> local;
            while (SteadyClock::now() < end) {
                const std::string body = to_json(random_transaction(rng, wall_ms())).dump();
                RequestSample s;
                s.vu = static_cast<std::uint32_t>(vu);
                const auto start = SteadyClock::now();
                auto res = cli->Post(spec.endpoint, body, "application/json");
                const auto done = SteadyClock::now();
                s.start_ms = since_start(start);
                s.latency_ms = std::chrono::duration<double, std::milli>(done - start).count();
                if (res) {
                    s.status = res->status;
                    if (res->status == 202) {
                        const auto j = nlohmann::json::parse(res->body, nullptr, false);
                        if (j.is_object() && j.contains("trackingId")) {
                            s.tracking_id = j["trackingId"].get<std::uint64_t>();
                        }
                    }
                }
                local.push_back(s);
                if (!res) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(10));
                } else if (spec.think_time_ms > 0) {
                    std::this_thread::sleep_for(std::chrono::milliseconds(spec.think_time_ms));
                }
            }
            std::lock_guard lock(sink_mu);
            sink.insert(sink.end(), local.begin(), local.end());
        });
    }
    for (auto& t : users) t.join();

    std::sort(sink.begin(), sink.end(),
              [](const RequestSample& a, const RequestSample& b) { return a.start_ms < b.start_ms; });
    report.samples = std::move(sink);
    report.metadata["wallClockSec"] = since_start(SteadyClock::now()) / 1000.0;
    report.summarize();
    return report;
}

Comparison compare(const BenchReport& baseline, const BenchReport& rollup) {
    Comparison c;
    nlohmann::json warnings = nlohmann::json::array();
    if (baseline.spec.duration_sec != rollup.spec.duration_sec) {
        warnings.push_back("durations differ: baseline " + std::to_string(baseline.spec.duration_sec) +
                           " s, rollup " + std::to_string(rollup.spec.duration_sec) + " s");
    }
    if (baseline.successes == 0) warnings.push_back("baseline has no successful requests");
    if (rollup.successes == 0) warnings.push_back("rollup has no successful requests");

    const auto& b = baseline.latency;
    const auto& r = rollup.latency;
    const std::vector<std::pair<std::string, std::pair<double, double>>> stats = {
        {"min", {b.min, r.min}}, {"avg", {b.avg, r.avg}}, {"p50", {b.p50, r.p50}},
        {"p90", {b.p90, r.p90}}, {"p95", {b.p95, r.p95}}, {"max", {b.max, r.max}}};

    nlohmann::json latency_ratios = nlohmann::json::object();
    for (const auto& [name, v] : stats) latency_ratios[name] = ratio(v.first, v.second);

    nlohmann::json series = nlohmann::json::array();
    c.settlement_csv = "batch_number,real_count,proof_gen_ms,upload_ms,l1_commit_ms\n";
    for (const auto& rec : rollup.committed_batches()) {
        series.push_back({{"batchNumber", rec.batch_number},
                          {"realCount", rec.real_count},
                          {"proofGenMs", rec.proof_gen_ms},
                          {"uploadMs", rec.upload_ms},
                          {"l1CommitMs", rec.l1_commit_ms}});
        c.settlement_csv += std::to_string(rec.batch_number) + "," + std::to_string(rec.real_count) + "," +
                            fmt_double(rec.proof_gen_ms) + "," + fmt_double(rec.upload_ms) + "," +
                            fmt_double(rec.l1_commit_ms) + "\n";
    }

    const auto summary = [](const BenchReport& rep) {
        return nlohmann::json{{"spec", rep.spec.to_json()},
                              {"requests", rep.requests},
                              {"successes", rep.successes},
                              {"throughputRps", rep.throughput_rps},
                              {"successRate", rep.success_rate},
                              {"latencyMs", rep.latency.to_json()}};
    };
    c.document = {{"baseline", summary(baseline)},
                  {"rollup", summary(rollup)},
                  {"throughputRatio", ratio(rollup.throughput_rps, baseline.throughput_rps)},
                  {"latencyRatios", latency_ratios},
                  {"settlementSeries", series},
                  {"warnings", warnings},
                  {"notes",
                   "Rollup figures are ingestion (acceptance) numbers; settlement runs asynchronously "
                   "and is summarised per batch in settlementSeries."}};

    c.csv = "metric,baseline,rollup,ratio\n";
    c.csv += "throughput_rps," + fmt_double(baseline.throughput_rps) + "," + fmt_double(rollup.throughput_rps) +
             "," + (c.document["throughputRatio"].is_null() ? std::string() : fmt_double(c.document["throughputRatio"].get<double>())) +
             "\n";
    c.csv += "success_rate," + fmt_double(baseline.success_rate) + "," + fmt_double(rollup.success_rate) + ",\n";
    for (const auto& [name, v] : stats) {
        const auto& rat = latency_ratios[name];
        c.csv += "latency_" + name + "_ms," + fmt_double(v.first) + "," + fmt_double(v.second) + "," +
                 (rat.is_null() ? std::string() : fmt_double(rat.get<double>())) + "\n";
    }

    std::ostringstream t;
    char line[160];
    std::snprintf(line, sizeof line, "%-18s %14s %14s %10s\n", "metric", "baseline", "rollup", "ratio");
    t << line;
    const auto row = [&](const std::string& name, double bv, double rv, const nlohmann::json& rat) {
        if (rat.is_null()) {
            std::snprintf(line, sizeof line, "%-18s %14.2f %14.2f %10s\n", name.c_str(), bv, rv, "-");
        } else {
            std::snprintf(line, sizeof line, "%-18s %14.2f %14.2f %9.2fx\n", name.c_str(), bv, rv,
                          rat.get<double>());
        }
        t << line;
    };
    row("throughput (rps)", baseline.throughput_rps, rollup.throughput_rps, c.document["throughputRatio"]);
    for (const auto& [name, v] : stats) row("latency " + name + " ms", v.first, v.second, latency_ratios[name]);
    t << "\nsettlement: " << series.size() << " committed batches\n";
    if (!series.empty()) {
        std::snprintf(line, sizeof line, "%8s %6s %12s %12s %12s\n", "batch", "txs", "proof ms", "upload ms",
                      "commit ms");
        t << line;
        for (const auto& s : series) {
            std::snprintf(line, sizeof line, "%8llu %6zu %12.2f %12.2f %12.2f\n",
                          static_cast<unsigned long long>(s["batchNumber"].get<std::uint64_t>()),
                          s["realCount"].get<std::size_t>(), s["proofGenMs"].get<double>(),
                          s["uploadMs"].get<double>(), s["l1CommitMs"].get<double>());
            t << line;
        }
    }
    for (const auto& w : warnings) t << "warning: " << w.get<std::string>() << "\n";
    c.table = t.str();
    return c;
}

void write_comparison(const Comparison& c, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "comparison.json", c.document.dump(2) + "\n");
    write_file(dir / "comparison.csv", c.csv);
    write_file(dir / "settlement.csv", c.settlement_csv);
    write_file(dir / "comparison.txt", c.table);
}

nlohmann::json ReconcileResult::to_json() const {
    return {{"ok", ok()},
            {"accepted", accepted},
            {"settledOnce", settled_once},
            {"lost", lost},
            {"duplicated", duplicated},
            {"pending", pending},
            {"unexpected", unexpected},
            {"batchesChecked", batches_checked}};
}

ReconcileResult reconcile(std::span<const std::uint64_t> accepted,
                          std::span<const BatchPayload> committed_payloads,
                          std::span<const std::uint64_t> pending_ids) {
    ReconcileResult r;
    r.batches_checked = committed_payloads.size();
    std::unordered_map<std::uint64_t, std::size_t> seen;
    for (const auto& p : committed_payloads) {
        for (const auto id : p.tracking_ids) ++seen[id];
    }
    const std::unordered_set<std::uint64_t> pending(pending_ids.begin(), pending_ids.end());
    const std::unordered_set<std::uint64_t> accepted_set(accepted.begin(), accepted.end());
    r.accepted = accepted_set.size();

    for (const auto id : accepted_set) {
        const auto it = seen.find(id);
        const std::size_t n = it == seen.end() ? 0 : it->second;
        if (n == 1) {
            ++r.settled_once;
        } else if (n > 1) {
            r.duplicated.push_back(id);
        } else if (pending.contains(id)) {
            r.pending.push_back(id);
        } else {
            r.lost.push_back(id);
        }
    }
    for (const auto& [id, n] : seen) {
        if (accepted_set.contains(id)) continue;
        r.unexpected.push_back(id);
        if (n > 1) r.duplicated.push_back(id);
    }
    for (auto* v : {&r.lost, &r.duplicated, &r.pending, &r.unexpected}) std::sort(v->begin(), v->end());
    return r;
}

ReconcileResult reconcile_remote(const BenchReport& report, const std::string& base_url) {
    auto cli = make_client(base_url, 30);
    std::vector<BatchPayload> payloads;
    int status = 0;
    for (std::uint64_t n = 1;; ++n) {
        const auto view = get_json(*cli, "/batch/" + std::to_string(n), &status);
        if (status == 404) break;
        if (status != 200) throw StorageError("GET /batch/" + std::to_string(n) + " returned " + std::to_string(status));
        const auto& commitment = view.at("commitment");
        if (commitment.is_null()) continue;
        const Cid cid = Cid::parse(commitment.at("ipfsCid").get<std::string>());
        auto res = cli->Get("/objects/" + cid.text());
        if (!res || res->status != 200) throw StorageError("cannot fetch payload " + cid.text());
        if (!cid.matches(res->body)) throw IntegrityError("payload does not match " + cid.text());
        payloads.push_back(BatchPayload::parse(res->body));
    }
    const auto pool = get_json(*cli, "/pool", &status);
    if (status != 200) throw StorageError("GET /pool returned " + std::to_string(status));
    const auto pending = pool.at("pending").get<std::vector<std::uint64_t>>();
    const auto accepted = report.accepted_ids();
    return reconcile(accepted, payloads, pending);
}

}  // namespace zkr::bench
