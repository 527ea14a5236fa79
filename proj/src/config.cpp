#include "zkrollup/config.hpp"

#include <fstream>
#include <set>

#include "zkrollup/errors.hpp"
#include "zkrollup/http_service.hpp"

namespace zkr {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
void read(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j) {
    ServiceConfig c;
    try {
        reject_unknown(j, {"listen", "clock", "pool", "settlement", "proof", "store", "ledger"}, "config");
        if (j.contains("listen")) {
            const auto& l = j.at("listen");
            reject_unknown(l, {"host", "port", "threads"}, "listen");
            read(l, "host", c.host);
            read(l, "port", c.port);
            read(l, "threads", c.http_threads);
        }
        if (j.contains("clock")) {
            const auto mode = j.at("clock").get<std::string>();
            if (mode != "wall" && mode != "simulated") {
                throw ConfigError("clock must be 'wall' or 'simulated'");
            }
            c.simulated_clock = mode == "simulated";
        }
        if (j.contains("pool")) {
            const auto& p = j.at("pool");
            reject_unknown(p, {"capacity", "journal"}, "pool");
            read(p, "capacity", c.pool_capacity);
            if (p.contains("journal")) c.pool_journal = p.at("journal").get<std::string>();
        }
        if (j.contains("settlement")) {
            const auto& s = j.at("settlement");
            reject_unknown(s, {"batchSize", "intervalMs", "maxRetries", "retryBackoffMs", "log"},
                           "settlement");
            read(s, "batchSize", c.batch_size);
            read(s, "intervalMs", c.sequencer.settle_interval_ms);
            read(s, "maxRetries", c.sequencer.max_settle_retries);
            read(s, "retryBackoffMs", c.sequencer.retry_backoff_ms);
            if (s.contains("log")) c.sequencer.settlement_log = s.at("log").get<std::string>();
        }
        if (j.contains("proof")) {
            const auto& p = j.at("proof");
            reject_unknown(p, {"backend", "seed", "simulatedCostMs"}, "proof");
            if (p.contains("backend")) c.proof_backend = parse_backend(p.at("backend").get<std::string>());
            read(p, "seed", c.proof_seed);
            read(p, "simulatedCostMs", c.proof_delay_ms);
        }
        if (j.contains("store")) {
            const auto& s = j.at("store");
            reject_unknown(s, {"backend", "dir", "url"}, "store");
            read(s, "backend", c.store_backend);
            if (s.contains("dir")) c.store_dir = s.at("dir").get<std::string>();
            read(s, "url", c.ipfs_url);
        }
        if (j.contains("ledger")) {
            const auto& l = j.at("ledger");
            reject_unknown(l, {"profile", "latency", "blockLog"}, "ledger");
            const auto profile = l.value("profile", std::string("calibrated"));
            if (profile == "calibrated") {
                c.latency = LatencyModel::calibrated();
            } else if (profile == "instant") {
                c.latency = LatencyModel::instant();
            } else if (profile == "custom") {
                c.latency = LatencyModel::from_json(l.at("latency"));
            } else {
                throw ConfigError("ledger profile must be calibrated, instant or custom");
            }
            if (profile != "custom" && l.contains("latency")) {
                throw ConfigError("ledger.latency is only read with profile 'custom'");
            }
            if (l.contains("blockLog")) c.block_log = l.at("blockLog").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    if (c.batch_size != kBatchLeaves) throw ConfigError("settlement.batchSize is fixed at 32");
    if (c.store_backend != "local" && c.store_backend != "ipfs") {
        throw ConfigError("store.backend must be 'local' or 'ipfs'");
    }
    if (c.port < 0 || c.port > 65535) throw ConfigError("listen.port out of range");
    if (c.proof_delay_ms < 0) throw ConfigError("proof.simulatedCostMs must be >= 0");
    c.latency.validate();
    return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
}

nlohmann::json ServiceConfig::to_json() const {
    return {{"listen", {{"host", host}, {"port", port}, {"threads", http_threads}}},
            {"clock", simulated_clock ? "simulated" : "wall"},
            {"pool", {{"capacity", pool_capacity}, {"journal", pool_journal.string()}}},
            {"settlement",
             {{"batchSize", batch_size},
              {"intervalMs", sequencer.settle_interval_ms},
              {"maxRetries", sequencer.max_settle_retries},
              {"retryBackoffMs", sequencer.retry_backoff_ms},
              {"log", sequencer.settlement_log.string()}}},
            {"proof",
             {{"backend", to_string(proof_backend)}, {"seed", proof_seed}, {"simulatedCostMs", proof_delay_ms}}},
            {"store", {{"backend", store_backend}, {"dir", store_dir.string()}, {"url", ipfs_url}}},
            {"ledger", {{"profile", "custom"}, {"latency", latency.to_json()}, {"blockLog", block_log.string()}}}};
}

RollupNode::RollupNode(const ServiceConfig& config)
    : config_(config), material_(setup(config.proof_backend, config.proof_seed)) {
    if (config_.simulated_clock) {
        clock_ = std::make_unique<SimClock>(0);
    } else {
        clock_ = std::make_unique<WallClock>();
    }
    pool_ = std::make_unique<TxPool>(config_.pool_capacity, config_.pool_journal);
    if (config_.store_backend == "ipfs") {
        store_ = std::make_unique<IpfsHttpStore>(config_.ipfs_url);
    } else {
        store_ = std::make_unique<LocalBatchStore>(config_.store_dir);
    }
    ledger_ = std::make_unique<Ledger>(config_.latency, *clock_, proof_gate(material_));
    if (!config_.block_log.empty()) ledger_->set_block_log(config_.block_log);
    sequencer_ = std::make_unique<Sequencer>(
        config_.sequencer, *clock_, *pool_, *store_, *ledger_,
        reference_prover(material_, std::chrono::milliseconds(config_.proof_delay_ms)));
}

RollupNode::~RollupNode() { stop(); }

int RollupNode::start() {
    if (!http_) {
        http_ = std::make_unique<HttpService>(*sequencer_, *ledger_, *store_, config_.http_threads);
    }
    const int port = http_->bind(config_.host, config_.port);
    sequencer_->start();
    http_->start();
    return port;
}

void RollupNode::stop() {
    if (http_) http_->stop();
    if (sequencer_) sequencer_->stop();
}

}  // namespace zkr
