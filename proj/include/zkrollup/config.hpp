#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "zkrollup/batch_store.hpp"
#include "zkrollup/clock.hpp"
#include "zkrollup/ledger.hpp"
#include "zkrollup/proof.hpp"
#include "zkrollup/sequencer.hpp"
#include "zkrollup/tx_pool.hpp"

namespace zkr {

/// Top-level service configuration (JSON). Every key is optional; see
/// config/sequencer.example.json for the full shape and defaults.
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t http_threads = 256;
    bool simulated_clock = false;

    std::size_t pool_capacity = 100000;
    std::filesystem::path pool_journal;

    std::size_t batch_size = kBatchLeaves;  // fixed; anything else is rejected
    SequencerOptions sequencer;

    ProofBackend proof_backend = ProofBackend::reference;
    std::uint64_t proof_seed = 0;
    std::int64_t proof_delay_ms = 0;

    std::string store_backend = "local";  // "local" | "ipfs"
    std::filesystem::path store_dir = "zkr-store";
    std::string ipfs_url = "http://127.0.0.1:5001";

    LatencyModel latency = LatencyModel::calibrated();
    std::filesystem::path block_log;

    /// Throws ConfigError on unknown values or a batch size other than 32.
    static ServiceConfig from_json(const nlohmann::json& j);
    static ServiceConfig load(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

class HttpService;

/// Everything one sequencer process owns, wired from a ServiceConfig.
class RollupNode {
public:
    explicit RollupNode(const ServiceConfig& config);
    ~RollupNode();

    RollupNode(const RollupNode&) = delete;
    RollupNode& operator=(const RollupNode&) = delete;

    /// Starts the settlement loop and the HTTP listener; returns the bound port.
    int start();
    void stop();

    Clock& clock() { return *clock_; }
    TxPool& pool() { return *pool_; }
    BatchStore& store() { return *store_; }
    Ledger& ledger() { return *ledger_; }
    Sequencer& sequencer() { return *sequencer_; }
    const ProvingKeyMaterial& material() const { return material_; }
    const ServiceConfig& config() const { return config_; }

private:
    ServiceConfig config_;
    ProvingKeyMaterial material_;
    std::unique_ptr<Clock> clock_;
    std::unique_ptr<TxPool> pool_;
    std::unique_ptr<BatchStore> store_;
    std::unique_ptr<Ledger> ledger_;
    std::unique_ptr<Sequencer> sequencer_;
    std::unique_ptr<HttpService> http_;
};

}  // namespace zkr
