#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace zkr {

class BatchStore;
class Ledger;
class Sequencer;

/// REST front of the sequencer.
///
///   POST /submit           202 {"status":"accepted","trackingId":N,"acceptedAt":ms}
///                          400 invalid transaction, 429 pool full
///   POST /submit-direct    200 after the ledger commit; 400 invalid, 409 endorsement refused
///   GET  /batch/{n}        200 {"record":{...},"commitment":{...}|null}, 404 unknown
///   GET  /health           200 {"status":"ok"} or 503 {"status":"degraded"}
///   GET  /metrics          counters and stage-timing summaries
///   GET  /pool             {"pending":[tracking ids not yet settled]}
///   GET  /objects/{cid}    stored batch payload bytes, 404 unknown
///   GET  /ledger/blocks    committed block log, JSON lines
class HttpService {
public:
    HttpService(Sequencer& sequencer, Ledger& ledger, BatchStore& store,
                std::size_t worker_threads = 256);
    ~HttpService();

    HttpService(const HttpService&) = delete;
    HttpService& operator=(const HttpService&) = delete;

    /// Port 0 picks a free port. Returns the bound port; throws ConfigError.
    int bind(const std::string& host, int port);
    /// Serves on a background thread until stop().
    void start();
    /// Serves on the calling thread until stop().
    void listen();
    void stop();

private:
    void install_routes();

    Sequencer& sequencer_;
    Ledger& ledger_;
    BatchStore& store_;
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

}  // namespace zkr
