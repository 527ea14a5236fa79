#include "zkrollup/http_service.hpp"

#include <httplib.h>

#include "zkrollup/batch_store.hpp"
#include "zkrollup/errors.hpp"
#include "zkrollup/ledger.hpp"
#include "zkrollup/sequencer.hpp"

namespace zkr {

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void reply_error(httplib::Response& res, int status, std::string_view message) {
    reply(res, status, {{"error", message}});
}

}  // namespace

HttpService::HttpService(Sequencer& sequencer, Ledger& ledger, BatchStore& store,
                         std::size_t worker_threads)
    : sequencer_(sequencer), ledger_(ledger), store_(store), server_(std::make_unique<httplib::Server>()) {
    // Closed-loop clients hold keep-alive connections; each one pins a worker.
    server_->new_task_queue = [worker_threads] { return new httplib::ThreadPool(worker_threads); };
    server_->set_keep_alive_max_count(1000000);
    server_->set_keep_alive_timeout(60);
    server_->set_read_timeout(60, 0);
    server_->set_write_timeout(60, 0);
    install_routes();
}

HttpService::~HttpService() { stop(); }

void HttpService::install_routes() {
    server_->Post("/submit", [this](const httplib::Request& req, httplib::Response& res) {
        Transaction tx;
        try {
            auto body = nlohmann::json::parse(req.body);
            tx = transaction_from_json(body, /*allow_missing_timestamp=*/true);
            if (!body.contains("clientTimestamp")) tx.client_timestamp = ledger_.clock().now_ms();
        } catch (const nlohmann::json::exception& e) {
            return reply_error(res, 400, std::string("body is not valid JSON: ") + e.what());
        } catch (const ValidationError& e) {
            return reply_error(res, 400, e.what());
        }
        try {
            const auto receipt = sequencer_.submit(tx);
            reply(res, 202,
                  {{"status", "accepted"}, {"trackingId", receipt.tracking_id}, {"acceptedAt", receipt.accepted_at}});
        } catch (const ValidationError& e) {
            reply_error(res, 400, e.what());
        } catch (const PoolFullError& e) {
            reply_error(res, 429, e.what());
        }
    });

    server_->Post("/submit-direct", [this](const httplib::Request& req, httplib::Response& res) {
        Transaction tx;
        try {
            auto body = nlohmann::json::parse(req.body);
            tx = transaction_from_json(body, /*allow_missing_timestamp=*/true);
            if (!body.contains("clientTimestamp")) tx.client_timestamp = ledger_.clock().now_ms();
        } catch (const nlohmann::json::exception& e) {
            return reply_error(res, 400, std::string("body is not valid JSON: ") + e.what());
        } catch (const ValidationError& e) {
            return reply_error(res, 400, e.what());
        }
        try {
            const auto r = sequencer_.submit_direct(tx);
            reply(res, 200,
                  {{"status", "committed"},
                   {"assetId", r.key},
                   {"blockNumber", r.block_number},
                   {"submittedAt", r.submitted_at},
                   {"committedAt", r.committed_at},
                   {"latencyMs", r.latency_ms()}});
        } catch (const ValidationError& e) {
            reply_error(res, 400, e.what());
        } catch (const EndorsementError& e) {
            reply_error(res, 409, e.what());
        }
    });

    server_->Get(R"(/batch/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
        std::uint64_t n = 0;
        try {
            n = std::stoull(req.matches[1].str());
        } catch (const std::exception&) {
            return reply_error(res, 400, "bad batch number");
        }
        const auto view = sequencer_.get_batch(n);
        if (!view) return reply_error(res, 404, "unknown batch " + std::to_string(n));
        reply(res, 200,
              {{"record", view->record.to_json()},
               {"commitment", view->commitment ? view->commitment->to_json() : nlohmann::json(nullptr)}});
    });

    server_->Get("/health", [this](const httplib::Request&, httplib::Response& res) {
        if (sequencer_.healthy()) {
            reply(res, 200, {{"status", "ok"}});
        } else {
            reply(res, 503, {{"status", "degraded"}});
        }
    });

    // Clears a retry-cap pause once the operator has fixed the failing stage.
    server_->Post("/resume", [this](const httplib::Request&, httplib::Response& res) {
        sequencer_.resume();
        reply(res, 200, {{"status", "ok"}});
    });

    server_->Get("/metrics", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, sequencer_.metrics_json());
    });

    server_->Get("/pool", [this](const httplib::Request&, httplib::Response& res) {
        reply(res, 200, {{"pending", sequencer_.pool().pending_ids()}});
    });

    server_->Get(R"(/objects/([a-z2-7]+))", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            const Cid cid = Cid::parse(req.matches[1].str());
            res.set_content(store_.get(cid), kJson);
        } catch (const ValidationError& e) {
            reply_error(res, 400, e.what());
        } catch (const NotFoundError& e) {
            reply_error(res, 404, e.what());
        }
    });

    server_->Get("/ledger/blocks", [this](const httplib::Request&, httplib::Response& res) {
        res.set_content(ledger_.export_jsonl(), "application/x-ndjson");
    });

    server_->set_exception_handler(
        [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                reply_error(res, 500, e.what());
            } catch (...) {
                reply_error(res, 500, "unknown error");
            }
        });
}

int HttpService::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = server_->bind_to_any_port(host);
    } else if (!server_->bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
    return bound;
}

void HttpService::start() {
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void HttpService::listen() { server_->listen_after_bind(); }

void HttpService::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace zkr
