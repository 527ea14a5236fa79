// Runs the rollup sequencer service from a JSON config.

#include <csignal>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <pthread.h>

#include "zkrollup/config.hpp"
#include "zkrollup/errors.hpp"

namespace {

void ensure_parent(const std::filesystem::path& p) {
    if (!p.empty() && p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zk-rollup sequencer: /submit ingestion, batch settlement, /submit-direct baseline"};
    std::string config_path;
    int port = -1;
    bool print_config = false;
    app.add_option("-c,--config", config_path, "JSON config file (defaults apply when omitted)")
        ->check(CLI::ExistingFile);
    app.add_option("-p,--port", port, "override listen.port (0 picks a free port)");
    app.add_flag("--print-config", print_config, "print the effective config and exit");
    CLI11_PARSE(app, argc, argv);

    try {
        zkr::ServiceConfig cfg = config_path.empty() ? zkr::ServiceConfig{} : zkr::ServiceConfig::load(config_path);
        if (port >= 0) cfg.port = port;
        if (print_config) {
            std::cout << cfg.to_json().dump(2) << "\n";
            return 0;
        }
        ensure_parent(cfg.pool_journal);
        ensure_parent(cfg.sequencer.settlement_log);
        ensure_parent(cfg.block_log);

        // Block the stop signals before any worker thread exists so only sigwait sees them.
        sigset_t stop_signals;
        sigemptyset(&stop_signals);
        sigaddset(&stop_signals, SIGINT);
        sigaddset(&stop_signals, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

        zkr::RollupNode node(cfg);
        const int bound = node.start();
        std::cout << "listening on http://" << cfg.host << ":" << bound << " (ledger "
                  << node.ledger().model().to_json().dump() << ")" << std::endl;

        int sig = 0;
        sigwait(&stop_signals, &sig);
        std::cout << "signal " << sig << ", stopping" << std::endl;
        node.stop();
        return 0;
    } catch (const zkr::Error& e) {
        std::cerr << "sequencer: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "sequencer: " << e.what() << "\n";
        return 2;
    }
}
