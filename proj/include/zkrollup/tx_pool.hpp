#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <vector>

#include "zkrollup/transaction.hpp"

namespace zkr {

struct PooledTx {
    std::uint64_t tracking_id = 0;
    Transaction tx;
    std::int64_t accepted_at = 0;
};

/// FIFO pool between ingestion and settlement.
///
/// Capacity counts queued plus taken-but-unacknowledged entries, so a
/// requeue after a failed settlement can never push the pool past it.
/// With a journal path, every accept and acknowledgement is appended to a
/// JSON-lines file and unacknowledged entries survive a restart (at-least-once
/// handoff to settlement).
class TxPool {
public:
    explicit TxPool(std::size_t capacity, std::filesystem::path journal = {});

    /// Returns the tracking id. Throws PoolFullError at capacity.
    std::uint64_t push(const Transaction& tx, std::int64_t now_ms);

    /// Removes and returns up to `max` oldest entries.
    std::vector<PooledTx> take(std::size_t max);
    /// Puts entries back at the head, preserving their order.
    void requeue_front(std::vector<PooledTx> entries);
    /// Marks taken entries as settled.
    void acknowledge(const std::vector<PooledTx>& entries);

    /// Blocks until at least `threshold` entries are queued, the timeout
    /// passes, or interrupt() is called. Returns the queued count.
    std::size_t wait_for(std::size_t threshold, std::chrono::milliseconds timeout);
    void interrupt();

    std::size_t size() const;
    std::size_t in_flight() const;
    std::size_t capacity() const { return capacity_; }
    /// Queued and in-flight tracking ids: accepted but not yet settled.
    std::vector<std::uint64_t> pending_ids() const;

    std::uint64_t accepted_total() const;
    std::uint64_t acknowledged_total() const;
    std::uint64_t requeued_total() const;

private:
    void journal_line(const nlohmann::json& j);
    void recover();

    std::size_t capacity_;
    std::filesystem::path journal_path_;
    std::ofstream journal_;

    mutable std::mutex mu_;
    std::condition_variable cv_;
    std::deque<PooledTx> queue_;
    std::set<std::uint64_t> in_flight_;
    std::uint64_t next_id_ = 1;
    std::uint64_t accepted_ = 0;
    std::uint64_t acknowledged_ = 0;
    std::uint64_t requeued_ = 0;
    bool interrupted_ = false;
};

}  // namespace zkr
