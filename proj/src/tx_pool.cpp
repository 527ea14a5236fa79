#include "zkrollup/tx_pool.hpp"

#include <algorithm>
#include <map>

#include "zkrollup/errors.hpp"

namespace zkr {

TxPool::TxPool(std::size_t capacity, std::filesystem::path journal)
    : capacity_(capacity), journal_path_(std::move(journal)) {
    if (capacity_ == 0) throw ConfigError("pool capacity must be positive");
    if (!journal_path_.empty()) {
        recover();
        journal_.open(journal_path_, std::ios::app);
        if (!journal_) throw StorageError("cannot open pool journal " + journal_path_.string());
    }
}

void TxPool::recover() {
    std::ifstream in(journal_path_);
    if (!in) return;
    std::map<std::uint64_t, PooledTx> open;
    std::uintmax_t good_bytes = 0;
    bool torn = false;
    std::string line;
    while (std::getline(in, line)) {
        // Every record ends in '\n'; anything else is a write cut short.
        if (in.eof()) {
            torn = !line.empty();
            break;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            torn = true;
            break;
        }
        good_bytes += line.size() + 1;
        const auto op = j.value("op", "");
        if (op == "enqueue") {
            PooledTx e;
            e.tracking_id = j.at("id").get<std::uint64_t>();
            e.accepted_at = j.at("acceptedAt").get<std::int64_t>();
            e.tx = transaction_from_json(j.at("tx"));
            next_id_ = std::max(next_id_, e.tracking_id + 1);
            open[e.tracking_id] = std::move(e);
        } else if (op == "ack") {
            for (const auto& id : j.at("ids")) open.erase(id.get<std::uint64_t>());
        }
    }
    in.close();
    // Drop the torn tail so new records start on a fresh line.
    if (torn) std::filesystem::resize_file(journal_path_, good_bytes);
    for (auto& [_, e] : open) queue_.push_back(std::move(e));
}

void TxPool::journal_line(const nlohmann::json& j) {
    if (!journal_.is_open()) return;
    journal_ << j.dump() << '\n';
    journal_.flush();
    if (!journal_) throw StorageError("pool journal write failed");
}

std::uint64_t TxPool::push(const Transaction& tx, std::int64_t now_ms) {
    std::uint64_t id = 0;
    {
        std::lock_guard lock(mu_);
        if (queue_.size() + in_flight_.size() >= capacity_) {
            throw PoolFullError("transaction pool is full (" + std::to_string(capacity_) + ")");
        }
        id = next_id_++;
        journal_line({{"op", "enqueue"}, {"id", id}, {"acceptedAt", now_ms}, {"tx", to_json(tx)}});
        queue_.push_back({id, tx, now_ms});
        ++accepted_;
    }
    cv_.notify_all();
    return id;
}

std::vector<PooledTx> TxPool::take(std::size_t max) {
    std::lock_guard lock(mu_);
    const std::size_t n = std::min(max, queue_.size());
    std::vector<PooledTx> out(std::make_move_iterator(queue_.begin()),
                              std::make_move_iterator(queue_.begin() + static_cast<std::ptrdiff_t>(n)));
    queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(n));
    for (const auto& e : out) in_flight_.insert(e.tracking_id);
    return out;
}

void TxPool::requeue_front(std::vector<PooledTx> entries) {
    {
        std::lock_guard lock(mu_);
        for (const auto& e : entries) in_flight_.erase(e.tracking_id);
        queue_.insert(queue_.begin(), std::make_move_iterator(entries.begin()),
                      std::make_move_iterator(entries.end()));
        requeued_ += entries.size();
    }
    cv_.notify_all();
}

void TxPool::acknowledge(const std::vector<PooledTx>& entries) {
    std::lock_guard lock(mu_);
    nlohmann::json ids = nlohmann::json::array();
    for (const auto& e : entries) {
        ids.push_back(e.tracking_id);
        in_flight_.erase(e.tracking_id);
    }
    journal_line({{"op", "ack"}, {"ids", ids}});
    acknowledged_ += entries.size();
}

std::size_t TxPool::wait_for(std::size_t threshold, std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return interrupted_ || queue_.size() >= threshold; });
    return queue_.size();
}

void TxPool::interrupt() {
    {
        std::lock_guard lock(mu_);
        interrupted_ = true;
    }
    cv_.notify_all();
}

std::size_t TxPool::size() const {
    std::lock_guard lock(mu_);
    return queue_.size();
}

std::size_t TxPool::in_flight() const {
    std::lock_guard lock(mu_);
    return in_flight_.size();
}

std::vector<std::uint64_t> TxPool::pending_ids() const {
    std::lock_guard lock(mu_);
    std::vector<std::uint64_t> ids;
    ids.reserve(queue_.size() + in_flight_.size());
    for (const auto& e : queue_) ids.push_back(e.tracking_id);
    ids.insert(ids.end(), in_flight_.begin(), in_flight_.end());
    return ids;
}

std::uint64_t TxPool::accepted_total() const {
    std::lock_guard lock(mu_);
    return accepted_;
}

std::uint64_t TxPool::acknowledged_total() const {
    std::lock_guard lock(mu_);
    return acknowledged_;
}

std::uint64_t TxPool::requeued_total() const {
    std::lock_guard lock(mu_);
    return requeued_;
}

}  // namespace zkr
