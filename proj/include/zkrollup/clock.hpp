#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <thread>

namespace zkr {

/// Millisecond time source. Ledger block cuts, receipts and payload
/// timestamps all read time through this, so tests can swap in SimClock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() const = 0;
    virtual void sleep_until(std::int64_t t_ms) = 0;
    virtual bool simulated() const = 0;
};

class WallClock final : public Clock {
public:
    std::int64_t now_ms() const override {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }
    void sleep_until(std::int64_t t_ms) override {
        std::this_thread::sleep_until(std::chrono::system_clock::time_point(std::chrono::milliseconds(t_ms)));
    }
    bool simulated() const override { return false; }
};

/// Manually driven time. sleep_until() jumps forward instead of blocking.
class SimClock final : public Clock {
public:
    explicit SimClock(std::int64_t start_ms = 0) : now_(start_ms) {}

    std::int64_t now_ms() const override { return now_.load(); }
    void sleep_until(std::int64_t t_ms) override { advance_to(t_ms); }
    bool simulated() const override { return true; }

    void advance_to(std::int64_t t_ms) {
        std::int64_t cur = now_.load();
        while (cur < t_ms && !now_.compare_exchange_weak(cur, t_ms)) {
        }
    }
    void advance_by(std::int64_t delta_ms) { now_.fetch_add(std::max<std::int64_t>(delta_ms, 0)); }

private:
    std::atomic<std::int64_t> now_;
};

}  // namespace zkr
