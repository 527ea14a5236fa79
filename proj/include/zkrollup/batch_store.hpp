#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "zkrollup/cid.hpp"
#include "zkrollup/transaction.hpp"

namespace zkr {

/// The off-chain record of one sealed batch: its real transactions in leaf
/// order, plus the counters needed to rebuild the padded leaf vector.
struct BatchPayload {
    std::uint64_t batch_number = 0;
    std::vector<Transaction> transactions;
    std::vector<std::uint64_t> tracking_ids;  // sequencer receipt id per transaction
    std::size_t real_count = 0;
    std::int64_t created_at = 0;

    /// Throws ValidationError when counts disagree or a transaction is invalid.
    void validate() const;
    /// Compact JSON with sorted keys:
    /// {"batchNumber","createdAt","realCount","trackingIds","transactions"}.
    std::string canonical_bytes() const;
    static BatchPayload parse(std::string_view bytes);
};

/// Content-addressed object store; objects are immutable once written.
class BatchStore {
public:
    virtual ~BatchStore() = default;

    /// Persists `bytes` under cid_of(bytes). Throws StorageError (retryable).
    virtual Cid put_bytes(std::string_view bytes) = 0;
    /// Throws NotFoundError, StorageError, or IntegrityError on a hash mismatch.
    virtual std::string get(const Cid& cid) = 0;

    Cid put(const BatchPayload& payload) {
        payload.validate();
        return put_bytes(payload.canonical_bytes());
    }
};

/// One file per object in a directory, named by the CID text.
class LocalBatchStore final : public BatchStore {
public:
    explicit LocalBatchStore(std::filesystem::path dir);

    Cid put_bytes(std::string_view bytes) override;
    std::string get(const Cid& cid) override;

    std::filesystem::path path_for(const Cid& cid) const { return dir_ / cid.text(); }
    std::size_t object_count() const;
    const std::filesystem::path& directory() const { return dir_; }

private:
    std::filesystem::path dir_;
    std::mutex mu_;
    std::uint64_t temp_counter_ = 0;
};

/// Talks to an IPFS daemon's HTTP RPC (/api/v0/add, /api/v0/cat). Objects are
/// added with cid-version=1 and raw-leaves, so single-chunk payloads get the
/// same CID as cid_of(); any other answer is treated as an integrity failure.
class IpfsHttpStore final : public BatchStore {
public:
    /// `base_url` like "http://127.0.0.1:5001".
    explicit IpfsHttpStore(std::string base_url, int timeout_ms = 5000);

    Cid put_bytes(std::string_view bytes) override;
    std::string get(const Cid& cid) override;

private:
    std::string base_url_;
    int timeout_ms_;
};

}  // namespace zkr
