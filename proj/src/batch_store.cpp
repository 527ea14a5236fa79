#include "zkrollup/batch_store.hpp"

#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include "zkrollup/errors.hpp"

namespace zkr {

namespace fs = std::filesystem;

void BatchPayload::validate() const {
    if (real_count < 1 || real_count > kBatchLeaves) {
        throw ValidationError("batch payload realCount must be in [1,32]");
    }
    if (transactions.size() != real_count) {
        throw ValidationError("batch payload transaction count differs from realCount");
    }
    if (!tracking_ids.empty() && tracking_ids.size() != real_count) {
        throw ValidationError("batch payload trackingIds count differs from realCount");
    }
    for (const auto& tx : transactions) zkr::validate(tx);
}

std::string BatchPayload::canonical_bytes() const {
    nlohmann::json txs = nlohmann::json::array();
    for (const auto& tx : transactions) txs.push_back(to_json(tx));
    const nlohmann::json j{{"batchNumber", batch_number},
                           {"createdAt", created_at},
                           {"realCount", real_count},
                           {"trackingIds", tracking_ids},
                           {"transactions", std::move(txs)}};
    return j.dump();
}

BatchPayload BatchPayload::parse(std::string_view bytes) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("batch payload is not JSON: ") + e.what());
    }
    try {
        BatchPayload p;
        p.batch_number = j.at("batchNumber").get<std::uint64_t>();
        p.created_at = j.at("createdAt").get<std::int64_t>();
        p.real_count = j.at("realCount").get<std::size_t>();
        p.tracking_ids = j.at("trackingIds").get<std::vector<std::uint64_t>>();
        for (const auto& tx : j.at("transactions")) p.transactions.push_back(transaction_from_json(tx));
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed batch payload: ") + e.what());
    }
}

LocalBatchStore::LocalBatchStore(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
        throw StorageError("cannot create store directory " + dir_.string() + ": " + ec.message());
    }
}

Cid LocalBatchStore::put_bytes(std::string_view bytes) {
    const Cid cid = Cid::of(bytes);
    const fs::path target = path_for(cid);
    std::error_code ec;
    if (fs::exists(target, ec)) return cid;

    fs::path temp;
    {
        std::lock_guard lock(mu_);
        std::ostringstream name;
        name << ".tmp-" << std::this_thread::get_id() << '-' << temp_counter_++;
        temp = dir_ / name.str();
    }
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw StorageError("write failed for " + temp.string());
    }
    // Same content under the same name, so a concurrent winner is harmless.
    fs::rename(temp, target, ec);
    if (ec) {
        fs::remove(temp);
        throw StorageError("cannot publish object " + cid.text() + ": " + ec.message());
    }
    return cid;
}

std::string LocalBatchStore::get(const Cid& cid) {
    const fs::path path = path_for(cid);
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::error_code ec;
        if (!fs::exists(path, ec)) throw NotFoundError("no object " + cid.text());
        throw StorageError("cannot open object " + cid.text());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw StorageError("read failed for object " + cid.text());
    if (!cid.matches(bytes)) throw IntegrityError("object " + cid.text() + " fails its hash check");
    return bytes;
}

std::size_t LocalBatchStore::object_count() const {
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (entry.is_regular_file() && Cid::is_valid(entry.path().filename().string())) ++n;
    }
    return n;
}

}  // namespace zkr
