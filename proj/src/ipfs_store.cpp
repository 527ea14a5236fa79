#include <httplib.h>

#include "zkrollup/batch_store.hpp"
#include "zkrollup/errors.hpp"

namespace zkr {

namespace {

httplib::Client make_client(const std::string& base_url, int timeout_ms) {
    httplib::Client cli(base_url);
    const auto sec = timeout_ms / 1000;
    const auto usec = (timeout_ms % 1000) * 1000;
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    return cli;
}

}  // namespace

IpfsHttpStore::IpfsHttpStore(std::string base_url, int timeout_ms)
    : base_url_(std::move(base_url)), timeout_ms_(timeout_ms) {
    if (!base_url_.starts_with("http://")) {
        throw ConfigError("ipfs store url must start with http://, got '" + base_url_ + "'");
    }
}

Cid IpfsHttpStore::put_bytes(std::string_view bytes) {
    const Cid expected = Cid::of(bytes);
    auto cli = make_client(base_url_, timeout_ms_);
    httplib::MultipartFormDataItems items = {
        {"file", std::string(bytes), "batch.json", "application/octet-stream"}};
    auto res = cli.Post("/api/v0/add?cid-version=1&raw-leaves=true&hash=sha2-256&pin=true", items);
    if (!res) {
        throw StorageError("ipfs add: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw StorageError("ipfs add: HTTP " + std::to_string(res->status) + " " + res->body);
    }
    std::string hash;
    try {
        hash = nlohmann::json::parse(res->body).at("Hash").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw StorageError(std::string("ipfs add: unexpected response: ") + e.what());
    }
    if (hash != expected.text()) {
        throw IntegrityError("ipfs add returned " + hash + ", expected " + expected.text());
    }
    return expected;
}

std::string IpfsHttpStore::get(const Cid& cid) {
    auto cli = make_client(base_url_, timeout_ms_);
    auto res = cli.Post("/api/v0/cat?arg=" + cid.text(), "", "application/octet-stream");
    if (!res) throw StorageError("ipfs cat: " + httplib::to_string(res.error()));
    if (res->status == 404 ||
        (res->status == 500 && res->body.find("not found") != std::string::npos)) {
        throw NotFoundError("no object " + cid.text());
    }
    if (res->status != 200) {
        throw StorageError("ipfs cat: HTTP " + std::to_string(res->status) + " " + res->body);
    }
    if (!cid.matches(res->body)) throw IntegrityError("object " + cid.text() + " fails its hash check");
    return res->body;
}

}  // namespace zkr
