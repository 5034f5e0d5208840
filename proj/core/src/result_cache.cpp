#include "kernelcur/result_cache.hpp"

#include <fstream>
#include <sstream>

#include "kernelcur/digest.hpp"
#include "kernelcur/error.hpp"

namespace kernelcur {

namespace fs = std::filesystem;

namespace {

OrderedJson payload_of(const protocol::RunnerResponse& r) {
    OrderedJson j;
    j["status"] = std::string(to_string(r.status));
    if (r.t_ref_ms) j["t_ref_ms"] = *r.t_ref_ms;
    if (r.t_kernel_ms) j["t_kernel_ms"] = *r.t_kernel_ms;
    j["diagnostics"] = r.diagnostics;
    return j;
}

}  // namespace

ResultCache::ResultCache(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_ / "entries");
}

std::string ResultCache::key_for(const std::string& task_source, const std::string& kernel_source,
                                 const std::string& config_hash) {
    return digest_parts({task_source, kernel_source, config_hash});
}

fs::path ResultCache::entry_path(const std::string& key) const {
    return dir_ / "entries" / key.substr(0, 2) / (key + ".json");
}

std::optional<protocol::RunnerResponse> ResultCache::lookup(const std::string& key) const {
    const fs::path path = entry_path(key);
    std::lock_guard lock(mutex_);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    in.close();

    try {
        const Json entry = Json::parse(ss.str());
        const Json& payload = entry.at("payload");
        if (entry.at("key").get<std::string>() != key ||
            entry.at("checksum").get<std::string>() != to_hex(sha256(payload.dump()))) {
            throw Error("checksum mismatch");
        }
        protocol::RunnerResponse r;
        auto status = parse_status(payload.at("status").get<std::string>());
        if (!status) throw Error("bad status");
        r.status = *status;
        if (payload.contains("t_ref_ms")) r.t_ref_ms = payload.at("t_ref_ms").get<double>();
        if (payload.contains("t_kernel_ms")) r.t_kernel_ms = payload.at("t_kernel_ms").get<double>();
        r.diagnostics = payload.at("diagnostics").get<std::string>();
        return r;
    } catch (const std::exception&) {
        std::error_code ec;
        fs::remove(path, ec);
        return std::nullopt;
    }
}

void ResultCache::store(const std::string& key, const protocol::RunnerResponse& response) {
    if (response.synthetic) return;
    const fs::path path = entry_path(key);
    // Checksum is over the sorted-key dump so it matches what lookup recomputes.
    const Json payload = Json::parse(dump_line(payload_of(response)));
    OrderedJson entry;
    entry["key"] = key;
    entry["checksum"] = to_hex(sha256(payload.dump()));
    entry["payload"] = payload;

    std::lock_guard lock(mutex_);
    fs::create_directories(path.parent_path());
    const bool existed = fs::exists(path);
    write_file_atomic(path, dump_line(entry) + "\n");
    if (!existed) {
        OrderedJson line;
        line["key"] = key;
        line["path"] = fs::relative(path, dir_).generic_string();
        std::ofstream index(dir_ / "index.jsonl", std::ios::app | std::ios::binary);
        index << dump_line(line) << '\n';
    }
}

std::size_t ResultCache::index_size() const {
    std::lock_guard lock(mutex_);
    std::ifstream in(dir_ / "index.jsonl");
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) ++n;
    }
    return n;
}

}  // namespace kernelcur
