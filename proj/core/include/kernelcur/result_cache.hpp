#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "kernelcur/protocol.hpp"

namespace kernelcur {

// Content-addressed store of runner verdicts under a directory:
//
//   <dir>/entries/<first two hex chars>/<key>.json   one verdict per file
//   <dir>/index.jsonl                                append-only key list
//
// Each entry carries its own checksum; an unreadable or mismatched entry is a
// miss and is removed without touching the others.
class ResultCache {
public:
    explicit ResultCache(std::filesystem::path dir);

    static std::string key_for(const std::string& task_source, const std::string& kernel_source,
                               const std::string& config_hash);

    std::optional<protocol::RunnerResponse> lookup(const std::string& key) const;
    void store(const std::string& key, const protocol::RunnerResponse& response);

    std::size_t index_size() const;
    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path entry_path(const std::string& key) const;

private:
    std::filesystem::path dir_;
    mutable std::mutex mutex_;
};

}  // namespace kernelcur
