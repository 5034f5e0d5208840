#include "kernelcur/jsonl.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "kernelcur/error.hpp"

namespace kernelcur {

namespace fs = std::filesystem;

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

void for_each_json_line(const fs::path& path,
                        const std::function<void(Json&&, std::size_t)>& on_line) {
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        if (lines[i].find_first_not_of(" \t") == std::string::npos) {
            continue;
        }
        Json object;
        try {
            object = Json::parse(lines[i]);
        } catch (const Json::parse_error& e) {
            throw ParseError(path.string(), line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!object.is_object()) {
            throw ParseError(path.string(), line_no, "expected a JSON object");
        }
        try {
            on_line(std::move(object), line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(path.string(), line_no, e.what());
        } catch (const Json::exception& e) {
            throw ParseError(path.string(), line_no, e.what());
        }
    }
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::random_device rd;
    const fs::path tmp =
        dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string dump_line(const OrderedJson& object) {
    return object.dump(-1, ' ', false, Json::error_handler_t::strict);
}

namespace field {

const Json& require(const Json& object, std::string_view key) {
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        throw Error("missing required field \"" + std::string(key) + "\"");
    }
    return *it;
}

std::string string(const Json& object, std::string_view key) {
    const Json& v = require(object, key);
    if (!v.is_string()) {
        throw Error("field \"" + std::string(key) + "\" must be a string");
    }
    return v.get<std::string>();
}

std::int64_t integer(const Json& object, std::string_view key) {
    const Json& v = require(object, key);
    if (!v.is_number_integer()) {
        throw Error("field \"" + std::string(key) + "\" must be an integer");
    }
    return v.get<std::int64_t>();
}

double real(const Json& object, std::string_view key) {
    const Json& v = require(object, key);
    if (!v.is_number()) {
        throw Error("field \"" + std::string(key) + "\" must be a number");
    }
    return v.get<double>();
}

}  // namespace field

}  // namespace kernelcur
