#include "kernelcur/digest.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace kernelcur {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};
using MdCtx = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

class Hasher {
public:
    Hasher() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw std::runtime_error("sha256: digest init failed");
        }
    }

    void update(std::string_view data) {
        if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1) {
            throw std::runtime_error("sha256: digest update failed");
        }
    }

    Sha256 finish() {
        Sha256 out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != out.size()) {
            throw std::runtime_error("sha256: digest final failed");
        }
        return out;
    }

private:
    MdCtx ctx_;
};

}  // namespace

Sha256 sha256(std::string_view data) {
    Hasher h;
    h.update(data);
    return h.finish();
}

std::string to_hex(const Sha256& digest) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(digest.size() * 2);
    for (std::uint8_t b : digest) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xF]);
    }
    return out;
}

std::string digest_parts(std::initializer_list<std::string_view> parts) {
    Hasher h;
    for (std::string_view part : parts) {
        h.update(std::to_string(part.size()));
        h.update(":");
        h.update(part);
    }
    return to_hex(h.finish());
}

}  // namespace kernelcur
