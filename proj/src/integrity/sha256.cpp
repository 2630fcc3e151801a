/**
 * @file sha256.cpp
 * @brief SHA-256 backed by OpenSSL's EVP interface
 */

#include "vision/integrity/sha256.hpp"

#include "vision/common/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace vision::integrity {

namespace {

struct md_ctx_deleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class sha256_context {
public:
    sha256_context() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw std::runtime_error("EVP sha256 init failed");
        }
    }

    void update(const void* data, std::size_t size) {
        if (size != 0 && EVP_DigestUpdate(ctx_.get(), data, size) != 1) {
            throw std::runtime_error("EVP sha256 update failed");
        }
    }

    auto hex() -> std::string {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw std::runtime_error("EVP sha256 final failed");
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(len * 2);
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(digits[md[i] >> 4]);
            out.push_back(digits[md[i] & 0x0F]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, md_ctx_deleter> ctx_;
};

}  // namespace

auto hash_bytes(std::span<const std::uint8_t> data) -> std::string {
    sha256_context ctx;
    ctx.update(data.data(), data.size());
    return ctx.hex();
}

auto hash_text(std::string_view text) -> std::string {
    sha256_context ctx;
    ctx.update(text.data(), text.size());
    return ctx.hex();
}

auto hash_file(const std::filesystem::path& path) -> file_digest {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(error_code::io_error, "cannot open " + path.string());
    sha256_context ctx;
    std::array<char, 1 << 16> buffer{};
    file_digest out;
    while (in) {
        in.read(buffer.data(), buffer.size());
        const auto got = static_cast<std::size_t>(in.gcount());
        ctx.update(buffer.data(), got);
        out.size += got;
    }
    if (in.bad()) throw error(error_code::io_error, "cannot read " + path.string());
    out.digest = ctx.hex();
    return out;
}

auto is_hex_digest(std::string_view text) -> bool {
    if (text.size() != 64) return false;
    for (const char c : text) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

}  // namespace vision::integrity
