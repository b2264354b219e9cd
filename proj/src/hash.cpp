#include "nulleval/hash.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nulleval/errors.hpp"

namespace nulleval {

namespace {

struct DigestCtx {
    EVP_MD_CTX* ctx;
    DigestCtx() : ctx(EVP_MD_CTX_new()) {
        if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
            throw std::runtime_error("failed to initialize SHA-256 context");
        }
    }
    ~DigestCtx() { EVP_MD_CTX_free(ctx); }
    DigestCtx(const DigestCtx&) = delete;
    DigestCtx& operator=(const DigestCtx&) = delete;

    void update(const void* data, std::size_t len) {
        if (EVP_DigestUpdate(ctx, data, len) != 1) {
            throw std::runtime_error("SHA-256 update failed");
        }
    }

    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx, md.data(), &len) != 1) {
            throw std::runtime_error("SHA-256 finalize failed");
        }
        static constexpr char digits[] = "0123456789abcdef";
        std::string out(len * 2, '0');
        for (unsigned int i = 0; i < len; ++i) {
            out[2 * i] = digits[md[i] >> 4];
            out[2 * i + 1] = digits[md[i] & 0x0F];
        }
        return out;
    }
};

void hash_file_into(DigestCtx& d, const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot open " + file.string() + " for fingerprinting");
    std::vector<char> buf(1 << 16);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0) d.update(buf.data(), static_cast<std::size_t>(got));
    }
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    DigestCtx d;
    d.update(data.data(), data.size());
    return d.hex();
}

std::string fingerprint_path(const std::filesystem::path& source) {
    namespace fs = std::filesystem;
    if (!fs::exists(source)) throw Error("no such path: " + source.string());
    DigestCtx d;
    if (fs::is_directory(source)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::recursive_directory_iterator(source)) {
            if (entry.is_regular_file()) files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const auto rel = fs::relative(f, source).generic_string();
            d.update(rel.data(), rel.size());
            d.update("\0", 1);
            hash_file_into(d, f);
            d.update("\0", 1);
        }
    } else {
        hash_file_into(d, source);
    }
    return d.hex();
}

}  // namespace nulleval
