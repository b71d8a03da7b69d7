#include "sitr/sha256.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <memory>
#include <vector>

#include "sitr/errors.hpp"

namespace sitr {

namespace {

struct CtxFree {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using CtxPtr = std::unique_ptr<EVP_MD_CTX, CtxFree>;

std::string finish_hex(EVP_MD_CTX* ctx) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest, &len) != 1)
    throw numeric_error("sha256 finalize failed");
  static const char* hexchars = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hexchars[digest[i] >> 4]);
    out.push_back(hexchars[digest[i] & 0xf]);
  }
  return out;
}

CtxPtr make_ctx() {
  CtxPtr ctx(EVP_MD_CTX_new());
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw numeric_error("sha256 init failed");
  return ctx;
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  CtxPtr ctx = make_ctx();
  if (!bytes.empty() &&
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1)
    throw numeric_error("sha256 update failed");
  return finish_hex(ctx.get());
}

std::string sha256_hex(const std::string& text) {
  return sha256_hex(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string sha256_file(const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "rb");
  if (!f) throw io_error("cannot open for hash: " + path.string());
  CtxPtr ctx = make_ctx();
  std::vector<std::uint8_t> buf(1 << 16);
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), f)) > 0) {
    if (EVP_DigestUpdate(ctx.get(), buf.data(), n) != 1) {
      std::fclose(f);
      throw numeric_error("sha256 update failed");
    }
  }
  std::fclose(f);
  return finish_hex(ctx.get());
}

std::string sha256_dir(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw io_error("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::vector<std::string> rels;
  rels.reserve(files.size());
  for (const auto& p : files)
    rels.push_back(fs::relative(p, dir).generic_string());
  std::vector<std::size_t> order(rels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return rels[a] < rels[b]; });
  std::string acc;
  for (std::size_t i : order) {
    acc += rels[i];
    acc += '\n';
    acc += sha256_file(files[i]);
    acc += '\n';
  }
  return sha256_hex(acc);
}

}  // namespace sitr
