#include "cli/manifest.h"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>

#include "mcd/error.h"

namespace mcd::cli {

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char byte[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

Manifest::Manifest(std::string command, const std::vector<std::string>& argv) {
  std::string line;
  for (const auto& arg : argv) {
    if (!line.empty()) line += ' ';
    line += arg;
  }
  entries_.emplace_back("tool", "mcd");
  entries_.emplace_back("version", MCD_VERSION_STRING);
  entries_.emplace_back("command", std::move(command));
  entries_.emplace_back("argv", line);
}

void Manifest::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  entries_.emplace_back(key, buf);
}

void Manifest::input(const std::string& role, const std::string& path) {
  entries_.emplace_back("input." + role, path);
  entries_.emplace_back("input." + role + ".sha256", file_digest(path));
}

void Manifest::write_all(double elapsed_seconds) const {
  char elapsed[64];
  std::snprintf(elapsed, sizeof elapsed, "%.6f", elapsed_seconds);
  for (const auto& path : outputs_) {
    std::ofstream out(path + ".manifest");
    if (!out) throw Error("cannot write '" + path + ".manifest'");
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
    out << "output=" << path << '\n';
    out << "output.sha256=" << file_digest(path) << '\n';
    out << "elapsed_s=" << elapsed << '\n';
  }
}

}  // namespace mcd::cli
