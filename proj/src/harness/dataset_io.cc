#include "langprof/harness/dataset_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "langprof/errors.h"

namespace langprof {

std::string FormatTokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty() || tokens[i].find_first_of(" \t\r\n") != std::string::npos) {
      throw ValidationError("token '" + tokens[i] + "' is empty or contains whitespace");
    }
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenSeq ParseTokens(std::string_view line) {
  TokenSeq out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    std::size_t start = line.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    std::size_t end = line.find_first_of(" \t\r", start);
    if (end == std::string_view::npos) end = line.size();
    out.emplace_back(line.substr(start, end - start));
    pos = end;
  }
  return out;
}

std::string DatasetToText(std::span<const TokenSeq> strings) {
  std::string out;
  for (const TokenSeq& s : strings) {
    out += FormatTokens(s);
    out += '\n';
  }
  return out;
}

std::vector<TokenSeq> DatasetFromText(std::string_view text) {
  std::vector<TokenSeq> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(ParseTokens(text.substr(pos, end - pos)));
    pos = end + 1;
  }
  return out;
}

void WriteDataset(const std::filesystem::path& path, std::span<const TokenSeq> strings) {
  WriteFile(path, DatasetToText(strings));
}

std::vector<TokenSeq> ReadDataset(const std::filesystem::path& path) {
  return DatasetFromText(ReadFile(path));
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

std::string Sha256Hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                               &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

std::string Sha256OfFile(const std::filesystem::path& path) { return Sha256Hex(ReadFile(path)); }

std::string FormatNumber(double x) {
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  if (std::isnan(x)) return "NaN";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw Error("number formatting failed");
  return std::string(buf, end);
}

}  // namespace langprof
