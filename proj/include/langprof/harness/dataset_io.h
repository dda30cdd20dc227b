#ifndef LANGPROF_HARNESS_DATASET_IO_H_
#define LANGPROF_HARNESS_DATASET_IO_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "langprof/grammar.h"

namespace langprof {

// Dataset files hold one string per line, tokens separated by single
// spaces, newline-terminated.
std::string FormatTokens(std::span<const std::string> tokens);
TokenSeq ParseTokens(std::string_view line);

std::string DatasetToText(std::span<const TokenSeq> strings);
std::vector<TokenSeq> DatasetFromText(std::string_view text);
void WriteDataset(const std::filesystem::path& path, std::span<const TokenSeq> strings);
std::vector<TokenSeq> ReadDataset(const std::filesystem::path& path);

std::string ReadFile(const std::filesystem::path& path);
// Creates parent directories as needed.
void WriteFile(const std::filesystem::path& path, std::string_view contents);

std::string Sha256Hex(std::string_view data);
std::string Sha256OfFile(const std::filesystem::path& path);

// Shortest text that parses back to exactly `x`; "Infinity" for +inf.
std::string FormatNumber(double x);

}  // namespace langprof

#endif  // LANGPROF_HARNESS_DATASET_IO_H_
