#include "langprof/harness/prompt.h"

#include "langprof/errors.h"

namespace langprof {

TokenSeq BuildIclPrefix(std::span<const TokenSeq> train, int m, const std::string& separator) {
  if (m < 1) throw ValidationError("ICL repetitions must be at least 1");
  std::size_t block = 0;
  for (const TokenSeq& s : train) block += s.size() + 1;
  TokenSeq out;
  out.reserve(block * static_cast<std::size_t>(m));
  for (int rep = 0; rep < m; ++rep) {
    for (const TokenSeq& s : train) {
      out.insert(out.end(), s.begin(), s.end());
      out.push_back(separator);
    }
  }
  return out;
}

IclPrompt BuildIclPrompt(std::span<const TokenSeq> train, int m, const std::string& separator,
                         std::span<const std::string> test) {
  IclPrompt prompt;
  prompt.tokens = BuildIclPrefix(train, m, separator);
  prompt.target_begin = prompt.tokens.size();
  prompt.tokens.insert(prompt.tokens.end(), test.begin(), test.end());
  prompt.target_end = prompt.tokens.size();
  return prompt;
}

}  // namespace langprof
