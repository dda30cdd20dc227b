#ifndef LANGPROF_HARNESS_PROMPT_H_
#define LANGPROF_HARNESS_PROMPT_H_

#include <cstddef>
#include <span>
#include <string>

#include "langprof/grammar.h"

namespace langprof {

struct IclPrompt {
  TokenSeq tokens;
  // Loss is taken over tokens[target_begin, target_end) only.
  std::size_t target_begin = 0;
  std::size_t target_end = 0;
};

// The whole ordered training block, repeated m times, each string followed
// by the separator: s1 ; s2 ; ... ; sn ; s1 ; ... ; sn ;
TokenSeq BuildIclPrefix(std::span<const TokenSeq> train, int m, const std::string& separator);

// Prefix followed by the test string. Throws ValidationError for m < 1.
IclPrompt BuildIclPrompt(std::span<const TokenSeq> train, int m, const std::string& separator,
                         std::span<const std::string> test);

}  // namespace langprof

#endif  // LANGPROF_HARNESS_PROMPT_H_
