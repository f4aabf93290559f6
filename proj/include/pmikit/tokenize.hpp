#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pmikit {

enum class TokenizerMode {
  raw,           // lowercase; runs of ASCII alphanumerics form tokens
  pretokenized,  // split on whitespace, tokens kept verbatim
};

// Both modes validate UTF-8 first and report the byte offset of the first
// malformed sequence. In raw mode every non-alphanumeric byte separates
// tokens, so punctuation and non-ASCII characters act as delimiters.
std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode);

// Reads a whole file and tokenizes it. max_bytes > 0 truncates the input to
// its first max_bytes bytes; if the cut lands inside a multi-byte UTF-8
// sequence it backs off to the previous character boundary.
std::vector<std::string> tokenize_file(const std::string& path, TokenizerMode mode,
                                       std::size_t max_bytes = 0);

}  // namespace pmikit
