#include "pmikit/tokenize.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "pmikit/error.hpp"

namespace pmikit {
namespace {

// Returns the length of the UTF-8 sequence starting at data[i], throwing on
// malformed input. Checks continuation bytes, overlong forms, surrogates and
// the U+10FFFF ceiling.
std::size_t utf8_sequence_length(std::string_view data, std::size_t i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(data[k]); };
  unsigned char b0 = byte(i);
  if (b0 < 0x80) return 1;

  std::size_t len;
  std::uint32_t cp;
  if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
  else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
  else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
  else throw DecodeError("invalid UTF-8 lead byte at offset " + std::to_string(i));

  if (i + len > data.size())
    throw DecodeError("truncated UTF-8 sequence at offset " + std::to_string(i));
  for (std::size_t k = 1; k < len; ++k) {
    unsigned char b = byte(i + k);
    if ((b & 0xC0) != 0x80)
      throw DecodeError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr std::uint32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
    throw DecodeError("invalid UTF-8 code point at offset " + std::to_string(i));
  return len;
}

void validate_utf8(std::string_view data) {
  for (std::size_t i = 0; i < data.size();) i += utf8_sequence_length(data, i);
}

bool is_word_byte(unsigned char b) {
  return (b >= 'a' && b <= 'z') || (b >= 'A' && b <= 'Z') || (b >= '0' && b <= '9');
}

bool is_space_byte(unsigned char b) {
  return b == ' ' || b == '\t' || b == '\n' || b == '\r';
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode) {
  validate_utf8(text);
  std::vector<std::string> out;
  std::string cur;
  if (mode == TokenizerMode::raw) {
    for (char ch : text) {
      unsigned char b = static_cast<unsigned char>(ch);
      if (is_word_byte(b)) {
        cur.push_back(static_cast<char>(std::tolower(b)));
      } else if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
    }
  } else {
    for (char ch : text) {
      if (is_space_byte(static_cast<unsigned char>(ch))) {
        if (!cur.empty()) { out.push_back(std::move(cur)); cur.clear(); }
      } else {
        cur.push_back(ch);
      }
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> tokenize_file(const std::string& path, TokenizerMode mode,
                                       std::size_t max_bytes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failure on corpus file: " + path);
  std::string data = std::move(buf).str();
  if (max_bytes > 0 && data.size() > max_bytes) {
    std::size_t cut = max_bytes;
    // Back off to a UTF-8 boundary so truncation cannot invent bad input.
    while (cut > 0 && (static_cast<unsigned char>(data[cut]) & 0xC0) == 0x80) --cut;
    data.resize(cut);
  }
  return tokenize(data, mode);
}

}  // namespace pmikit
