#include <doctest.h>

#include <fstream>

#include "pmikit/error.hpp"
#include "pmikit/tokenize.hpp"

using namespace pmikit;

TEST_CASE("raw mode lowercases and splits on non-alphanumerics") {
  auto toks = tokenize("The King's men, 2nd watch -- at dawn.", TokenizerMode::raw);
  std::vector<std::string> want = {"the", "king", "s", "men", "2nd", "watch", "at", "dawn"};
  CHECK(toks == want);
}

TEST_CASE("raw mode treats non-ASCII characters as separators") {
  auto toks = tokenize("caf\xc3\xa9 au lait", TokenizerMode::raw);
  std::vector<std::string> want = {"caf", "au", "lait"};
  CHECK(toks == want);
}

TEST_CASE("pretokenized mode splits on whitespace and keeps tokens verbatim") {
  auto toks = tokenize("a b  A-b c\n", TokenizerMode::pretokenized);
  std::vector<std::string> want = {"a", "b", "A-b", "c"};
  CHECK(toks == want);
}

TEST_CASE("empty and all-separator input") {
  CHECK(tokenize("", TokenizerMode::raw).empty());
  CHECK(tokenize(" .,! ", TokenizerMode::raw).empty());
  CHECK(tokenize("   ", TokenizerMode::pretokenized).empty());
}

TEST_CASE("malformed UTF-8 is rejected with a byte offset") {
  // 0xFF can never start a UTF-8 sequence; it sits at offset 4.
  try {
    tokenize(std::string("abc \xff xyz"), TokenizerMode::raw);
    FAIL("expected DecodeError");
  } catch (const DecodeError& e) {
    CHECK(std::string(e.what()).find("4") != std::string::npos);
  }
  // Truncated multi-byte sequence.
  CHECK_THROWS_AS(tokenize(std::string("ok \xc3"), TokenizerMode::pretokenized), DecodeError);
  // Overlong encoding of '/'.
  CHECK_THROWS_AS(tokenize(std::string("\xc0\xaf"), TokenizerMode::raw), DecodeError);
}

TEST_CASE("file tokenization with byte truncation") {
  const char* path = "tok_test_tmp.txt";
  {
    std::ofstream out(path, std::ios::binary);
    out << "alpha beta gamma delta";
  }
  auto all = tokenize_file(path, TokenizerMode::raw);
  CHECK(all.size() == 4);
  // 13 bytes cover "alpha beta ga" -- the fragment stays a token.
  auto cut = tokenize_file(path, TokenizerMode::raw, 13);
  std::vector<std::string> want = {"alpha", "beta", "ga"};
  CHECK(cut == want);
  CHECK_THROWS_AS(tokenize_file("no_such_file_here", TokenizerMode::raw), IoError);
  std::remove(path);
}
