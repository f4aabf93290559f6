#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pmikit/counts.hpp"

namespace pmikit {

inline constexpr int kStoreFormatVersion = 1;

// A count store on disk is a directory:
//   metadata.json  format version, window config, tokenizer mode, totals
//   vocab.csv      id,token,anchor_count (id order)
//   pairs.csv      center_id,word_id,count (sorted by center, then word)
//   tokens.u32     encoded token sequence, little-endian uint32
// The token sequence is part of the store because set-level counts are
// computed on demand from it. Writes are deterministic: the same counts
// produce byte-identical files.
struct StoreData {
  EventCounts counts;
  std::vector<WordId> tokens;
  std::string tokenizer;
};

void save_store(const std::filesystem::path& dir, const EventCounts& counts,
                std::span<const WordId> tokens, const std::string& tokenizer);

// Fails with FormatError on a version mismatch or inconsistent content, and
// with IoError when files are missing or unreadable.
StoreData load_store(const std::filesystem::path& dir);

}  // namespace pmikit
