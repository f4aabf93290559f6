#include "pmikit/store.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pmikit/error.hpp"

namespace pmikit {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  return f;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot read " + p.string());
  return f;
}

// Tokens are usually plain words, but the pretokenized mode passes through
// arbitrary non-whitespace bytes, so the vocabulary column needs CSV quoting.
void write_csv_field(std::ostream& out, const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char ch : s) {
    if (ch == '"') out << '"';
    out << ch;
  }
  out << '"';
}

std::vector<std::string> parse_csv_row(const std::string& line, const fs::path& p) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"' && cur.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw FormatError("unterminated quote in " + p.string());
  fields.push_back(std::move(cur));
  return fields;
}

std::int64_t parse_int(const std::string& s, const fs::path& p) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw FormatError("bad integer '" + s + "' in " + p.string());
  return v;
}

std::string read_line_or_throw(std::istream& in, const fs::path& p) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("unexpected end of " + p.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

void save_store(const fs::path& dir, const EventCounts& counts,
                std::span<const WordId> tokens, const std::string& tokenizer) {
  if (static_cast<Count>(tokens.size()) != counts.total_anchors())
    throw UsageError("token sequence does not match these counts");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const Vocabulary& vocab = counts.vocab();

  json meta;
  meta["format_version"] = kStoreFormatVersion;
  meta["window_radius"] = counts.config().window_radius;
  meta["min_count"] = counts.config().min_count;
  meta["tokenizer"] = tokenizer;
  meta["total_anchors"] = counts.total_anchors();
  meta["vocab_size"] = vocab.size();
  {
    auto f = open_out(dir / "metadata.json");
    f << meta.dump(2) << '\n';
  }

  {
    auto f = open_out(dir / "vocab.csv");
    f << "id,token,anchor_count\n";
    for (WordId id = 0; id < vocab.size(); ++id) {
      f << id << ',';
      write_csv_field(f, vocab.word(id));
      f << ',' << vocab.anchor_count(id) << '\n';
    }
  }

  {
    auto f = open_out(dir / "pairs.csv");
    f << "center_id,word_id,count\n";
    for (WordId c = 0; c < vocab.size(); ++c) {
      auto words = counts.center_row_words(c);
      auto vals = counts.center_row_counts(c);
      for (std::size_t i = 0; i < words.size(); ++i)
        f << c << ',' << words[i] << ',' << vals[i] << '\n';
    }
  }

  {
    auto f = open_out(dir / "tokens.u32");
    std::vector<unsigned char> buf;
    buf.reserve(tokens.size() * 4);
    for (WordId id : tokens) {
      const auto u = static_cast<std::uint32_t>(id);
      buf.push_back(static_cast<unsigned char>(u & 0xFF));
      buf.push_back(static_cast<unsigned char>((u >> 8) & 0xFF));
      buf.push_back(static_cast<unsigned char>((u >> 16) & 0xFF));
      buf.push_back(static_cast<unsigned char>((u >> 24) & 0xFF));
    }
    f.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("short write to " + (dir / "tokens.u32").string());
  }
}

StoreData load_store(const fs::path& dir) {
  json meta;
  {
    auto f = open_in(dir / "metadata.json");
    try {
      f >> meta;
    } catch (const json::exception& e) {
      throw FormatError("bad metadata.json: " + std::string(e.what()));
    }
  }
  if (!meta.contains("format_version") || !meta["format_version"].is_number_integer())
    throw FormatError("metadata.json has no format_version");
  const int version = meta["format_version"].get<int>();
  if (version != kStoreFormatVersion)
    throw FormatError("store format version " + std::to_string(version) +
                      " is not supported (expected " +
                      std::to_string(kStoreFormatVersion) + ")");

  WindowConfig config;
  Count total_anchors = 0;
  WordId vocab_size = 0;
  std::string tokenizer;
  try {
    config.window_radius = meta.at("window_radius").get<int>();
    config.min_count = meta.at("min_count").get<int>();
    total_anchors = meta.at("total_anchors").get<Count>();
    vocab_size = meta.at("vocab_size").get<WordId>();
    tokenizer = meta.at("tokenizer").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError("incomplete metadata.json: " + std::string(e.what()));
  }

  const fs::path vocab_path = dir / "vocab.csv";
  std::vector<std::string> words;
  std::vector<Count> anchor_counts;
  {
    auto f = open_in(vocab_path);
    if (read_line_or_throw(f, vocab_path) != "id,token,anchor_count")
      throw FormatError("unexpected header in " + vocab_path.string());
    std::string line;
    while (std::getline(f, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto fields = parse_csv_row(line, vocab_path);
      if (fields.size() != 3) throw FormatError("expected 3 fields in " + vocab_path.string());
      if (parse_int(fields[0], vocab_path) != static_cast<std::int64_t>(words.size()))
        throw FormatError("vocabulary ids must be consecutive in " + vocab_path.string());
      words.push_back(fields[1]);
      anchor_counts.push_back(parse_int(fields[2], vocab_path));
    }
  }
  if (static_cast<WordId>(words.size()) != vocab_size)
    throw FormatError("vocab.csv row count does not match metadata vocab_size");
  Vocabulary vocab(std::move(words), std::move(anchor_counts));
  if (vocab.total_anchors() != total_anchors)
    throw FormatError("anchor counts do not sum to metadata total_anchors");

  const fs::path pairs_path = dir / "pairs.csv";
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(vocab_size) + 1, 0);
  std::vector<WordId> pair_word;
  std::vector<Count> pair_counts;
  {
    auto f = open_in(pairs_path);
    if (read_line_or_throw(f, pairs_path) != "center_id,word_id,count")
      throw FormatError("unexpected header in " + pairs_path.string());
    std::string line;
    WordId prev_center = 0;
    while (std::getline(f, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto fields = parse_csv_row(line, pairs_path);
      if (fields.size() != 3) throw FormatError("expected 3 fields in " + pairs_path.string());
      const auto center = static_cast<WordId>(parse_int(fields[0], pairs_path));
      if (center < 0 || center >= vocab_size)
        throw FormatError("center id out of range in " + pairs_path.string());
      if (center < prev_center)
        throw FormatError("pairs.csv must be sorted by center id");
      prev_center = center;
      pair_word.push_back(static_cast<WordId>(parse_int(fields[1], pairs_path)));
      pair_counts.push_back(parse_int(fields[2], pairs_path));
      offsets[static_cast<std::size_t>(center) + 1] += 1;
    }
    for (WordId c = 0; c < vocab_size; ++c)
      offsets[static_cast<std::size_t>(c) + 1] += offsets[static_cast<std::size_t>(c)];
  }

  StoreData out{assemble_counts(std::move(vocab), config, std::move(offsets),
                                std::move(pair_word), std::move(pair_counts)),
                {},
                tokenizer};

  const fs::path tokens_path = dir / "tokens.u32";
  {
    auto f = open_in(tokens_path);
    f.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::int64_t>(f.tellg());
    f.seekg(0);
    if (bytes % 4 != 0) throw FormatError(tokens_path.string() + " is not a uint32 sequence");
    if (bytes / 4 != total_anchors)
      throw FormatError(tokens_path.string() + " length does not match total_anchors");
    std::vector<unsigned char> buf(static_cast<std::size_t>(bytes));
    f.read(reinterpret_cast<char*>(buf.data()), bytes);
    if (!f) throw IoError("short read from " + tokens_path.string());
    out.tokens.resize(static_cast<std::size_t>(total_anchors));
    for (std::size_t i = 0; i < out.tokens.size(); ++i) {
      const std::uint32_t u = static_cast<std::uint32_t>(buf[4 * i]) |
                              (static_cast<std::uint32_t>(buf[4 * i + 1]) << 8) |
                              (static_cast<std::uint32_t>(buf[4 * i + 2]) << 16) |
                              (static_cast<std::uint32_t>(buf[4 * i + 3]) << 24);
      const auto id = static_cast<WordId>(u);
      if (id < 0 || id >= vocab_size)
        throw FormatError("token id out of range in " + tokens_path.string());
      out.tokens[i] = id;
    }
  }
  return out;
}

}  // namespace pmikit
