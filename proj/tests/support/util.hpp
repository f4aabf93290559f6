#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pmikit/counts.hpp"
#include "pmikit/vocab.hpp"

namespace testutil {

struct BuiltCorpus {
  std::vector<pmikit::WordId> tokens;
  pmikit::EventCounts counts;
};

inline std::vector<std::string> split(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline BuiltCorpus build(const std::vector<std::string>& toks, int radius, int min_count = 1,
                         int threads = 1, int max_vocab = 0) {
  pmikit::Vocabulary vocab = pmikit::build_vocabulary(toks, min_count, max_vocab);
  std::vector<pmikit::WordId> ids = pmikit::encode(toks, vocab);
  pmikit::WindowConfig cfg;
  cfg.window_radius = radius;
  cfg.min_count = min_count;
  pmikit::EventCounts counts = pmikit::count_events(ids, std::move(vocab), cfg, threads);
  return BuiltCorpus{std::move(ids), std::move(counts)};
}

inline BuiltCorpus build(const std::string& text, int radius, int min_count = 1,
                         int threads = 1) {
  return build(split(text), radius, min_count, threads);
}

// Random corpus over tokens w0..w{vocab-1}, uniform or Zipf-ish.
inline std::vector<std::string> random_tokens(std::size_t n, int vocab, std::uint64_t seed,
                                              double zipf_s = 0.0) {
  std::mt19937_64 gen(seed);
  std::vector<double> weights(vocab);
  for (int i = 0; i < vocab; ++i)
    weights[i] = zipf_s > 0.0 ? 1.0 / std::pow(i + 1.0, zipf_s) : 1.0;
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(pick(gen)));
  return out;
}

}  // namespace testutil
