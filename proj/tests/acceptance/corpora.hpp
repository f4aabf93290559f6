#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace acceptance {

// Deterministic stand-in for a natural corpus: Zipf-weighted function words,
// topic documents with bursty word reuse, and four subject words (man, woman,
// king, queen) whose contexts overlap pairwise so that
//   king - man + woman ~ queen
// holds by construction: king and queen share royal contexts, man and woman
// share person contexts, and the male/female context cohorts pair them up
// across the two document types. Vocabulary exceeds 10k distinct tokens.
std::vector<std::string> natural_stand_in(std::size_t n_tokens, std::uint64_t seed);

}  // namespace acceptance
