#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stylo/corpus.h"

namespace stylo {

struct SynthConfig {
  std::uint64_t seed = 0;
  // Each title yields a human and a gpt abstract and introduction.
  std::size_t titles = 50;
};

// Two style profiles over pseudo-word vocabularies.
//   gpt:   paragraphs of 2-3 sentences, longer words (~6.3 letters), more
//          commas, more reuse of title words, narrower vocabulary.
//   human: one-paragraph abstracts, introductions of 6-7 paragraphs with 4-8
//          sentences each, shorter words (~5.5 letters), broader vocabulary,
//          occasional citations.
// Everything apart from paragraph shape carries per-document jitter, so the
// classes overlap on those features.
std::vector<Document> synthesize(const SynthConfig& config);

}  // namespace stylo
