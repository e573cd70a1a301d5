#include "stylo/embed.h"

#include <algorithm>
#include <cmath>

#include "stylo/error.h"
#include "stylo/segment.h"

namespace stylo {

std::uint64_t builtin_token_hash(std::string_view token) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ kBuiltinSeed;
  for (const char c : token) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

std::size_t builtin_bucket(std::string_view token) {
  return static_cast<std::size_t>(builtin_token_hash(token) % kBuiltinDim);
}

std::vector<EmbeddingVector> builtin_embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto tokens = tokenize_words(texts[i]);
    if (tokens.empty()) {
      throw PreconditionError("cannot embed text " + std::to_string(i) +
                              ": no word tokens");
    }
    EmbeddingVector v;
    v.provider_id = std::string(kBuiltinProviderId);
    v.values.assign(kBuiltinDim, 0.0);
    for (const auto& t : tokens) v.values[builtin_bucket(t)] += 1.0;
    double norm = 0.0;
    for (const double x : v.values) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v.values) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw PreconditionError("cosine: dimension mismatch (" +
                            std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()) + ")");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw PreconditionError("cosine: zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double title_similarity(std::span<const EmbeddingVector> paragraphs,
                        const EmbeddingVector& title) {
  if (paragraphs.empty()) {
    throw PreconditionError("title_similarity needs at least one paragraph");
  }
  double sum = 0.0;
  for (const auto& p : paragraphs) sum += cosine(p, title);
  return sum / static_cast<double>(paragraphs.size());
}

std::optional<double> paragraph_similarity(
    std::span<const EmbeddingVector> paragraphs) {
  if (paragraphs.size() < 2) return std::nullopt;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    for (std::size_t j = i + 1; j < paragraphs.size(); ++j) {
      sum += cosine(paragraphs[i], paragraphs[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

}  // namespace stylo
