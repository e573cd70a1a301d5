#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

struct EmbeddingVector {
  std::vector<double> values;
  std::string provider_id;

  std::size_t dim() const { return values.size(); }
};

// Anything that maps texts to fixed-dimension vectors. Implementations return
// one vector per input, in input order, all of the same dimension, and must
// tolerate concurrent calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<EmbeddingVector> embed(
      std::span<const std::string> texts) const = 0;
  virtual std::string provider_id() const = 0;
};

// Feature-hashing bag-of-words embedder. Each lowercase word token is hashed
// with 64-bit FNV-1a (offset basis XOR kBuiltinSeed, prime 0x100000001b3),
// passed through the splitmix64 finalizer, and counted in bucket
// hash % kBuiltinDim. The count vector is L2-normalized.
inline constexpr std::size_t kBuiltinDim = 256;
inline constexpr std::uint64_t kBuiltinSeed = 0x5354594c4f454d42ULL;  // "STYLOEMB"
inline constexpr std::string_view kBuiltinProviderId = "builtin-fnv1a-256";

std::uint64_t builtin_token_hash(std::string_view token);
std::size_t builtin_bucket(std::string_view token);

// Throws PreconditionError for a text without word tokens.
std::vector<EmbeddingVector> builtin_embed(std::span<const std::string> texts);

class BuiltinEmbedder final : public EmbeddingProvider {
 public:
  std::vector<EmbeddingVector> embed(
      std::span<const std::string> texts) const override {
    return builtin_embed(texts);
  }
  std::string provider_id() const override {
    return std::string(kBuiltinProviderId);
  }
};

// Cosine similarity clamped to [-1, 1]. Throws PreconditionError on a
// dimension mismatch or a zero vector.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// Mean cosine of each paragraph vector to the title vector.
double title_similarity(std::span<const EmbeddingVector> paragraphs,
                        const EmbeddingVector& title);

// Mean cosine over unordered pairs; nullopt for fewer than two vectors.
std::optional<double> paragraph_similarity(
    std::span<const EmbeddingVector> paragraphs);

}  // namespace stylo
