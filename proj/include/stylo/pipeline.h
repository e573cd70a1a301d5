#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "stylo/corpus.h"
#include "stylo/dataset.h"
#include "stylo/embed.h"
#include "stylo/features.h"
#include "stylo/forest.h"
#include "stylo/report.h"
#include "stylo/shapley.h"
#include "stylo/tsne.h"

namespace stylo {

inline constexpr std::size_t kDefaultMaxParagraphs = 5;
inline constexpr double kDefaultTestFraction = 0.3;

enum class ProviderKind { kBuiltin, kRemote };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kBuiltin;
  std::string endpoint;
};

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config);

// Human-written documents lose their citations; human introductions keep
// their first max_paragraphs paragraphs.
std::vector<Document> preprocess(std::vector<Document> documents,
                                 std::size_t max_paragraphs = kDefaultMaxParagraphs);

// Features for every document the filter admits, in corpus order. Documents
// are processed in parallel; the first failing document's error is thrown.
FeatureMatrix extract_matrix(const std::vector<Document>& documents,
                             DatasetFilter filter,
                             const EmbeddingProvider& provider,
                             const Lexicons& lexicons = Lexicons::defaults(),
                             std::size_t threads = 0);

struct TrainOutcome {
  TrainedForest forest;
  AccuracyRow accuracy;
};

// Stratified split, fit on the train part, accuracy on the held-out part.
// A combined matrix can train any filter; other matrices only their own.
TrainOutcome train_model(const FeatureMatrix& matrix, DatasetFilter filter,
                         const ForestParams& params, std::uint64_t seed,
                         double test_fraction = kDefaultTestFraction);

// Rebuilds the model's dataset from the matrix and its recorded split.
// Returns {train, test}.
std::pair<Dataset, Dataset> model_datasets(const TrainedForest& forest,
                                           const FeatureMatrix& matrix);

// Explains the held-out rows against a background drawn from the training
// rows.
ExplainedSet explain_model(const TrainedForest& forest,
                           const FeatureMatrix& matrix, std::size_t threads = 0);

ProjectionTable project_matrix(const FeatureMatrix& matrix,
                               DatasetFilter filter, const TsneConfig& config);

std::filesystem::path model_path(const std::filesystem::path& out_dir,
                                 DatasetFilter filter);

}  // namespace stylo
