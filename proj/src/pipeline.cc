#include "stylo/pipeline.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "stylo/error.h"
#include "stylo/remote_embed.h"

namespace stylo {
namespace {

void check_trainable(DatasetFilter matrix_filter, DatasetFilter filter) {
  if (matrix_filter != DatasetFilter::kCombined && matrix_filter != filter) {
    throw PreconditionError("feature matrix was extracted with filter '" +
                            std::string(to_string(matrix_filter)) +
                            "' and cannot serve filter '" +
                            std::string(to_string(filter)) + "'");
  }
}

std::vector<std::string> ids_of(const Dataset& d, std::span<const std::size_t> rows) {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (const std::size_t r : rows) ids.push_back(d.id(r));
  return ids;
}

}  // namespace

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config) {
  if (config.kind == ProviderKind::kBuiltin) {
    return std::make_unique<BuiltinEmbedder>();
  }
  if (config.endpoint.empty()) {
    throw PreconditionError("remote provider needs an endpoint");
  }
  RemoteEmbedderOptions options;
  options.endpoint = config.endpoint;
  return std::make_unique<RemoteEmbedder>(options);
}

std::vector<Document> preprocess(std::vector<Document> documents,
                                 std::size_t max_paragraphs) {
  for (auto& doc : documents) {
    if (doc.source != Source::kHuman) continue;
    doc.text = strip_citations(doc.text);
    if (doc.section == Section::kIntroduction) {
      doc = truncate_paragraphs(doc, max_paragraphs);
    }
  }
  return documents;
}

FeatureMatrix extract_matrix(const std::vector<Document>& documents,
                             DatasetFilter filter,
                             const EmbeddingProvider& provider,
                             const Lexicons& lexicons, std::size_t threads) {
  std::vector<const Document*> admitted;
  for (const auto& doc : documents) {
    if (admits(filter, doc.section)) admitted.push_back(&doc);
  }
  FeatureMatrix matrix;
  matrix.filter = filter;
  matrix.records.resize(admitted.size());

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = admitted.size();
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < admitted.size(); i = next.fetch_add(1)) {
      try {
        const Document& doc = *admitted[i];
        matrix.records[i] = {meta_of(doc), extract_all(doc, provider, lexicons)};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(admitted.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return matrix;
}

TrainOutcome train_model(const FeatureMatrix& matrix, DatasetFilter filter,
                         const ForestParams& params, std::uint64_t seed,
                         double test_fraction) {
  check_trainable(matrix.filter, filter);
  const Dataset data = make_dataset(matrix.records, filter);
  const SplitIndices split = stratified_split(data, test_fraction, seed);
  const Dataset train = data.subset(split.train);
  const Dataset test = data.subset(split.test);

  TrainOutcome out;
  out.forest = fit(train, params, seed);
  out.forest.filter = filter;
  out.forest.split.test_fraction = test_fraction;
  out.forest.split.seed = seed;
  out.forest.split.train_ids = ids_of(data, split.train);
  out.forest.split.test_ids = ids_of(data, split.test);
  out.accuracy = {filter, train.rows(), test.rows(), accuracy(out.forest, test)};
  return out;
}

std::pair<Dataset, Dataset> model_datasets(const TrainedForest& forest,
                                           const FeatureMatrix& matrix) {
  check_trainable(matrix.filter, forest.filter);
  const Dataset data = make_dataset(matrix.records, forest.filter);
  if (data.features() != forest.active_features) {
    throw PreconditionError(
        "feature matrix columns do not match the model's active features");
  }
  std::map<std::string, std::size_t, std::less<>> by_id;
  for (std::size_t i = 0; i < data.rows(); ++i) by_id.emplace(data.id(i), i);
  auto rows_for = [&](const std::vector<std::string>& ids) {
    std::vector<std::size_t> rows;
    rows.reserve(ids.size());
    for (const auto& id : ids) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) {
        throw PreconditionError("model refers to document '" + id +
                                "' which is not in the feature matrix");
      }
      rows.push_back(it->second);
    }
    return rows;
  };
  return {data.subset(rows_for(forest.split.train_ids)),
          data.subset(rows_for(forest.split.test_ids))};
}

ExplainedSet explain_model(const TrainedForest& forest,
                           const FeatureMatrix& matrix, std::size_t threads) {
  const auto [train, test] = model_datasets(forest, matrix);
  const BackgroundSet background = make_background(train, forest.seed);
  ExplainedSet set;
  set.filter = forest.filter;
  set.features = forest.active_features;
  set.attributions = explain_all(forest, test, background, threads);
  set.values = test.values();
  return set;
}

ProjectionTable project_matrix(const FeatureMatrix& matrix,
                               DatasetFilter filter, const TsneConfig& config) {
  check_trainable(matrix.filter, filter);
  const Dataset data = make_dataset(matrix.records, filter);
  ProjectionTable table;
  table.filter = filter;
  table.meta = data.meta();
  table.projection = project(data, config);
  return table;
}

std::filesystem::path model_path(const std::filesystem::path& out_dir,
                                 DatasetFilter filter) {
  return out_dir / ("model_" + std::string(to_string(filter)) + ".json");
}

}  // namespace stylo
