#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/corpus.h"
#include "stylo/features.h"

namespace stylo {

enum class DatasetFilter { kAbstracts, kIntroductions, kCombined };

std::string_view to_string(DatasetFilter filter);
std::optional<DatasetFilter> parse_filter(std::string_view name);
bool admits(DatasetFilter filter, Section section);

struct DocumentMeta {
  std::string id;
  Branch branch = Branch::kOther;
  Section section = Section::kAbstract;
  Source source = Source::kHuman;

  friend bool operator==(const DocumentMeta&, const DocumentMeta&) = default;
};

DocumentMeta meta_of(const Document& doc);

// One row of the feature matrix file.
struct FeatureRecord {
  DocumentMeta meta;
  FeatureVector features;

  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

struct FeatureMatrix {
  DatasetFilter filter = DatasetFilter::kCombined;
  std::vector<FeatureRecord> records;
};

inline constexpr int kFeatureMatrixSchemaVersion = 1;

// Columns written for a filter: all eleven, minus paragraph_similarity for
// abstracts-only matrices.
std::vector<Feature> matrix_columns(DatasetFilter filter);

// Tab-separated: a "# stylo feature-matrix v1 filter=<f>" comment line, a
// header (id, branch, section, source, feature names), then one row per
// document. An absent paragraph_similarity is an empty field.
std::string format_feature_matrix(const FeatureMatrix& matrix);
FeatureMatrix parse_feature_matrix(std::string_view content);
void write_feature_matrix(const FeatureMatrix& matrix,
                          const std::filesystem::path& path);
FeatureMatrix read_feature_matrix(const std::filesystem::path& path);

// Feature columns a model trained under `filter` uses. paragraph_similarity
// is dropped for abstracts and combined data, and whenever any row lacks it.
std::vector<Feature> active_features(DatasetFilter filter,
                                     std::span<const FeatureRecord> records);

// Dense labelled matrix over the active features, row-major.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Feature> features, std::vector<double> values,
          std::vector<DocumentMeta> meta);

  std::size_t rows() const { return meta_.size(); }
  std::size_t cols() const { return features_.size(); }
  const std::vector<Feature>& features() const { return features_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols(), cols()};
  }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * cols() + c];
  }
  Source label(std::size_t i) const { return meta_[i].source; }
  const std::string& id(std::size_t i) const { return meta_[i].id; }
  const DocumentMeta& meta(std::size_t i) const { return meta_[i]; }
  const std::vector<DocumentMeta>& meta() const { return meta_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t count(Source source) const;
  Dataset subset(std::span<const std::size_t> indices) const;
  // Same rows with labels flipped.
  Dataset with_inverted_labels() const;

 private:
  std::vector<Feature> features_;
  std::vector<double> values_;
  std::vector<DocumentMeta> meta_;
};

// Rows whose section the filter admits, columns from active_features().
Dataset make_dataset(std::span<const FeatureRecord> records,
                     DatasetFilter filter);

}  // namespace stylo
