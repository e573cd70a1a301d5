#include "stylo/dataset.h"

#include <algorithm>
#include <set>

#include "format_util.h"
#include "io_util.h"
#include "stylo/error.h"

namespace stylo {
namespace {

constexpr std::string_view kMatrixTag = "# stylo feature-matrix v";

void check_field(std::string_view value, std::string_view what) {
  if (value.find_first_of("\t\n\r") != std::string_view::npos) {
    throw IoError(std::string(what) + " '" + std::string(value) +
                  "' contains a tab or line break");
  }
}

[[noreturn]] void bad_matrix(std::size_t line, const std::string& message) {
  throw IoError("feature matrix line " + std::to_string(line) + ": " + message);
}

}  // namespace

std::string_view to_string(DatasetFilter filter) {
  switch (filter) {
    case DatasetFilter::kAbstracts:
      return "abstracts";
    case DatasetFilter::kIntroductions:
      return "introductions";
    case DatasetFilter::kCombined:
      return "combined";
  }
  return "combined";
}

std::optional<DatasetFilter> parse_filter(std::string_view name) {
  if (name == "abstracts") return DatasetFilter::kAbstracts;
  if (name == "introductions") return DatasetFilter::kIntroductions;
  if (name == "combined") return DatasetFilter::kCombined;
  return std::nullopt;
}

bool admits(DatasetFilter filter, Section section) {
  switch (filter) {
    case DatasetFilter::kAbstracts:
      return section == Section::kAbstract;
    case DatasetFilter::kIntroductions:
      return section == Section::kIntroduction;
    case DatasetFilter::kCombined:
      return true;
  }
  return false;
}

DocumentMeta meta_of(const Document& doc) {
  return {doc.id, doc.branch, doc.section, doc.source};
}

std::vector<Feature> matrix_columns(DatasetFilter filter) {
  std::vector<Feature> columns(kAllFeatures.begin(), kAllFeatures.end());
  if (filter == DatasetFilter::kAbstracts) columns.pop_back();
  return columns;
}

std::string format_feature_matrix(const FeatureMatrix& matrix) {
  const auto columns = matrix_columns(matrix.filter);
  std::string out;
  out += kMatrixTag;
  out += std::to_string(kFeatureMatrixSchemaVersion);
  out += " filter=";
  out += to_string(matrix.filter);
  out += "\nid\tbranch\tsection\tsource";
  for (const Feature f : columns) {
    out += '\t';
    out += feature_name(f);
  }
  out += '\n';
  for (const auto& record : matrix.records) {
    check_field(record.meta.id, "document id");
    out += record.meta.id;
    out += '\t';
    out += to_string(record.meta.branch);
    out += '\t';
    out += to_string(record.meta.section);
    out += '\t';
    out += to_string(record.meta.source);
    for (const Feature f : columns) {
      out += '\t';
      const auto v = record.features.get(f);
      if (v) {
        out += format_double(*v);
      } else if (f != Feature::kParagraphSimilarity) {
        throw IoError("document '" + record.meta.id + "' lacks feature " +
                      std::string(feature_name(f)));
      }
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix parse_feature_matrix(std::string_view content) {
  const auto lines = split_lines(content);
  if (lines.empty() || !lines[0].starts_with(kMatrixTag)) {
    throw IoError("feature matrix: missing '" + std::string(kMatrixTag) +
                  "' header comment");
  }
  FeatureMatrix matrix;
  {
    const std::string_view rest = lines[0].substr(kMatrixTag.size());
    const auto parts = split(rest, ' ');
    if (parts[0] != std::to_string(kFeatureMatrixSchemaVersion)) {
      bad_matrix(1, "unsupported schema version '" + std::string(parts[0]) + "'");
    }
    bool have_filter = false;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (parts[i].starts_with("filter=")) {
        const auto filter = parse_filter(parts[i].substr(7));
        if (!filter) bad_matrix(1, "unknown filter");
        matrix.filter = *filter;
        have_filter = true;
      }
    }
    if (!have_filter) bad_matrix(1, "header comment lacks filter=");
  }
  if (lines.size() < 2) bad_matrix(2, "missing column header");

  const auto header = split(lines[1], '\t');
  if (header.size() < 4 || header[0] != "id" || header[1] != "branch" ||
      header[2] != "section" || header[3] != "source") {
    bad_matrix(2, "expected id, branch, section, source columns first");
  }
  std::vector<Feature> columns;
  for (std::size_t i = 4; i < header.size(); ++i) {
    const auto f = parse_feature(header[i]);
    if (!f) bad_matrix(2, "unknown feature column '" + std::string(header[i]) + "'");
    columns.push_back(*f);
  }

  std::set<std::string, std::less<>> seen;
  for (std::size_t l = 2; l < lines.size(); ++l) {
    if (lines[l].empty()) continue;
    const std::size_t line_no = l + 1;
    const auto fields = split(lines[l], '\t');
    if (fields.size() != header.size()) {
      bad_matrix(line_no, "expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(fields.size()));
    }
    FeatureRecord record;
    record.meta.id = std::string(fields[0]);
    if (!seen.insert(record.meta.id).second) {
      bad_matrix(line_no, "duplicate id '" + record.meta.id + "'");
    }
    const auto branch = parse_branch(fields[1]);
    const auto section = parse_section(fields[2]);
    const auto source = parse_source(fields[3]);
    if (!branch) bad_matrix(line_no, "unknown branch");
    if (!section) bad_matrix(line_no, "unknown section");
    if (!source) bad_matrix(line_no, "unknown source");
    record.meta.branch = *branch;
    record.meta.section = *section;
    record.meta.source = *source;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string_view field = fields[4 + c];
      if (field.empty()) {
        if (columns[c] != Feature::kParagraphSimilarity) {
          bad_matrix(line_no, "empty value for " +
                                  std::string(feature_name(columns[c])));
        }
        continue;
      }
      const auto value = parse_double(field);
      if (!value) {
        bad_matrix(line_no, "bad number '" + std::string(field) + "' for " +
                                std::string(feature_name(columns[c])));
      }
      record.features.set(columns[c], *value);
    }
    matrix.records.push_back(std::move(record));
  }
  return matrix;
}

void write_feature_matrix(const FeatureMatrix& matrix,
                          const std::filesystem::path& path) {
  write_text_file(path, format_feature_matrix(matrix));
}

FeatureMatrix read_feature_matrix(const std::filesystem::path& path) {
  return parse_feature_matrix(read_text_file(path));
}

std::vector<Feature> active_features(DatasetFilter filter,
                                     std::span<const FeatureRecord> records) {
  std::vector<Feature> features(kAllFeatures.begin(), kAllFeatures.end());
  bool keep_paragraph_similarity = filter == DatasetFilter::kIntroductions;
  for (const auto& r : records) {
    if (!admits(filter, r.meta.section)) continue;
    if (!r.features.get(Feature::kParagraphSimilarity)) {
      keep_paragraph_similarity = false;
    }
  }
  if (!keep_paragraph_similarity) features.pop_back();
  return features;
}

Dataset::Dataset(std::vector<Feature> features, std::vector<double> values,
                 std::vector<DocumentMeta> meta)
    : features_(std::move(features)),
      values_(std::move(values)),
      meta_(std::move(meta)) {
  if (values_.size() != features_.size() * meta_.size()) {
    throw PreconditionError("dataset: matrix size does not match rows x cols");
  }
}

std::size_t Dataset::count(Source source) const {
  return static_cast<std::size_t>(std::count_if(
      meta_.begin(), meta_.end(),
      [source](const DocumentMeta& m) { return m.source == source; }));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> values;
  values.reserve(indices.size() * cols());
  std::vector<DocumentMeta> meta;
  meta.reserve(indices.size());
  for (const std::size_t i : indices) {
    if (i >= rows()) throw PreconditionError("dataset: row index out of range");
    const auto r = row(i);
    values.insert(values.end(), r.begin(), r.end());
    meta.push_back(meta_[i]);
  }
  return Dataset(features_, std::move(values), std::move(meta));
}

Dataset Dataset::with_inverted_labels() const {
  Dataset flipped = *this;
  for (auto& m : flipped.meta_) {
    m.source = m.source == Source::kGpt ? Source::kHuman : Source::kGpt;
  }
  return flipped;
}

Dataset make_dataset(std::span<const FeatureRecord> records,
                     DatasetFilter filter) {
  const auto features = active_features(filter, records);
  std::vector<double> values;
  std::vector<DocumentMeta> meta;
  for (const auto& r : records) {
    if (!admits(filter, r.meta.section)) continue;
    for (const Feature f : features) values.push_back(r.features.at(f));
    meta.push_back(r.meta);
  }
  return Dataset(features, std::move(values), std::move(meta));
}

}  // namespace stylo
