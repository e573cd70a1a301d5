#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylo/dataset.h"
#include "stylo/shapley.h"
#include "stylo/tsne.h"

namespace stylo {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::size_t kKdeGridPoints = 256;

struct Kde {
  std::vector<double> grid;  // strictly increasing
  std::vector<double> density;
  double bandwidth = 0.0;
};

// 0.9 * min(sd, IQR / 1.34) * n^(-1/5), with sd alone when the IQR is 0.
double silverman_bandwidth(std::span<const double> values);

// Gaussian KDE on kKdeGridPoints points over [min - 3h, max + 3h], scaled
// so its trapezoid integral is 1. Needs two distinct values.
Kde kde(std::span<const double> values);

double trapezoid(std::span<const double> x, std::span<const double> y);

// Linear interpolation between order statistics (type 7). `sorted` must be
// ascending and non-empty.
double quantile(std::span<const double> sorted, double q);

struct BoxStats {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  // Most extreme values inside the 1.5 IQR fences.
  double whisker_low = 0.0;
  double whisker_high = 0.0;
  // Ascending.
  std::vector<double> outliers;
};

BoxStats box_stats(std::span<const double> values);

struct DensitySeries {
  Feature feature = Feature::kParagraphSize;
  Source source = Source::kHuman;
  Section section = Section::kAbstract;
  Kde kde;
};

struct BoxSeries {
  Feature feature = Feature::kParagraphSize;
  Source source = Source::kHuman;
  Section section = Section::kAbstract;
  Branch branch = Branch::kOther;
  BoxStats stats;
};

// Groups by (source, section) for densities and (source, section, branch)
// for boxes over the matrix columns. Density groups with fewer than two
// distinct values are skipped and reported in `notices`.
std::vector<DensitySeries> density_series(const FeatureMatrix& matrix,
                                          std::vector<std::string>& notices);
std::vector<BoxSeries> box_series(const FeatureMatrix& matrix);

struct AccuracyRow {
  DatasetFilter filter = DatasetFilter::kCombined;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double accuracy = 0.0;

  friend bool operator==(const AccuracyRow&, const AccuracyRow&) = default;
};

// Replaces the row for the same filter, keeping abstracts, introductions,
// combined order.
void upsert(std::vector<AccuracyRow>& rows, const AccuracyRow& row);

// Attributions for explained rows together with their feature values.
struct ExplainedSet {
  DatasetFilter filter = DatasetFilter::kCombined;
  std::vector<Feature> features;
  std::vector<Attribution> attributions;
  std::vector<double> values;  // row-major, attributions.size() x features

  Dataset instances() const;
};

struct ProjectionTable {
  DatasetFilter filter = DatasetFilter::kCombined;
  std::vector<DocumentMeta> meta;
  Projection projection;
};

std::string format_density(std::span<const DensitySeries> series);
std::string format_boxplot(std::span<const BoxSeries> series);

std::string format_accuracy(std::span<const AccuracyRow> rows);
std::vector<AccuracyRow> parse_accuracy(std::string_view content);

std::string format_attributions(const ExplainedSet& set);
ExplainedSet parse_attributions(std::string_view content);

std::string format_importance(const ImportanceSummary& summary);
// Long form (feature, id, phi, value) for beeswarm plots.
std::string format_importance_points(const ImportanceSummary& summary,
                                     const ExplainedSet& set);

std::string format_projection(const ProjectionTable& table);
ProjectionTable parse_projection(std::string_view content);
std::string format_kl_trace(const Projection& projection);
std::vector<double> parse_kl_trace(std::string_view content);

struct ReportInputs {
  std::optional<FeatureMatrix> features;
  std::vector<AccuracyRow> accuracy;
  std::optional<ExplainedSet> explained;
  std::optional<ProjectionTable> projection;
};

struct ReportOutcome {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> notices;
};

// File names inside a report directory.
namespace report_files {
inline constexpr std::string_view kFeatures = "features.tsv";
inline constexpr std::string_view kDensity = "density.tsv";
inline constexpr std::string_view kBoxplot = "boxplot.tsv";
inline constexpr std::string_view kAccuracy = "accuracy.tsv";
inline constexpr std::string_view kAttributions = "attributions.tsv";
inline constexpr std::string_view kImportance = "importance.tsv";
inline constexpr std::string_view kImportancePoints = "importance_points.tsv";
inline constexpr std::string_view kProjection = "projection.tsv";
inline constexpr std::string_view kKlTrace = "kl_trace.tsv";
}  // namespace report_files

// Writes the full bundle. Features, accuracy rows and a projection are
// required and all missing ones are named in one PreconditionError. Empty
// attributions omit the importance files with a notice.
ReportOutcome emit_report(const ReportInputs& inputs,
                          const std::filesystem::path& out_dir);

}  // namespace stylo
