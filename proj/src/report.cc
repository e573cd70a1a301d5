#include "stylo/report.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "format_util.h"
#include "io_util.h"
#include "stylo/error.h"

namespace stylo {
namespace {

std::string header(std::string_view kind) {
  return "# stylo " + std::string(kind) + " v" +
         std::to_string(kReportSchemaVersion);
}

std::string header(std::string_view kind, DatasetFilter filter) {
  return header(kind) + " filter=" + std::string(to_string(filter));
}

double sample_sd(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (const double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

// Reads "# stylo <kind> v1[ key=value...]" and returns the key/value pairs.
std::map<std::string, std::string, std::less<>> read_tag(
    std::string_view line, std::string_view kind) {
  const std::string expected = header(kind);
  if (!line.starts_with(expected)) {
    throw IoError(std::string(kind) + " file: missing '" + expected + "' header");
  }
  std::map<std::string, std::string, std::less<>> tags;
  for (const auto field : split(line.substr(expected.size()), ' ')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) continue;
    tags.emplace(std::string(field.substr(0, eq)), std::string(field.substr(eq + 1)));
  }
  return tags;
}

DatasetFilter tag_filter(const std::map<std::string, std::string, std::less<>>& tags,
                         std::string_view kind) {
  const auto it = tags.find("filter");
  const auto filter =
      it == tags.end() ? std::nullopt : parse_filter(it->second);
  if (!filter) throw IoError(std::string(kind) + " file: missing or bad filter");
  return *filter;
}

[[noreturn]] void bad_row(std::string_view kind, std::size_t line,
                          const std::string& message) {
  throw IoError(std::string(kind) + " file line " + std::to_string(line) + ": " +
                message);
}

double number(std::string_view kind, std::size_t line, std::string_view text) {
  const auto v = parse_double(text);
  if (!v) bad_row(kind, line, "bad number '" + std::string(text) + "'");
  return *v;
}

std::size_t count(std::string_view kind, std::size_t line, std::string_view text) {
  std::size_t v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    bad_row(kind, line, "bad count '" + std::string(text) + "'");
  }
  return v;
}

std::size_t filter_rank(DatasetFilter f) {
  switch (f) {
    case DatasetFilter::kAbstracts:
      return 0;
    case DatasetFilter::kIntroductions:
      return 1;
    case DatasetFilter::kCombined:
      return 2;
  }
  return 3;
}

template <typename Enum>
Enum parse_or_throw(std::optional<Enum> value, std::string_view kind,
                    std::size_t line, std::string_view what) {
  if (!value) bad_row(kind, line, "bad " + std::string(what));
  return *value;
}

}  // namespace

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw PreconditionError("bandwidth needs 2+ values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = sample_sd(sorted);
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

Kde kde(std::span<const double> values) {
  if (values.size() < 2) {
    throw PreconditionError("density needs at least 2 values");
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) {
    throw PreconditionError("all values equal " + format_double(lo) +
                            "; report a point mass instead of a density");
  }
  Kde out;
  out.bandwidth = silverman_bandwidth(values);
  const double h = out.bandwidth;
  const double start = lo - 3.0 * h;
  const double step = (hi - lo + 6.0 * h) / static_cast<double>(kKdeGridPoints - 1);
  out.grid.resize(kKdeGridPoints);
  out.density.assign(kKdeGridPoints, 0.0);
  const double norm = 1.0 / (static_cast<double>(values.size()) * h *
                             std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < kKdeGridPoints; ++g) {
    const double x = start + step * static_cast<double>(g);
    out.grid[g] = x;
    double sum = 0.0;
    for (const double v : values) {
      const double z = (x - v) / h;
      sum += std::exp(-0.5 * z * z);
    }
    out.density[g] = sum * norm;
  }
  const double area = trapezoid(out.grid, out.density);
  for (double& d : out.density) d /= area;
  return out;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("trapezoid: size mismatch");
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    area += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  }
  return area;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw PreconditionError("quantile of an empty list");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("box stats need at least 1 value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  BoxStats s;
  s.count = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = std::clamp(quantile(sorted, 0.25), s.min, s.max);
  s.median = std::clamp(quantile(sorted, 0.5), s.q1, s.max);
  s.q3 = std::clamp(quantile(sorted, 0.75), s.median, s.max);
  const double iqr = s.q3 - s.q1;
  const double low_fence = s.q1 - 1.5 * iqr;
  const double high_fence = s.q3 + 1.5 * iqr;
  s.whisker_low = s.max;
  s.whisker_high = s.min;
  for (const double v : sorted) {
    if (v < low_fence || v > high_fence) {
      s.outliers.push_back(v);
    } else {
      s.whisker_low = std::min(s.whisker_low, v);
      s.whisker_high = std::max(s.whisker_high, v);
    }
  }
  return s;
}

std::vector<DensitySeries> density_series(const FeatureMatrix& matrix,
                                          std::vector<std::string>& notices) {
  std::vector<DensitySeries> out;
  for (const Feature f : matrix_columns(matrix.filter)) {
    std::map<std::pair<Source, Section>, std::vector<double>> groups;
    for (const auto& r : matrix.records) {
      if (const auto v = r.features.get(f)) {
        groups[{r.meta.source, r.meta.section}].push_back(*v);
      }
    }
    for (const auto& [key, values] : groups) {
      const std::set<double> distinct(values.begin(), values.end());
      if (distinct.size() < 2) {
        notices.push_back("density " + std::string(feature_name(f)) + " " +
                          std::string(to_string(key.first)) + "/" +
                          std::string(to_string(key.second)) +
                          " skipped: fewer than 2 distinct values");
        continue;
      }
      out.push_back({f, key.first, key.second, kde(values)});
    }
  }
  return out;
}

std::vector<BoxSeries> box_series(const FeatureMatrix& matrix) {
  std::vector<BoxSeries> out;
  for (const Feature f : matrix_columns(matrix.filter)) {
    std::map<std::tuple<Source, Section, Branch>, std::vector<double>> groups;
    for (const auto& r : matrix.records) {
      if (const auto v = r.features.get(f)) {
        groups[{r.meta.source, r.meta.section, r.meta.branch}].push_back(*v);
      }
    }
    for (const auto& [key, values] : groups) {
      out.push_back({f, std::get<0>(key), std::get<1>(key), std::get<2>(key),
                     box_stats(values)});
    }
  }
  return out;
}

void upsert(std::vector<AccuracyRow>& rows, const AccuracyRow& row) {
  std::erase_if(rows, [&](const AccuracyRow& r) { return r.filter == row.filter; });
  rows.push_back(row);
  std::sort(rows.begin(), rows.end(), [](const AccuracyRow& a, const AccuracyRow& b) {
    return filter_rank(a.filter) < filter_rank(b.filter);
  });
}

Dataset ExplainedSet::instances() const {
  std::vector<DocumentMeta> meta;
  meta.reserve(attributions.size());
  for (const auto& a : attributions) meta.push_back({a.instance_id, {}, {}, {}});
  return Dataset(features, values, std::move(meta));
}

std::string format_density(std::span<const DensitySeries> series) {
  std::string out = header("density") +
                    "\nfeature\tsource\tsection\tbandwidth\tx\tdensity\n";
  for (const auto& s : series) {
    const std::string prefix = std::string(feature_name(s.feature)) + '\t' +
                               std::string(to_string(s.source)) + '\t' +
                               std::string(to_string(s.section)) + '\t' +
                               format_double(s.kde.bandwidth) + '\t';
    for (std::size_t i = 0; i < s.kde.grid.size(); ++i) {
      out += prefix + format_double(s.kde.grid[i]) + '\t' +
             format_double(s.kde.density[i]) + '\n';
    }
  }
  return out;
}

std::string format_boxplot(std::span<const BoxSeries> series) {
  std::string out = header("boxplot") +
                    "\nfeature\tsource\tsection\tbranch\tn\tmin\tq1\tmedian\tq3\tmax"
                    "\twhisker_low\twhisker_high\toutliers\n";
  for (const auto& s : series) {
    const BoxStats& b = s.stats;
    out += std::string(feature_name(s.feature)) + '\t' +
           std::string(to_string(s.source)) + '\t' +
           std::string(to_string(s.section)) + '\t' +
           std::string(to_string(s.branch)) + '\t' + std::to_string(b.count);
    for (const double v : {b.min, b.q1, b.median, b.q3, b.max, b.whisker_low,
                           b.whisker_high}) {
      out += '\t' + format_double(v);
    }
    out += '\t';
    for (std::size_t i = 0; i < b.outliers.size(); ++i) {
      if (i) out += ',';
      out += format_double(b.outliers[i]);
    }
    out += '\n';
  }
  return out;
}

std::string format_accuracy(std::span<const AccuracyRow> rows) {
  std::string out = header("accuracy") + "\ndataset\tn_train\tn_test\taccuracy\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.filter)) + '\t' + std::to_string(r.n_train) +
           '\t' + std::to_string(r.n_test) + '\t' + format_double(r.accuracy) + '\n';
  }
  return out;
}

std::vector<AccuracyRow> parse_accuracy(std::string_view content) {
  constexpr std::string_view kind = "accuracy";
  const auto lines = split_lines(content);
  if (lines.size() < 2) throw IoError("accuracy file: missing header");
  read_tag(lines[0], kind);
  std::vector<AccuracyRow> rows;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], '\t');
    if (f.size() != 4) bad_row(kind, i + 1, "expected 4 fields");
    AccuracyRow row;
    row.filter = parse_or_throw(parse_filter(f[0]), kind, i + 1, "dataset");
    row.n_train = count(kind, i + 1, f[1]);
    row.n_test = count(kind, i + 1, f[2]);
    row.accuracy = number(kind, i + 1, f[3]);
    upsert(rows, row);
  }
  return rows;
}

std::string format_attributions(const ExplainedSet& set) {
  const std::size_t n = set.features.size();
  if (set.values.size() != set.attributions.size() * n) {
    throw PreconditionError("attribution values do not match rows x features");
  }
  std::string out = header("attributions", set.filter) + "\nid\tbase_value\tprediction";
  for (const Feature f : set.features) out += "\tphi:" + std::string(feature_name(f));
  for (const Feature f : set.features) out += "\tvalue:" + std::string(feature_name(f));
  out += '\n';
  for (std::size_t r = 0; r < set.attributions.size(); ++r) {
    const Attribution& a = set.attributions[r];
    if (a.per_feature.size() != n) {
      throw PreconditionError("attribution width does not match features");
    }
    out += a.instance_id + '\t' + format_double(a.base_value) + '\t' +
           format_double(a.prediction);
    for (const double phi : a.per_feature) out += '\t' + format_double(phi);
    for (std::size_t c = 0; c < n; ++c) {
      out += '\t' + format_double(set.values[r * n + c]);
    }
    out += '\n';
  }
  return out;
}

ExplainedSet parse_attributions(std::string_view content) {
  constexpr std::string_view kind = "attributions";
  const auto lines = split_lines(content);
  if (lines.size() < 2) throw IoError("attributions file: missing header");
  ExplainedSet set;
  set.filter = tag_filter(read_tag(lines[0], kind), kind);
  const auto head = split(lines[1], '\t');
  if (head.size() < 3 || (head.size() - 3) % 2 != 0) {
    bad_row(kind, 2, "malformed header");
  }
  const std::size_t n = (head.size() - 3) / 2;
  for (std::size_t c = 0; c < n; ++c) {
    const auto name = head[3 + c];
    if (!name.starts_with("phi:")) bad_row(kind, 2, "expected phi column");
    set.features.push_back(
        parse_or_throw(parse_feature(name.substr(4)), kind, 2, "feature name"));
  }
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], '\t');
    if (f.size() != head.size()) bad_row(kind, i + 1, "wrong field count");
    Attribution a;
    a.instance_id = std::string(f[0]);
    a.base_value = number(kind, i + 1, f[1]);
    a.prediction = number(kind, i + 1, f[2]);
    for (std::size_t c = 0; c < n; ++c) {
      a.per_feature.push_back(number(kind, i + 1, f[3 + c]));
    }
    for (std::size_t c = 0; c < n; ++c) {
      set.values.push_back(number(kind, i + 1, f[3 + n + c]));
    }
    set.attributions.push_back(std::move(a));
  }
  return set;
}

std::string format_importance(const ImportanceSummary& summary) {
  std::string out = header("importance") + "\nrank\tfeature\tmean_abs_phi\n";
  for (const auto& item : summary.ranked) {
    out += std::to_string(item.rank) + '\t' + std::string(feature_name(item.feature)) +
           '\t' + format_double(item.mean_abs) + '\n';
  }
  return out;
}

std::string format_importance_points(const ImportanceSummary& summary,
                                     const ExplainedSet& set) {
  std::string out = header("importance-points") + "\nfeature\tid\tphi\tvalue\n";
  for (const auto& item : summary.ranked) {
    for (std::size_t r = 0; r < item.points.size(); ++r) {
      out += std::string(feature_name(item.feature)) + '\t' +
             set.attributions[r].instance_id + '\t' +
             format_double(item.points[r].first) + '\t' +
             format_double(item.points[r].second) + '\n';
    }
  }
  return out;
}

std::string format_projection(const ProjectionTable& table) {
  if (table.meta.size() != table.projection.points.size()) {
    throw PreconditionError("projection rows do not match metadata");
  }
  std::string out = header("projection", table.filter) + " perplexity=" +
                    format_double(table.projection.perplexity) +
                    "\nid\tx\ty\tsource\tsection\tbranch\n";
  for (std::size_t i = 0; i < table.meta.size(); ++i) {
    const DocumentMeta& m = table.meta[i];
    out += m.id + '\t' + format_double(table.projection.points[i][0]) + '\t' +
           format_double(table.projection.points[i][1]) + '\t' +
           std::string(to_string(m.source)) + '\t' +
           std::string(to_string(m.section)) + '\t' +
           std::string(to_string(m.branch)) + '\n';
  }
  return out;
}

ProjectionTable parse_projection(std::string_view content) {
  constexpr std::string_view kind = "projection";
  const auto lines = split_lines(content);
  if (lines.size() < 2) throw IoError("projection file: missing header");
  const auto tags = read_tag(lines[0], kind);
  ProjectionTable table;
  table.filter = tag_filter(tags, kind);
  if (const auto it = tags.find("perplexity"); it != tags.end()) {
    table.projection.perplexity = number(kind, 1, it->second);
  }
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], '\t');
    if (f.size() != 6) bad_row(kind, i + 1, "expected 6 fields");
    DocumentMeta m;
    m.id = std::string(f[0]);
    m.source = parse_or_throw(parse_source(f[3]), kind, i + 1, "source");
    m.section = parse_or_throw(parse_section(f[4]), kind, i + 1, "section");
    m.branch = parse_or_throw(parse_branch(f[5]), kind, i + 1, "branch");
    table.projection.points.push_back(
        {number(kind, i + 1, f[1]), number(kind, i + 1, f[2])});
    table.meta.push_back(std::move(m));
  }
  return table;
}

std::string format_kl_trace(const Projection& projection) {
  std::string out = header("kl-trace") + "\niteration\tkl\n";
  for (std::size_t i = 0; i < projection.kl_trace.size(); ++i) {
    out += std::to_string(i + 1) + '\t' + format_double(projection.kl_trace[i]) + '\n';
  }
  return out;
}

std::vector<double> parse_kl_trace(std::string_view content) {
  constexpr std::string_view kind = "kl-trace";
  const auto lines = split_lines(content);
  if (lines.size() < 2) throw IoError("kl-trace file: missing header");
  read_tag(lines[0], kind);
  std::vector<double> trace;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], '\t');
    if (f.size() != 2) bad_row(kind, i + 1, "expected 2 fields");
    trace.push_back(number(kind, i + 1, f[1]));
  }
  return trace;
}

ReportOutcome emit_report(const ReportInputs& inputs,
                          const std::filesystem::path& out_dir) {
  std::vector<std::string> missing;
  if (!inputs.features) missing.emplace_back("feature matrix");
  if (inputs.accuracy.empty()) missing.emplace_back("accuracy results");
  if (!inputs.projection) missing.emplace_back("projection");
  if (!missing.empty()) {
    std::string message = "report inputs missing:";
    for (const auto& m : missing) message += " " + m + ";";
    message.pop_back();
    throw PreconditionError(message);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  }
  ReportOutcome outcome;
  auto emit = [&](std::string_view name, const std::string& content) {
    const auto path = out_dir / name;
    write_text_file(path, content);
    outcome.written.push_back(path);
  };

  emit(report_files::kFeatures, format_feature_matrix(*inputs.features));
  const auto densities = density_series(*inputs.features, outcome.notices);
  emit(report_files::kDensity, format_density(densities));
  emit(report_files::kBoxplot, format_boxplot(box_series(*inputs.features)));
  emit(report_files::kAccuracy, format_accuracy(inputs.accuracy));

  if (inputs.explained && !inputs.explained->attributions.empty()) {
    const ExplainedSet& set = *inputs.explained;
    const auto summary = summarize(set.attributions, set.instances());
    emit(report_files::kAttributions, format_attributions(set));
    emit(report_files::kImportance, format_importance(summary));
    emit(report_files::kImportancePoints, format_importance_points(summary, set));
  } else {
    std::filesystem::remove(out_dir / report_files::kImportance, ec);
    std::filesystem::remove(out_dir / report_files::kImportancePoints, ec);
    outcome.notices.emplace_back(
        "no attributions; importance summary omitted");
  }

  emit(report_files::kProjection, format_projection(*inputs.projection));
  emit(report_files::kKlTrace, format_kl_trace(inputs.projection->projection));
  return outcome;
}

}  // namespace stylo
