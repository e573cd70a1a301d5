// stylo: stylometric comparison of human and GPT written text.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "stylo/corpus.h"
#include "stylo/dataset.h"
#include "stylo/error.h"
#include "stylo/pipeline.h"
#include "stylo/report.h"
#include "stylo/synth.h"

namespace fs = std::filesystem;
using namespace stylo;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitProvider = 2;

struct RunConfig {
  std::string corpus;
  std::string filter = "combined";
  std::string provider = "builtin";
  std::string endpoint;
  std::uint64_t seed = 0;
  double test_fraction = kDefaultTestFraction;
  std::string out = "stylo-out";
  std::size_t trees = 100;
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  std::size_t max_paragraphs = kDefaultMaxParagraphs;
  std::size_t titles = 50;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content)) throw IoError("cannot write '" + path.string() + "'");
}

DatasetFilter filter_of(const RunConfig& c) { return *parse_filter(c.filter); }

fs::path out_dir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw IoError("cannot create '" + c.out + "': " + ec.message());
  return c.out;
}

fs::path require(const fs::path& path, const std::string& hint) {
  if (!fs::exists(path)) {
    throw PreconditionError("missing " + path.string() + "; " + hint);
  }
  return path;
}

FeatureMatrix load_matrix(const RunConfig& c) {
  return read_feature_matrix(
      require(fs::path(c.out) / report_files::kFeatures, "run extract first"));
}

void cmd_synth(const RunConfig& c) {
  if (c.corpus.empty()) throw PreconditionError("synth needs --corpus PATH to write");
  const auto docs = synthesize({c.seed, c.titles});
  write_corpus(docs, c.corpus);
  spdlog::info("wrote {} synthetic documents to {}", docs.size(), c.corpus);
}

void cmd_extract(const RunConfig& c) {
  if (c.corpus.empty()) throw PreconditionError("extract needs --corpus");
  const Corpus corpus = load_corpus(c.corpus);
  for (const auto& w : corpus.warnings) spdlog::warn("{}", w);
  ProviderConfig provider;
  if (c.provider == "remote") {
    provider.kind = ProviderKind::kRemote;
    provider.endpoint = c.endpoint;
  }
  const auto embedder = make_provider(provider);
  const auto docs = preprocess(corpus.documents, c.max_paragraphs);
  const FeatureMatrix matrix = extract_matrix(docs, filter_of(c), *embedder);
  const auto path = out_dir(c) / report_files::kFeatures;
  write_feature_matrix(matrix, path);
  std::size_t gpt = 0;
  for (const auto& r : matrix.records) gpt += r.meta.source == Source::kGpt;
  spdlog::info("extracted {} documents (human {}, gpt {}) with {} -> {}",
               matrix.records.size(), matrix.records.size() - gpt, gpt,
               embedder->provider_id(), path.string());
}

void train_one(const RunConfig& c, const FeatureMatrix& matrix, DatasetFilter filter) {
  ForestParams params;
  params.n_trees = c.trees;
  const TrainOutcome outcome = train_model(matrix, filter, params, c.seed, c.test_fraction);
  const fs::path dir = out_dir(c);
  save_forest(outcome.forest, model_path(dir, filter));

  const fs::path acc_path = dir / report_files::kAccuracy;
  std::vector<AccuracyRow> rows;
  if (fs::exists(acc_path)) rows = parse_accuracy(slurp(acc_path));
  upsert(rows, outcome.accuracy);
  spit(acc_path, format_accuracy(rows));
  spdlog::info("{}: {} train / {} test, accuracy {:.4f}", to_string(filter),
               outcome.accuracy.n_train, outcome.accuracy.n_test,
               outcome.accuracy.accuracy);
}

void cmd_train(const RunConfig& c) { train_one(c, load_matrix(c), filter_of(c)); }

void cmd_explain(const RunConfig& c) {
  const FeatureMatrix matrix = load_matrix(c);
  const fs::path path = model_path(c.out, filter_of(c));
  if (!fs::exists(path)) {
    throw PreconditionError("no model at " + path.string() + "; train first");
  }
  const TrainedForest forest = load_forest(path);
  const ExplainedSet set = explain_model(forest, matrix);
  const fs::path dir = out_dir(c);
  spit(dir / report_files::kAttributions, format_attributions(set));
  if (set.attributions.empty()) {
    spdlog::warn("no held-out rows to explain");
    return;
  }
  const auto summary = summarize(set.attributions, set.instances());
  spit(dir / report_files::kImportance, format_importance(summary));
  spit(dir / report_files::kImportancePoints, format_importance_points(summary, set));
  spdlog::info("explained {} rows; most important feature: {}", set.attributions.size(),
               feature_name(summary.ranked.front().feature));
}

void cmd_project(const RunConfig& c) {
  const FeatureMatrix matrix = load_matrix(c);
  TsneConfig config;
  config.perplexity = c.perplexity;
  config.iterations = c.iterations;
  config.seed = c.seed;
  const ProjectionTable table = project_matrix(matrix, filter_of(c), config);
  const fs::path dir = out_dir(c);
  spit(dir / report_files::kProjection, format_projection(table));
  spit(dir / report_files::kKlTrace, format_kl_trace(table.projection));
  spdlog::info("projected {} rows (perplexity {}), final KL {:.4f}",
               table.meta.size(), table.projection.perplexity,
               table.projection.kl_trace.back());
}

void cmd_report(const RunConfig& c) {
  const fs::path dir = c.out;
  ReportInputs inputs;
  if (fs::exists(dir / report_files::kFeatures)) {
    inputs.features = read_feature_matrix(dir / report_files::kFeatures);
  }
  if (fs::exists(dir / report_files::kAccuracy)) {
    inputs.accuracy = parse_accuracy(slurp(dir / report_files::kAccuracy));
  }
  if (fs::exists(dir / report_files::kAttributions)) {
    inputs.explained = parse_attributions(slurp(dir / report_files::kAttributions));
  }
  if (fs::exists(dir / report_files::kProjection)) {
    ProjectionTable table = parse_projection(slurp(dir / report_files::kProjection));
    if (fs::exists(dir / report_files::kKlTrace)) {
      table.projection.kl_trace = parse_kl_trace(slurp(dir / report_files::kKlTrace));
    }
    inputs.projection = std::move(table);
  }
  const ReportOutcome outcome = emit_report(inputs, dir);
  for (const auto& n : outcome.notices) spdlog::info("{}", n);
  spdlog::info("report bundle: {} files in {}", outcome.written.size(), dir.string());
}

void cmd_run(const RunConfig& c) {
  cmd_extract(c);
  const FeatureMatrix matrix = load_matrix(c);
  const DatasetFilter filter = filter_of(c);
  if (filter == DatasetFilter::kCombined) {
    for (const auto f : {DatasetFilter::kAbstracts, DatasetFilter::kIntroductions,
                         DatasetFilter::kCombined}) {
      train_one(c, matrix, f);
    }
  } else {
    train_one(c, matrix, filter);
  }
  cmd_explain(c);
  cmd_project(c);
  cmd_report(c);
}

void add_out(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--out", c.out, "Output directory for artifacts")->capture_default_str();
}
void add_filter(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--filter", c.filter, "Dataset: abstracts, introductions or combined")
      ->check(CLI::IsMember({"abstracts", "introductions", "combined"}))
      ->capture_default_str();
}
void add_seed(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
}
void add_extract_opts(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--corpus", c.corpus, "Corpus file (JSON lines)")->required();
  cmd->add_option("--provider", c.provider, "Embedding provider: builtin or remote")
      ->check(CLI::IsMember({"builtin", "remote"}))
      ->capture_default_str();
  cmd->add_option("--endpoint", c.endpoint, "Embedding service base URL for --provider remote")
      ->envname("STYLO_EMBED_ENDPOINT");
  cmd->add_option("--max-paragraphs", c.max_paragraphs,
                  "Paragraphs kept from human introductions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}
void add_train_opts(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--test-fraction", c.test_fraction, "Held-out share, strictly in (0, 1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--trees", c.trees, "Trees in the forest")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}
void add_project_opts(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--perplexity", c.perplexity,
                  "t-SNE perplexity, clamped to (n - 1) / 3")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--iterations", c.iterations, "t-SNE iterations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("stylo"));
  spdlog::set_pattern("%v");

  RunConfig c;
  CLI::App app{"Stylometric features, classification and explanation for "
               "human vs GPT written text"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Write the synthetic two-profile corpus");
  synth->add_option("--corpus", c.corpus, "Corpus file to write")->required();
  synth->add_option("--titles", c.titles, "Titles; each yields 4 documents")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_seed(synth, c);

  auto* extract = app.add_subcommand("extract", "Compute the feature matrix");
  add_extract_opts(extract, c);
  add_filter(extract, c);
  add_out(extract, c);

  auto* train = app.add_subcommand("train", "Train a forest and record accuracy");
  add_filter(train, c);
  add_seed(train, c);
  add_train_opts(train, c);
  add_out(train, c);

  auto* explain = app.add_subcommand("explain", "Shapley attributions for held-out rows");
  add_filter(explain, c);
  add_out(explain, c);

  auto* project_cmd = app.add_subcommand("project", "t-SNE projection of the feature matrix");
  add_filter(project_cmd, c);
  add_seed(project_cmd, c);
  add_project_opts(project_cmd, c);
  add_out(project_cmd, c);

  auto* report = app.add_subcommand("report", "Write densities, box plots and the bundle");
  add_out(report, c);

  auto* run = app.add_subcommand("run", "extract, train, explain, project and report");
  add_extract_opts(run, c);
  add_filter(run, c);
  add_seed(run, c);
  add_train_opts(run, c);
  add_project_opts(run, c);
  add_out(run, c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) {
      throw PreconditionError("--test-fraction must lie strictly between 0 and 1");
    }
    if (c.provider == "remote" && c.endpoint.empty()) {
      throw PreconditionError(
          "--provider remote needs --endpoint or STYLO_EMBED_ENDPOINT");
    }
    if (synth->parsed()) cmd_synth(c);
    if (extract->parsed()) cmd_extract(c);
    if (train->parsed()) cmd_train(c);
    if (explain->parsed()) cmd_explain(c);
    if (project_cmd->parsed()) cmd_project(c);
    if (report->parsed()) cmd_report(c);
    if (run->parsed()) cmd_run(c);
  } catch (const EmbeddingError& e) {
    spdlog::error("error: {}", e.what());
    return kExitProvider;
  } catch (const std::exception& e) {
    spdlog::error("error: {}", e.what());
    return kExitFailure;
  }
  return 0;
}
