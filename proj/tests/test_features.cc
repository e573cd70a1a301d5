#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "stylo/embed.h"
#include "stylo/error.h"
#include "stylo/features.h"
#include "test_support.h"

namespace stylo {
namespace {

std::vector<std::string> words(const std::string& text) { return tokenize_words(text); }

SegmentedText seg(const std::string& text) { return segment(text); }

bool exact_feature(Feature f) {
  switch (f) {
    case Feature::kEntropyNats:
    case Feature::kMtld:
    case Feature::kTitleSimilarity:
    case Feature::kParagraphSimilarity:
      return false;
    default:
      return true;
  }
}

TEST(FeatureOracleTest, FixtureDocumentsMatchFrozenValues) {
  std::map<std::string, std::map<std::string, std::string>> oracle;
  for (const auto& line : testing::fixture_lines("feature_oracle.tsv")) {
    const auto f = testing::split_tabs(line);
    if (f[0] == "id") continue;
    ASSERT_EQ(f.size(), 3u) << line;
    oracle[f[0]][f[1]] = f[2];
  }
  const auto fixtures = testing::feature_fixtures();
  ASSERT_EQ(fixtures.size(), 5u);
  const BuiltinEmbedder embedder;
  for (const auto& fx : fixtures) {
    const FeatureVector v = extract_all(fx.doc, embedder);
    for (const Feature f : kAllFeatures) {
      const std::string name(feature_name(f));
      SCOPED_TRACE(fx.doc.id + " " + name);
      const std::string& want = oracle.at(fx.doc.id).at(name);
      if (want.empty()) {
        EXPECT_FALSE(v.get(f).has_value());
        continue;
      }
      ASSERT_TRUE(v.get(f).has_value());
      const double expected = std::stod(want);
      if (exact_feature(f)) {
        EXPECT_EQ(*v.get(f), expected);
      } else {
        EXPECT_NEAR(*v.get(f), expected, 1e-9);
      }
    }
  }
}

TEST(FeatureOracleTest, SegmentationMatchesAnnotation) {
  for (const auto& fx : testing::feature_fixtures()) {
    const SegmentedText s = segment(fx.doc.text);
    const auto& paragraphs = fx.annotation.at("paragraphs");
    ASSERT_EQ(s.paragraphs.size(), paragraphs.size()) << fx.doc.id;
    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
      ASSERT_EQ(s.paragraphs[p].sentences.size(), paragraphs[p].size()) << fx.doc.id;
      for (std::size_t i = 0; i < paragraphs[p].size(); ++i) {
        const auto& sent = s.paragraphs[p].sentences[i];
        EXPECT_EQ(sent.words, paragraphs[p][i].at("tokens").get<std::vector<std::string>>());
        EXPECT_EQ(sent.tracked_punct_count, paragraphs[p][i].at("punct").get<std::size_t>());
      }
    }
  }
}

TEST(FeatureTest, ParagraphSize) {
  EXPECT_DOUBLE_EQ(paragraph_size(seg("A b. C d.\n\nE f. G h. I j. K l.")), 3.0);
  EXPECT_DOUBLE_EQ(paragraph_size(seg("A. B. C. D. E.")), 5.0);
  EXPECT_DOUBLE_EQ(paragraph_size(seg("A. B.\n\nC. D. E.\n\nF. G.")), 7.0 / 3.0);
}

TEST(FeatureTest, SentenceLength) {
  EXPECT_DOUBLE_EQ(sentence_length(seg("The cat sat. The dog ran away now.")), 4.0);
  EXPECT_DOUBLE_EQ(sentence_length(seg("One two three four five six seven eight nine ten.")), 10.0);
}

TEST(FeatureTest, WordSizeAndLongWords) {
  EXPECT_DOUBLE_EQ(word_size(seg("Cat horse.")), 4.0);
  EXPECT_DOUBLE_EQ(word_size(seg("Planet rocket violet.")), 6.0);
  EXPECT_DOUBLE_EQ(pct_long_words(seg("System is working.")), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(pct_long_words(seg("Hello hello hello.")), 0.0);
  EXPECT_DOUBLE_EQ(pct_long_words(seg("Abcdef.")), 1.0);
}

TEST(FeatureTest, PunctPerSentence) {
  EXPECT_DOUBLE_EQ(punct_per_sentence(seg("However, we ran; then, we stopped.")), 3.0);
  EXPECT_DOUBLE_EQ(punct_per_sentence(seg("Nothing here at all.")), 0.0);
  EXPECT_DOUBLE_EQ(punct_per_sentence(seg("Really? Yes! Fine.")), 0.0);
}

TEST(FeatureTest, Entropy) {
  EXPECT_DOUBLE_EQ(entropy(words("a a a a")), 0.0);
  EXPECT_NEAR(entropy(words("a b a b")), std::log(2.0), 1e-12);
  EXPECT_NEAR(entropy(words("one two three four five six seven")), std::log(7.0), 1e-12);
  EXPECT_THROW(entropy(std::vector<std::string>{}), PreconditionError);
}

TEST(FeatureTest, EntropyIsPermutationInvariant) {
  auto w = words("the cat and the dog and the bird saw a cat");
  const double h = entropy(w);
  std::mt19937 rng(7);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(w.begin(), w.end(), rng);
    EXPECT_NEAR(entropy(w), h, 1e-12);
  }
}

TEST(FeatureTest, PrefixAndRelativeRatios) {
  const auto& lex = Lexicons::defaults();
  EXPECT_DOUBLE_EQ(prefix_ratio(seg("Unhappy rewrite cat."), lex.prefixes), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(prefix_ratio(seg("Impossible."), lex.prefixes), 1.0);
  EXPECT_DOUBLE_EQ(prefix_ratio(seg("Uncle."), lex.prefixes), 0.0);
  EXPECT_DOUBLE_EQ(relative_clause_ratio(seg("The man who ran."), lex.markers), 0.25);
  EXPECT_DOUBLE_EQ(relative_clause_ratio(seg("No markers here."), lex.markers), 0.0);
  EXPECT_DOUBLE_EQ(relative_clause_ratio(seg("Where we went and when."), lex.markers), 0.4);
}

TEST(FeatureTest, RatiosInvariantUnderDuplication) {
  const auto& lex = Lexicons::defaults();
  const std::string t = "The unhappy reviewer, who rewrote everything, disliked the rest.";
  const auto once = seg(t);
  const auto twice = seg(t + " " + t);
  EXPECT_DOUBLE_EQ(pct_long_words(once), pct_long_words(twice));
  EXPECT_DOUBLE_EQ(prefix_ratio(once, lex.prefixes), prefix_ratio(twice, lex.prefixes));
  EXPECT_DOUBLE_EQ(relative_clause_ratio(once, lex.markers),
                   relative_clause_ratio(twice, lex.markers));
}

TEST(MtldTest, RepeatedWordIsTwo) {
  const std::vector<std::string> ten(10, "word");
  EXPECT_EQ(mtld(ten), 2.0);
  EXPECT_EQ(mtld_pass(ten), 2.0);
  const std::vector<std::string> twenty(20, "word");
  EXPECT_EQ(mtld(twenty), mtld(ten));
}

TEST(MtldTest, AllDistinctReturnsTokenCount) {
  const auto w = words("one two three four five six seven eight nine ten");
  EXPECT_EQ(mtld(w), 10.0);
}

TEST(MtldTest, PeriodTwoConcatenationIsStable) {
  std::vector<std::string> t;
  for (int i = 0; i < 12; ++i) t.push_back(i % 2 ? "b" : "a");
  std::vector<std::string> tt = t;
  tt.insert(tt.end(), t.begin(), t.end());
  EXPECT_LE(std::abs(mtld(tt) - mtld(t)), 0.5);
}

TEST(MtldTest, ReferenceSequences) {
  std::size_t n = 0;
  for (const auto& line : testing::fixture_lines("mtld_oracle.tsv")) {
    const auto f = testing::split_tabs(line);
    if (f[0] == "name") continue;
    ASSERT_EQ(f.size(), 3u);
    std::vector<std::string> tokens;
    std::istringstream in(f[1]);
    for (std::string t; in >> t;) tokens.push_back(t);
    EXPECT_NEAR(mtld(tokens), std::stod(f[2]), 1e-6) << f[0];
    ++n;
  }
  EXPECT_EQ(n, 5u);
}

TEST(FeatureTest, ExtractAllSingleParagraphHasNoParagraphSimilarity) {
  const BuiltinEmbedder embedder;
  Document doc{"a1", "Neural networks", Branch::kComputerEng, Section::kAbstract,
               Source::kHuman, "Neural networks learn. They generalise well."};
  const FeatureVector v = extract_all(doc, embedder);
  EXPECT_FALSE(v.get(Feature::kParagraphSimilarity).has_value());
  EXPECT_THROW(v.at(Feature::kParagraphSimilarity), PreconditionError);
  for (std::size_t i = 0; i + 1 < kFeatureCount; ++i) EXPECT_TRUE(v.values[i].has_value());
  doc.text = "   ";
  EXPECT_THROW(extract_all(doc, embedder), Error);
}

class FailingProvider final : public EmbeddingProvider {
 public:
  std::vector<EmbeddingVector> embed(std::span<const std::string>) const override {
    throw TransportError("connection refused");
  }
  std::string provider_id() const override { return "failing"; }
};

TEST(FeatureTest, ProviderFailureCarriesDocumentId) {
  const Document doc{"doc-42", "T", Branch::kOther, Section::kAbstract, Source::kGpt,
                     "Some words here."};
  try {
    extract_all(doc, FailingProvider{});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_NE(std::string(e.what()).find("doc-42"), std::string::npos);
  }
}

TEST(FeatureTest, RangeInvariantsOnRandomText) {
  std::mt19937_64 rng(99);
  const std::vector<std::string> vocab = {
      "the", "unhappy", "which", "model", "rewrite", "entropy", "x", "data",
      "interaction", "that", "is", "a", "when", "prefixes", "reasonable"};
  const std::vector<std::string> marks = {" ", " ", " ", ", ", "; ", ". ", "? ", "\n\n"};
  const BuiltinEmbedder embedder;
  for (int doc = 0; doc < 200; ++doc) {
    std::string text = "Start";
    const std::size_t len = 5 + rng() % 120;
    for (std::size_t i = 0; i < len; ++i) {
      text += marks[rng() % marks.size()];
      std::string w = vocab[rng() % vocab.size()];
      if (rng() % 4 == 0) w[0] = static_cast<char>(std::toupper(w[0]));
      text += w;
    }
    text += ".";
    const Document d{"r", "Random title words", Branch::kOther, Section::kIntroduction,
                     Source::kHuman, text};
    const FeatureVector v = extract_all(d, embedder);
    const SegmentedText s = segment(text);
    std::map<std::string, int> types;
    for (const auto& w : s.words()) ++types[w];
    for (const Feature f : {Feature::kPctLongWords, Feature::kPrefixRatio,
                            Feature::kRelativeClauseRatio}) {
      EXPECT_GE(v.at(f), 0.0);
      EXPECT_LE(v.at(f), 1.0);
    }
    for (const Feature f : {Feature::kParagraphSize, Feature::kSentenceLength,
                            Feature::kWordSize, Feature::kPunctPerSentence, Feature::kMtld}) {
      EXPECT_GE(v.at(f), 0.0);
    }
    EXPECT_GE(v.at(Feature::kEntropyNats), 0.0);
    EXPECT_LE(v.at(Feature::kEntropyNats), std::log(static_cast<double>(types.size())) + 1e-12);
    EXPECT_GE(v.at(Feature::kTitleSimilarity), -1.0);
    EXPECT_LE(v.at(Feature::kTitleSimilarity), 1.0);
    if (const auto ps = v.get(Feature::kParagraphSimilarity)) {
      EXPECT_GE(*ps, -1.0);
      EXPECT_LE(*ps, 1.0);
    } else {
      EXPECT_EQ(s.paragraphs.size(), 1u);
    }
  }
}

TEST(FeatureTest, NamesRoundTrip) {
  for (const Feature f : kAllFeatures) EXPECT_EQ(parse_feature(feature_name(f)), f);
  EXPECT_FALSE(parse_feature("nope"));
  EXPECT_EQ(feature_name(Feature::kParagraphSize), "paragraph_size");
}

}  // namespace
}  // namespace stylo
