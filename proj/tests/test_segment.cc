#include <gtest/gtest.h>

#include <sstream>

#include "stylo/error.h"
#include "stylo/segment.h"
#include "test_support.h"

namespace stylo {
namespace {

struct SegmentationCase {
  std::string input;
  // Paragraphs of expected sentences.
  std::vector<std::vector<std::string>> expected;
};

std::vector<SegmentationCase> load_cases() {
  std::vector<SegmentationCase> cases;
  std::istringstream in(testing::read_file(testing::data_path("segmentation.txt")));
  enum { kNone, kInput, kExpected } mode = kNone;
  for (std::string line; std::getline(in, line);) {
    if (mode == kNone && (line.empty() || line[0] == '#')) continue;
    if (line == "@@ input") {
      cases.emplace_back();
      mode = kInput;
      continue;
    }
    if (line == "@@ expected") {
      mode = kExpected;
      cases.back().expected.emplace_back();
      continue;
    }
    if (mode == kInput) {
      cases.back().input += line + "\n";
    } else if (mode == kExpected) {
      if (line.empty()) {
        cases.back().expected.emplace_back();
      } else {
        cases.back().expected.back().push_back(line);
      }
    }
  }
  return cases;
}

TEST(SegmentTest, HandSegmentedFixture) {
  const auto cases = load_cases();
  std::size_t sentences = 0;
  for (const auto& c : cases) {
    const SegmentedText seg = segment(c.input);
    ASSERT_EQ(seg.paragraphs.size(), c.expected.size()) << c.input;
    for (std::size_t p = 0; p < c.expected.size(); ++p) {
      const auto& got = seg.paragraphs[p].sentences;
      const auto& want = c.expected[p];
      ASSERT_EQ(got.size(), want.size()) << c.input;
      for (std::size_t s = 0; s < want.size(); ++s) {
        EXPECT_EQ(got[s].words, tokenize_words(want[s])) << want[s];
        ++sentences;
      }
    }
  }
  EXPECT_GE(sentences, 100u);
}

TEST(SegmentTest, TwoSimpleSentences) {
  const auto seg = segment("The cat sat. The dog ran away now.");
  ASSERT_EQ(seg.paragraphs.size(), 1u);
  ASSERT_EQ(seg.paragraphs[0].sentences.size(), 2u);
  EXPECT_EQ(seg.paragraphs[0].sentences[0].words.size(), 3u);
  EXPECT_EQ(seg.paragraphs[0].sentences[1].words.size(), 5u);
}

TEST(SegmentTest, AbbreviationDoesNotSplit) {
  const auto seg = segment("We used approx. 5 kg. It worked.");
  EXPECT_EQ(seg.sentence_count(), 2u);
}

TEST(SegmentTest, DecimalIsOneToken) {
  const auto seg = segment("Pi is 3.14 here.");
  ASSERT_EQ(seg.sentence_count(), 1u);
  EXPECT_EQ(seg.words(), (std::vector<std::string>{"pi", "is", "3.14", "here"}));
}

TEST(SegmentTest, PunctuationTally) {
  const auto seg = segment("However, we ran; then, we stopped.");
  ASSERT_EQ(seg.sentence_count(), 1u);
  EXPECT_EQ(seg.paragraphs[0].sentences[0].tracked_punct_count, 3u);
  EXPECT_EQ(segment("Stop. Why? Go!").paragraphs[0].sentences[1].tracked_punct_count, 0u);
}

TEST(SegmentTest, TokenRules) {
  EXPECT_EQ(tokenize_words("Don't stop state-of-the-art work"),
            (std::vector<std::string>{"don't", "stop", "state-of-the-art", "work"}));
  EXPECT_EQ(tokenize_words("Rock 'n' roll -- well-known"),
            (std::vector<std::string>{"rock", "n", "roll", "well-known"}));
  EXPECT_EQ(tokenize_words("It’s fine"), (std::vector<std::string>{"it's", "fine"}));
  EXPECT_EQ(tokenize_words("end. 3.14. x"), (std::vector<std::string>{"end", "3.14", "x"}));
  EXPECT_EQ(tokenize_words("Çok güzel"), (std::vector<std::string>{"Çok", "güzel"}));
}

TEST(SegmentTest, WordLength) {
  EXPECT_EQ(word_length("cat"), 3u);
  EXPECT_EQ(word_length("don't"), 4u);
  EXPECT_EQ(word_length("state-of-the-art"), 13u);
  EXPECT_EQ(word_length("3.14"), 3u);
}

TEST(SegmentTest, ParagraphsAndLineFolding) {
  const auto seg = segment("One line\ncontinues here.\n\n\n  \nSecond paragraph.\n\n");
  ASSERT_EQ(seg.paragraphs.size(), 2u);
  EXPECT_EQ(seg.paragraphs[0].text, "One line continues here.");
  EXPECT_EQ(seg.paragraphs[0].sentences.size(), 1u);
}

TEST(SegmentTest, EmptyInputRejected) {
  EXPECT_THROW(segment(""), PreconditionError);
  EXPECT_THROW(segment(" \n\n \t"), PreconditionError);
  EXPECT_THROW(segment("... !!! ,,,"), PreconditionError);
}

TEST(SegmentTest, StructuralInvariants) {
  const std::string text =
      "Alpha beta. Gamma delta!\n\n\n\nEpsilon? Zeta eta theta.\n\n  \n\nIota.";
  const auto seg = segment(text);
  EXPECT_LE(seg.paragraphs.size(), 4u);
  std::size_t words = 0;
  for (const auto& p : seg.paragraphs) {
    EXPECT_FALSE(p.sentences.empty());
    for (const auto& s : p.sentences) {
      EXPECT_FALSE(s.words.empty());
      for (const auto& w : s.words) EXPECT_GT(word_length(w), 0u);
      words += s.words.size();
    }
  }
  EXPECT_EQ(words, seg.word_count());
  EXPECT_EQ(seg.words(), tokenize_words(text));
  const auto again = segment(text);
  EXPECT_EQ(again.words(), seg.words());
}

TEST(AbbreviationTest, ShippedFileMatchesDefaults) {
  const auto loaded =
      AbbreviationList::load(std::filesystem::path(STYLO_DATA_DIR) / "abbreviations.txt");
  EXPECT_EQ(loaded.entries(), AbbreviationList::defaults().entries());
  EXPECT_GE(loaded.entries().size(), 60u);
  EXPECT_TRUE(loaded.contains("e.g."));
  EXPECT_TRUE(loaded.contains("fig."));
  EXPECT_FALSE(loaded.contains("kg."));
}

TEST(AbbreviationTest, CustomListChangesSplitting) {
  const auto custom = AbbreviationList::parse("# units\nkg\n");
  EXPECT_EQ(segment("We used 5 kg. It worked.", custom).sentence_count(), 1u);
  EXPECT_EQ(segment("We used 5 kg. It worked.").sentence_count(), 2u);
}

}  // namespace
}  // namespace stylo
