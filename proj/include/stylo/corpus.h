#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stylo {

enum class Branch {
  kPhysics,
  kBiology,
  kIndustrialEng,
  kComputerEng,
  kSociology,
  kPhilosophy,
  kEconomics,
  kOther,
};

enum class Section { kAbstract, kIntroduction };

// Positive class is kGpt.
enum class Source { kHuman, kGpt };

std::string_view to_string(Branch branch);
std::string_view to_string(Section section);
std::string_view to_string(Source source);

std::optional<Branch> parse_branch(std::string_view name);
std::optional<Section> parse_section(std::string_view name);
std::optional<Source> parse_source(std::string_view name);

inline constexpr Branch kAllBranches[] = {
    Branch::kPhysics,   Branch::kBiology,    Branch::kIndustrialEng,
    Branch::kComputerEng, Branch::kSociology, Branch::kPhilosophy,
    Branch::kEconomics, Branch::kOther,
};

struct Document {
  std::string id;
  std::string title;
  Branch branch = Branch::kOther;
  Section section = Section::kAbstract;
  Source source = Source::kHuman;
  // Raw text; paragraphs are separated by one or more blank lines.
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

// Throws PreconditionError when id, title or trimmed text is empty.
void validate(const Document& doc);

struct Corpus {
  std::vector<Document> documents;
  std::string source_path;
  // Non-fatal notices collected while loading (e.g. unknown fields).
  std::vector<std::string> warnings;
};

// Reads a line-delimited JSON corpus. Blank lines are skipped. Throws
// CorpusError naming the line and field of the first bad record, or the id
// and line of the first duplicate.
Corpus load_corpus(const std::filesystem::path& path);

// Parses corpus content already in memory; `origin` is used in messages.
Corpus parse_corpus(std::string_view content, std::string origin = {});

void write_corpus(const std::vector<Document>& documents,
                  const std::filesystem::path& path);
std::string serialize_corpus(const std::vector<Document>& documents);

// Removes author-year parentheticals and bracketed numeric citations, then
// collapses runs of spaces. Newlines are left alone so paragraph breaks
// survive. A bracket directly after a word character is not a citation.
std::string strip_citations(std::string_view text);

// Paragraph blocks of raw text: maximal runs of lines separated by at least
// one blank line, with surrounding whitespace trimmed. Views into `text`.
std::vector<std::string_view> paragraph_blocks(std::string_view text);

// Keeps the first `max_paragraphs` whole paragraphs. Documents already at or
// below the limit are returned unchanged.
Document truncate_paragraphs(const Document& doc, std::size_t max_paragraphs);

}  // namespace stylo
