#include "stylo/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "json.hpp"
#include "stylo/error.h"
#include "text_util.h"

namespace stylo {
namespace {

constexpr std::array<std::pair<Branch, std::string_view>, 8> kBranchNames = {{
    {Branch::kPhysics, "physics"},
    {Branch::kBiology, "biology"},
    {Branch::kIndustrialEng, "industrial_eng"},
    {Branch::kComputerEng, "computer_eng"},
    {Branch::kSociology, "sociology"},
    {Branch::kPhilosophy, "philosophy"},
    {Branch::kEconomics, "economics"},
    {Branch::kOther, "other"},
}};

constexpr std::array<std::string_view, 6> kKnownFields = {
    "id", "title", "branch", "section", "source", "text"};

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '_';
}

// One author-year citation; several may be joined with ';'. Names may carry
// lowercase particles ("van der Berg") and two-byte UTF-8 letters.
const std::regex& author_year_regex() {
  static const std::regex re = [] {
    const std::string letter = R"((?:[A-Za-z'\-]|[\xC2-\xDF][\x80-\xBF]))";
    const std::string initial = R"((?:[A-Z]|[\xC2-\xDF][\x80-\xBF]))";
    const std::string particles = R"((?:(?:[Vv]an|[Vv]on|[Dd]e|[Dd]er|[Dd]en|[Dd]a|[Dd]i|[Dd]u|[Ll]e|[Ll]a) )*)";
    const std::string name = particles + initial + letter + "+";
    const std::string one = name + "(?:(?:, and |, | and | & )" + name + ")*" +
                            R"((?: et al\.?)?,? (?:1[5-9]|20)\d{2}[a-z]?)" +
                            R"((?:, pp?\. ?\d+(?:(?:-|\xE2\x80\x93)\d+)?)?)";
    return std::regex(R"(\s*)" + one + "(?:; ?" + one + R"()*\s*)",
                      std::regex::optimize);
  }();
  return re;
}

const std::regex& numeric_bracket_regex() {
  static const std::regex re(
      R"(\s*[1-9]\d*(?:\s*(?:,|-|\xE2\x80\x93)\s*[1-9]\d*)*\s*)", std::regex::optimize);
  return re;
}

// Returns the end (one past the closer) of a citation starting at `pos`, or
// npos if the construct there is not a citation.
std::size_t citation_end(std::string_view text, std::size_t pos,
                         char previous) {
  const char opener = text[pos];
  const char closer = opener == '[' ? ']' : ')';
  const std::size_t close = text.find_first_of(
      opener == '[' ? std::string_view("[]\n") : std::string_view("()\n"),
      pos + 1);
  if (close == std::string_view::npos || text[close] != closer) {
    return std::string_view::npos;
  }
  const std::string content(text.substr(pos + 1, close - pos - 1));
  if (opener == '[') {
    if (is_word_char(previous)) return std::string_view::npos;
    if (!std::regex_match(content, numeric_bracket_regex())) {
      return std::string_view::npos;
    }
  } else if (!std::regex_match(content, author_year_regex())) {
    return std::string_view::npos;
  }
  return close + 1;
}

bool is_trailing_punct(char c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' ||
         c == '?' || c == ')' || c == ']';
}

std::string require_string(const nlohmann::json& record, const char* field,
                           std::size_t line) {
  const auto it = record.find(field);
  if (it == record.end()) {
    throw CorpusError(std::string("field '") + field + "' missing", line);
  }
  if (!it->is_string()) {
    throw CorpusError(std::string("field '") + field + "' is not a string",
                      line);
  }
  return it->get<std::string>();
}

template <typename Enum>
Enum require_enum(const nlohmann::json& record, const char* field,
                  std::size_t line,
                  std::optional<Enum> (*parse)(std::string_view)) {
  const std::string value = require_string(record, field, line);
  const auto parsed = parse(value);
  if (!parsed) {
    throw CorpusError(std::string("field '") + field +
                          "' has unknown value '" + value + "'",
                      line);
  }
  return *parsed;
}

}  // namespace

std::string_view to_string(Branch branch) {
  for (const auto& [value, name] : kBranchNames) {
    if (value == branch) return name;
  }
  return "other";
}

std::string_view to_string(Section section) {
  return section == Section::kAbstract ? "abstract" : "introduction";
}

std::string_view to_string(Source source) {
  return source == Source::kHuman ? "human" : "gpt";
}

std::optional<Branch> parse_branch(std::string_view name) {
  for (const auto& [value, branch_name] : kBranchNames) {
    if (branch_name == name) return value;
  }
  return std::nullopt;
}

std::optional<Section> parse_section(std::string_view name) {
  if (name == "abstract") return Section::kAbstract;
  if (name == "introduction") return Section::kIntroduction;
  return std::nullopt;
}

std::optional<Source> parse_source(std::string_view name) {
  if (name == "human") return Source::kHuman;
  if (name == "gpt") return Source::kGpt;
  return std::nullopt;
}

void validate(const Document& doc) {
  if (doc.id.empty()) throw PreconditionError("document id is empty");
  if (trim(doc.title).empty()) {
    throw PreconditionError("document '" + doc.id + "' has an empty title");
  }
  if (trim(doc.text).empty()) {
    throw PreconditionError("document '" + doc.id + "' has empty text");
  }
}

Corpus parse_corpus(std::string_view content, std::string origin) {
  Corpus corpus;
  corpus.source_path = std::move(origin);
  std::unordered_map<std::string, std::size_t> seen;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = content.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (trim(line).empty()) {
      if (end == content.size()) break;
      continue;
    }

    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw CorpusError(std::string("malformed record: ") + e.what(), line_no);
    }
    if (!record.is_object()) {
      throw CorpusError("malformed record: expected an object", line_no);
    }

    Document doc;
    doc.id = require_string(record, "id", line_no);
    doc.title = require_string(record, "title", line_no);
    doc.branch = require_enum<Branch>(record, "branch", line_no, parse_branch);
    doc.section =
        require_enum<Section>(record, "section", line_no, parse_section);
    doc.source = require_enum<Source>(record, "source", line_no, parse_source);
    doc.text = require_string(record, "text", line_no);

    if (doc.id.empty()) throw CorpusError("field 'id' is empty", line_no);
    if (trim(doc.title).empty()) {
      throw CorpusError("field 'title' is empty", line_no);
    }
    if (trim(doc.text).empty()) {
      throw CorpusError("field 'text' is empty", line_no);
    }
    for (const auto& [key, value] : record.items()) {
      if (std::find(kKnownFields.begin(), kKnownFields.end(), key) ==
          kKnownFields.end()) {
        corpus.warnings.push_back("line " + std::to_string(line_no) +
                                  ": unknown field '" + key + "' ignored");
      }
    }
    if (const auto it = seen.find(doc.id); it != seen.end()) {
      throw CorpusError("duplicate id '" + doc.id + "' (first seen on line " +
                            std::to_string(it->second) + ")",
                        line_no);
    }
    seen.emplace(doc.id, line_no);
    corpus.documents.push_back(std::move(doc));
    if (end == content.size()) break;
  }
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw CorpusError("cannot open corpus file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_corpus(buffer.str(), path.string());
}

std::string serialize_corpus(const std::vector<Document>& documents) {
  std::string out;
  for (const Document& doc : documents) {
    nlohmann::ordered_json record;
    record["id"] = doc.id;
    record["title"] = doc.title;
    record["branch"] = std::string(to_string(doc.branch));
    record["section"] = std::string(to_string(doc.section));
    record["source"] = std::string(to_string(doc.source));
    record["text"] = doc.text;
    out += record.dump();
    out += '\n';
  }
  return out;
}

void write_corpus(const std::vector<Document>& documents,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write corpus file '" + path.string() + "'");
  out << serialize_corpus(documents);
  if (!out) throw IoError("failed writing corpus file '" + path.string() + "'");
}

std::string strip_citations(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '[' || c == '(') {
      const char previous = out.empty() ? '\0' : out.back();
      const std::size_t end = citation_end(text, i, previous);
      if (end != std::string_view::npos) {
        const bool at_line_end = end == text.size() || text[end] == '\n' ||
                                 text[end] == '\r';
        if (at_line_end || is_trailing_punct(text[end])) {
          while (!out.empty() && (out.back() == ' ' || out.back() == '\t')) {
            out.pop_back();
          }
        }
        i = end;
        if (out.empty() || out.back() == '\n') {
          while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        }
        continue;
      }
    }
    out.push_back(c);
    ++i;
  }

  std::string collapsed;
  collapsed.reserve(out.size());
  for (const char c : out) {
    if (c == ' ' && !collapsed.empty() && collapsed.back() == ' ') continue;
    collapsed.push_back(c);
  }
  return collapsed;
}

std::vector<std::string_view> paragraph_blocks(std::string_view text) {
  std::vector<std::string_view> blocks;
  std::size_t block_begin = std::string_view::npos;
  std::size_t block_end = 0;

  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (trim(line).empty()) {
      if (block_begin != std::string_view::npos) {
        blocks.push_back(trim(text.substr(block_begin, block_end - block_begin)));
        block_begin = std::string_view::npos;
      }
    } else {
      if (block_begin == std::string_view::npos) block_begin = start;
      block_end = end;
    }
    start = end + 1;
  }
  if (block_begin != std::string_view::npos) {
    blocks.push_back(trim(text.substr(block_begin, block_end - block_begin)));
  }
  return blocks;
}

Document truncate_paragraphs(const Document& doc, std::size_t max_paragraphs) {
  if (max_paragraphs == 0) {
    throw PreconditionError("max_paragraphs must be at least 1");
  }
  const auto blocks = paragraph_blocks(doc.text);
  if (blocks.size() <= max_paragraphs) return doc;

  Document truncated = doc;
  truncated.text.clear();
  for (std::size_t i = 0; i < max_paragraphs; ++i) {
    if (i > 0) truncated.text += "\n\n";
    truncated.text += blocks[i];
  }
  return truncated;
}

}  // namespace stylo
