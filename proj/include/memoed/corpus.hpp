#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace memoed {

struct Document {
  std::string id;
  std::string text;
  std::string source;
};

struct TokenSpan {
  std::size_t token_index = 0;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;

  bool operator==(const TokenSpan&) const = default;
};

struct SentenceSpan {
  std::size_t sentence_index = 0;
  std::size_t byte_start = 0;
  std::size_t byte_end = 0;

  bool operator==(const SentenceSpan&) const = default;
};

// Implementations must return non-overlapping spans, strictly increasing in
// byte_start, each with byte_end > byte_start, and must be pure.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<TokenSpan> tokenize(std::string_view text) const = 0;
  virtual std::string name() const = 0;
};

/// Splits on Unicode whitespace and emits every punctuation code point as a
/// token of its own. Bytes that are not valid UTF-8 are treated as word
/// characters.
class WhitespacePunctTokenizer final : public Tokenizer {
 public:
  std::vector<TokenSpan> tokenize(std::string_view text) const override;
  std::string name() const override { return "whitespace-punct-v1"; }
};

const Tokenizer& default_tokenizer();

std::vector<TokenSpan> tokenize(std::string_view text);

/// Sentence delimiters are '.', '!', '?' and '\n'. A run of delimiters (and
/// the whitespace between them) closes the current sentence, so no sentence
/// is empty. Spans are trimmed of surrounding whitespace.
std::vector<SentenceSpan> split_sentences(std::string_view text);

/// Unicode simple lowercase mapping, code point by code point.
std::string fold_case(std::string_view text);

/// True when every code point in `token` is punctuation.
bool is_punctuation_token(std::string_view token);

/// Streams a JSONL corpus. Rejects malformed lines, missing or non-string
/// "id"/"text", blank text, and duplicate ids; every message carries the
/// 1-based line number.
class CorpusReader {
 public:
  explicit CorpusReader(const std::filesystem::path& path);

  std::optional<Document> next();
  std::size_t line_number() const { return line_number_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_number_ = 0;
  std::unordered_set<std::string> seen_ids_;
};

std::vector<Document> ingest_corpus(const std::filesystem::path& path);

}  // namespace memoed
