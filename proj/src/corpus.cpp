#include "memoed/corpus.hpp"

#include <clocale>
#include <cwctype>
#include <locale.h>

#include "json.hpp"

#include "memoed/error.hpp"
#include "utf8.hpp"

namespace memoed {

namespace {

bool is_sentence_delimiter(char c) {
  return c == '.' || c == '!' || c == '?' || c == '\n';
}

locale_t utf8_locale() {
  static const locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (l == static_cast<locale_t>(0)) {
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    }
    return l;
  }();
  return loc;
}

char32_t lower(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp;
  }
  locale_t loc = utf8_locale();
  if (loc == static_cast<locale_t>(0)) return cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc));
}

}  // namespace

std::vector<TokenSpan> WhitespacePunctTokenizer::tokenize(std::string_view text) const {
  std::vector<TokenSpan> spans;
  std::size_t word_start = 0;
  bool in_word = false;
  auto close_word = [&](std::size_t end) {
    if (in_word) {
      spans.push_back({spans.size(), word_start, end});
      in_word = false;
    }
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const utf8::Decoded d = utf8::decode(text, pos);
    if (utf8::is_space(d.code_point)) {
      close_word(pos);
    } else if (utf8::is_punct(d.code_point)) {
      close_word(pos);
      spans.push_back({spans.size(), pos, pos + d.length});
    } else if (!in_word) {
      in_word = true;
      word_start = pos;
    }
    pos += d.length;
  }
  close_word(text.size());
  return spans;
}

const Tokenizer& default_tokenizer() {
  static const WhitespacePunctTokenizer tokenizer;
  return tokenizer;
}

std::vector<TokenSpan> tokenize(std::string_view text) {
  return default_tokenizer().tokenize(text);
}

std::vector<SentenceSpan> split_sentences(std::string_view text) {
  std::vector<SentenceSpan> sentences;
  const std::size_t n = text.size();
  std::size_t pos = 0;
  while (true) {
    while (pos < n) {
      const utf8::Decoded d = utf8::decode(text, pos);
      if (!utf8::is_space(d.code_point)) break;
      pos += d.length;
    }
    if (pos >= n) break;

    const std::size_t start = pos;
    std::size_t end = pos;
    while (pos < n && !is_sentence_delimiter(text[pos])) {
      const utf8::Decoded d = utf8::decode(text, pos);
      pos += d.length;
      if (!utf8::is_space(d.code_point)) end = pos;
    }
    // Absorb the delimiter run, including whitespace between delimiters.
    while (pos < n) {
      if (is_sentence_delimiter(text[pos])) {
        ++pos;
        if (text[pos - 1] != '\n') end = pos;
        continue;
      }
      const utf8::Decoded d = utf8::decode(text, pos);
      if (!utf8::is_space(d.code_point)) break;
      pos += d.length;
    }
    sentences.push_back({sentences.size(), start, end});
  }
  return sentences;
}

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const utf8::Decoded d = utf8::decode(text, pos);
    if (d.valid) {
      utf8::append(out, lower(d.code_point));
    } else {
      out.push_back(text[pos]);
    }
    pos += d.length;
  }
  return out;
}

bool is_punctuation_token(std::string_view token) {
  if (token.empty()) return false;
  std::size_t pos = 0;
  while (pos < token.size()) {
    const utf8::Decoded d = utf8::decode(token, pos);
    if (!utf8::is_punct(d.code_point)) return false;
    pos += d.length;
  }
  return true;
}

CorpusReader::CorpusReader(const std::filesystem::path& path) : path_(path), in_(path) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorCode::kNotFound, "corpus file not found: " + path.string());
  }
  if (!in_) fail(ErrorCode::kIo, "cannot open corpus file: " + path.string());
}

std::optional<Document> CorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;

    const std::string where = path_.string() + ":" + std::to_string(line_number_) + ": ";
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kFormat, where + "malformed JSON: " + e.what());
    }
    if (!obj.is_object()) fail(ErrorCode::kFormat, where + "expected a JSON object");
    auto id = obj.find("id");
    auto text = obj.find("text");
    if (id == obj.end() || !id->is_string()) {
      fail(ErrorCode::kFormat, where + "missing string field \"id\"");
    }
    if (text == obj.end() || !text->is_string()) {
      fail(ErrorCode::kFormat, where + "missing string field \"text\"");
    }

    Document doc;
    doc.id = id->get<std::string>();
    doc.text = text->get<std::string>();
    if (auto source = obj.find("source"); source != obj.end() && source->is_string()) {
      doc.source = source->get<std::string>();
    }
    if (doc.id.empty()) fail(ErrorCode::kFormat, where + "empty document id");
    if (split_sentences(doc.text).empty()) {
      fail(ErrorCode::kFormat, where + "document \"" + doc.id + "\" has blank text");
    }
    if (!seen_ids_.insert(doc.id).second) {
      fail(ErrorCode::kFormat, where + "duplicate document id \"" + doc.id + "\"");
    }
    return doc;
  }
  if (in_.bad()) fail(ErrorCode::kIo, "read error on " + path_.string());
  return std::nullopt;
}

std::vector<Document> ingest_corpus(const std::filesystem::path& path) {
  CorpusReader reader(path);
  std::vector<Document> docs;
  while (auto doc = reader.next()) docs.push_back(std::move(*doc));
  return docs;
}

}  // namespace memoed
