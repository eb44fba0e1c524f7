#include "memoed/index.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <limits>

#include "csv.hpp"
#include "memoed/error.hpp"
#include "parallel.hpp"

namespace memoed {

namespace {

constexpr char kMagic[8] = {'M', 'E', 'M', 'O', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kBuildBatch = 2048;

struct AnalyzedDoc {
  std::vector<std::string> terms;
  std::vector<std::uint32_t> sentences;
};

AnalyzedDoc analyze(const Document& doc, const Tokenizer& tokenizer) {
  AnalyzedDoc out;
  const auto tokens = tokenizer.tokenize(doc.text);
  const auto sentences = split_sentences(doc.text);
  out.terms.reserve(tokens.size());
  out.sentences.reserve(tokens.size());
  std::size_t s = 0;
  for (const TokenSpan& t : tokens) {
    while (s + 1 < sentences.size() && sentences[s].byte_end <= t.byte_start) ++s;
    out.terms.push_back(fold_case(std::string_view(doc.text).substr(t.byte_start, t.byte_end - t.byte_start)));
    out.sentences.push_back(static_cast<std::uint32_t>(s));
  }
  return out;
}

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) fail(ErrorCode::kIo, "cannot open for writing: " + path.string());
  }
  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(b, 8);
  }
  void str(const std::string& s) {
    u64(s.size());
    bytes(s.data(), s.size());
  }
  template <typename T>
  void vec(const std::vector<T>& v) {
    u64(v.size());
    for (const T& x : v) {
      if constexpr (sizeof(T) == 8) {
        u64(x);
      } else {
        u32(x);
      }
    }
  }
  void finish(const std::filesystem::path& path) {
    out_.flush();
    if (!out_) fail(ErrorCode::kIo, "write failed: " + path.string());
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path) {
    if (!std::filesystem::exists(path)) fail(ErrorCode::kNotFound, "index file not found: " + path.string());
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::kIo, "cannot open index file: " + path.string());
    data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  void bytes(void* p, std::size_t n) {
    if (n > data_.size() - pos_) fail(ErrorCode::kFormat, "truncated index file: " + path_.string());
    std::memcpy(p, data_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::size_t length(std::size_t element_size) {
    const std::uint64_t n = u64();
    if (n > (data_.size() - pos_) / element_size) fail(ErrorCode::kFormat, "corrupt length in index file: " + path_.string());
    return static_cast<std::size_t>(n);
  }
  std::string str() {
    std::string s(length(1), '\0');
    bytes(s.data(), s.size());
    return s;
  }
  template <typename T>
  std::vector<T> vec() {
    std::vector<T> v(length(sizeof(T)));
    for (T& x : v) {
      if constexpr (sizeof(T) == 8) {
        x = u64();
      } else {
        x = u32();
      }
    }
    return v;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  std::filesystem::path path_;
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

std::string collapse_whitespace(std::string_view text, const Tokenizer& tokenizer) {
  // Rejoin the original slices between first and last token with single
  // spaces wherever the source had whitespace.
  const auto spans = tokenizer.tokenize(text);
  std::string out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i > 0 && spans[i].byte_start > spans[i - 1].byte_end) out.push_back(' ');
    out.append(text.substr(spans[i].byte_start, spans[i].byte_end - spans[i].byte_start));
  }
  return out;
}

}  // namespace

NgramQuery make_query(std::string_view text, const Tokenizer& tokenizer) {
  NgramQuery q;
  q.surface = fold_case(collapse_whitespace(text, tokenizer));
  for (const TokenSpan& t : tokenizer.tokenize(q.surface)) {
    q.terms.emplace_back(q.surface.substr(t.byte_start, t.byte_end - t.byte_start));
  }
  if (q.terms.empty()) fail(ErrorCode::kInvalidArgument, "empty n-gram query: \"" + std::string(text) + "\"");
  return q;
}

Index Index::build(std::span<const Document> docs, const IndexOptions& options, const Tokenizer& tokenizer) {
  if (options.max_ngram_len == 0) fail(ErrorCode::kInvalidArgument, "max_ngram_len must be positive");
  Index index;
  index.tokenizer_name_ = tokenizer.name();
  index.max_ngram_len_ = options.max_ngram_len;

  for (std::size_t begin = 0; begin < docs.size(); begin += kBuildBatch) {
    const std::size_t end = std::min(docs.size(), begin + kBuildBatch);
    std::vector<AnalyzedDoc> analyzed(end - begin);
    parallel_for(analyzed.size(), options.threads,
                 [&](std::size_t i) { analyzed[i] = analyze(docs[begin + i], tokenizer); });

    // Sequential merge keeps term ids and doc ordinals in corpus order.
    for (std::size_t i = 0; i < analyzed.size(); ++i) {
      const Document& doc = docs[begin + i];
      if (index.doc_ids_.size() >= std::numeric_limits<DocIndex>::max()) {
        fail(ErrorCode::kUnsupported, "too many documents for a single index");
      }
      if (!index.doc_lookup_.emplace(doc.id, static_cast<DocIndex>(index.doc_ids_.size())).second) {
        fail(ErrorCode::kFormat, "duplicate document id \"" + doc.id + "\"");
      }
      index.doc_ids_.push_back(doc.id);
      for (std::size_t t = 0; t < analyzed[i].terms.size(); ++t) {
        std::string& term = analyzed[i].terms[t];
        auto [it, inserted] = index.vocab_lookup_.try_emplace(term, static_cast<TermId>(index.vocab_.size()));
        if (inserted) index.vocab_.push_back(term);
        index.tokens_.push_back(it->second);
        index.sentences_.push_back(analyzed[i].sentences[t]);
      }
      index.token_offsets_.push_back(index.tokens_.size());
    }
  }
  index.finalize_postings();
  return index;
}

Index Index::build(CorpusReader& reader, const IndexOptions& options, const Tokenizer& tokenizer) {
  std::vector<Document> docs;
  while (auto doc = reader.next()) docs.push_back(std::move(*doc));
  return build(docs, options, tokenizer);
}

void Index::finalize_postings() {
  const std::size_t vocab_size = vocab_.size();
  posting_offsets_.assign(vocab_size + 1, 0);
  for (TermId t : tokens_) ++posting_offsets_[t + 1];
  for (std::size_t t = 0; t < vocab_size; ++t) posting_offsets_[t + 1] += posting_offsets_[t];

  posting_docs_.resize(tokens_.size());
  posting_positions_.resize(tokens_.size());
  std::vector<std::uint64_t> cursor(posting_offsets_.begin(), posting_offsets_.end() - 1);
  for (DocIndex d = 0; d < doc_ids_.size(); ++d) {
    const std::uint64_t base = token_offsets_[d];
    for (std::uint64_t i = base; i < token_offsets_[d + 1]; ++i) {
      const std::uint64_t slot = cursor[tokens_[i]]++;
      posting_docs_[slot] = d;
      posting_positions_[slot] = static_cast<std::uint32_t>(i - base);
    }
  }
}

void Index::rebuild_lookup() {
  vocab_lookup_.clear();
  vocab_lookup_.reserve(vocab_.size());
  for (TermId t = 0; t < vocab_.size(); ++t) vocab_lookup_.emplace(vocab_[t], t);
  doc_lookup_.clear();
  doc_lookup_.reserve(doc_ids_.size());
  for (DocIndex d = 0; d < doc_ids_.size(); ++d) doc_lookup_.emplace(doc_ids_[d], d);
}

void Index::save(const std::filesystem::path& path) const {
  Writer w(path);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kFormatVersion);
  w.str(tokenizer_name_);
  w.u64(max_ngram_len_);
  w.u64(vocab_.size());
  for (const auto& t : vocab_) w.str(t);
  w.u64(doc_ids_.size());
  for (const auto& id : doc_ids_) w.str(id);
  w.vec(token_offsets_);
  w.vec(tokens_);
  w.vec(sentences_);
  w.vec(posting_offsets_);
  w.vec(posting_docs_);
  w.vec(posting_positions_);
  w.finish(path);
}

Index Index::load(const std::filesystem::path& path) {
  Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCode::kFormat, "not an index file: " + path.string());
  }
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    fail(ErrorCode::kFormat, "unsupported index format version " + std::to_string(version) + " in " + path.string());
  }
  Index index;
  index.tokenizer_name_ = r.str();
  index.max_ngram_len_ = r.u64();
  index.vocab_.resize(r.length(8));
  for (auto& t : index.vocab_) t = r.str();
  index.doc_ids_.resize(r.length(8));
  for (auto& id : index.doc_ids_) id = r.str();
  index.token_offsets_ = r.vec<std::uint64_t>();
  index.tokens_ = r.vec<TermId>();
  index.sentences_ = r.vec<std::uint32_t>();
  index.posting_offsets_ = r.vec<std::uint64_t>();
  index.posting_docs_ = r.vec<DocIndex>();
  index.posting_positions_ = r.vec<std::uint32_t>();
  if (!r.at_end() || index.token_offsets_.size() != index.doc_ids_.size() + 1 ||
      index.token_offsets_.back() != index.tokens_.size() || index.sentences_.size() != index.tokens_.size() ||
      index.posting_offsets_.size() != index.vocab_.size() + 1 || index.posting_docs_.size() != index.tokens_.size() ||
      index.posting_positions_.size() != index.tokens_.size()) {
    fail(ErrorCode::kFormat, "inconsistent index file: " + path.string());
  }
  index.rebuild_lookup();
  return index;
}

std::optional<DocIndex> Index::find_doc(std::string_view id) const {
  auto it = doc_lookup_.find(std::string(id));
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::span<const TermId> Index::doc_terms(DocIndex doc) const {
  const auto begin = token_offsets_.at(doc);
  return std::span<const TermId>(tokens_).subspan(begin, token_offsets_[doc + 1] - begin);
}

std::span<const std::uint32_t> Index::doc_sentences(DocIndex doc) const {
  const auto begin = token_offsets_.at(doc);
  return std::span<const std::uint32_t>(sentences_).subspan(begin, token_offsets_[doc + 1] - begin);
}

std::optional<TermId> Index::term_id(std::string_view term) const {
  auto it = vocab_lookup_.find(std::string(term));
  if (it == vocab_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::vector<TermId>> Index::resolve(const NgramQuery& query) const {
  if (query.token_len() == 0) fail(ErrorCode::kInvalidArgument, "empty n-gram query");
  if (query.token_len() > max_ngram_len_) {
    fail(ErrorCode::kUnsupported, "n-gram \"" + query.surface + "\" has " + std::to_string(query.token_len()) +
                                      " tokens; index supports at most " + std::to_string(max_ngram_len_));
  }
  std::vector<TermId> ids;
  ids.reserve(query.terms.size());
  for (const auto& term : query.terms) {
    auto id = term_id(term);
    if (!id) return std::nullopt;
    ids.push_back(*id);
  }
  return ids;
}

bool Index::phrase_at(DocIndex doc, std::uint32_t start, std::span<const TermId> phrase) const {
  const auto terms = doc_terms(doc);
  if (start + phrase.size() > terms.size()) return false;
  return std::equal(phrase.begin(), phrase.end(), terms.begin() + start);
}

std::vector<Index::Match> Index::matches(std::span<const TermId> phrase) const {
  std::size_t pivot = 0;
  for (std::size_t i = 1; i < phrase.size(); ++i) {
    const auto size = [&](TermId t) { return posting_offsets_[t + 1] - posting_offsets_[t]; };
    if (size(phrase[i]) < size(phrase[pivot])) pivot = i;
  }
  const TermId t = phrase[pivot];
  std::vector<Match> out;
  for (std::uint64_t i = posting_offsets_[t]; i < posting_offsets_[t + 1]; ++i) {
    const std::uint32_t pos = posting_positions_[i];
    if (pos < pivot) continue;
    const auto start = static_cast<std::uint32_t>(pos - pivot);
    if (phrase.size() == 1 || phrase_at(posting_docs_[i], start, phrase)) out.push_back({posting_docs_[i], start});
  }
  return out;
}

PostingList Index::postings(const NgramQuery& query) const {
  PostingList list{query, {}};
  auto phrase = resolve(query);
  if (!phrase) return list;
  for (const Match& m : matches(*phrase)) {
    if (list.entries.empty() || list.entries.back().doc != m.doc) list.entries.push_back({m.doc, {}});
    list.entries.back().positions.push_back(m.start);
  }
  return list;
}

std::vector<std::uint32_t> Index::positions_in(DocIndex doc, std::span<const TermId> phrase) const {
  std::vector<std::uint32_t> out;
  if (phrase.empty()) return out;
  std::size_t pivot = 0;
  const TermId t = phrase[pivot];
  const auto first = posting_docs_.begin() + static_cast<std::ptrdiff_t>(posting_offsets_[t]);
  const auto last = posting_docs_.begin() + static_cast<std::ptrdiff_t>(posting_offsets_[t + 1]);
  auto it = std::lower_bound(first, last, doc);
  for (; it != last && *it == doc; ++it) {
    const std::uint32_t pos = posting_positions_[static_cast<std::size_t>(it - posting_docs_.begin())];
    if (phrase.size() == 1 || phrase_at(doc, pos, phrase)) out.push_back(pos);
  }
  return out;
}

std::vector<std::uint32_t> Index::positions_in(DocIndex doc, const NgramQuery& query) const {
  auto phrase = resolve(query);
  if (!phrase) return {};
  return positions_in(doc, *phrase);
}

std::vector<DocIndex> Index::docs_containing(const NgramQuery& query) const {
  std::vector<DocIndex> out;
  auto phrase = resolve(query);
  if (!phrase) return out;
  for (const Match& m : matches(*phrase)) {
    if (out.empty() || out.back() != m.doc) out.push_back(m.doc);
  }
  return out;
}

std::vector<DocIndex> Index::cooccurrence_docs(const NgramQuery& a, const NgramQuery& b) const {
  const auto da = docs_containing(a);
  const auto db = docs_containing(b);
  std::vector<DocIndex> out;
  std::set_intersection(da.begin(), da.end(), db.begin(), db.end(), std::back_inserter(out));
  return out;
}

CountRecord Index::count(const NgramQuery& query) const {
  CountRecord rec{query.surface, 0, 0};
  auto phrase = resolve(query);
  if (!phrase) return rec;
  DocIndex last = std::numeric_limits<DocIndex>::max();
  for (const Match& m : matches(*phrase)) {
    ++rec.total_occurrences;
    if (m.doc != last) {
      ++rec.doc_freq;
      last = m.doc;
    }
  }
  return rec;
}

namespace {

std::uint64_t parse_count(const std::string& s, const char* column, const std::string& where) {
  if (!s.empty() && s[0] == '-') fail(ErrorCode::kFormat, where + "negative " + column);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(ErrorCode::kFormat, where + "invalid " + column + " \"" + s + "\"");
  }
  return v;
}

}  // namespace

std::map<std::string, CountRecord> import_external_counts(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kNotFound, "external counts file not found: " + path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open external counts file: " + path.string());
  std::map<std::string, CountRecord> out;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string where = path.string() + ": row " + std::to_string(row) + ": ";
    if (row == 1) {
      if (line != "ngram,doc_freq,total_occurrences") {
        fail(ErrorCode::kFormat, where + "expected header ngram,doc_freq,total_occurrences");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = csv::split_row(line, where);
    if (fields.size() != 3) fail(ErrorCode::kFormat, where + "expected 3 columns, got " + std::to_string(fields.size()));
    CountRecord rec;
    try {
      rec.ngram = make_query(fields[0]).surface;
    } catch (const Error&) {
      fail(ErrorCode::kFormat, where + "empty ngram");
    }
    rec.doc_freq = parse_count(fields[1], "doc_freq", where);
    rec.total_occurrences = parse_count(fields[2], "total_occurrences", where);
    if (rec.doc_freq > rec.total_occurrences) {
      fail(ErrorCode::kFormat, where + "doc_freq exceeds total_occurrences");
    }
    out[rec.ngram] = rec;
  }
  if (row == 0) fail(ErrorCode::kFormat, path.string() + ": missing header row");
  return out;
}

}  // namespace memoed
