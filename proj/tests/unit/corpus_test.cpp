#include "memoed/corpus.hpp"

#include <gtest/gtest.h>

#include <random>

#include "memoed/error.hpp"
#include "support.hpp"

namespace memoed {
namespace {

using testing::TempDir;
using testing::write_file;

std::vector<std::string> token_texts(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text)) out.emplace_back(text.substr(t.byte_start, t.byte_end - t.byte_start));
  return out;
}

TEST(Tokenize, SplitsWhitespaceAndPunctuation) {
  EXPECT_EQ(token_texts("Hello, world!"), (std::vector<std::string>{"Hello", ",", "world", "!"}));
  EXPECT_EQ(token_texts("  a\tb\n\nc  "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(token_texts("wrapped-front"), (std::vector<std::string>{"wrapped", "-", "front"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \n\t ").empty());
}

TEST(Tokenize, OffsetsAreByteExact) {
  const std::string text = "caf\xC3\xA9 \xC2\xABok\xC2\xBB";  // "café «ok»"
  const auto spans = tokenize(text);
  ASSERT_EQ(spans.size(), 4u);
  EXPECT_EQ(spans[0], (TokenSpan{0, 0, 5}));
  EXPECT_EQ(spans[1], (TokenSpan{1, 6, 8}));
  EXPECT_EQ(spans[2], (TokenSpan{2, 8, 10}));
  EXPECT_EQ(spans[3], (TokenSpan{3, 10, 12}));
}

TEST(Tokenize, InvalidUtf8IsKeptAsWordBytes) {
  const std::string text = "ab\xFF\xFE cd";
  EXPECT_EQ(token_texts(text), (std::vector<std::string>{"ab\xFF\xFE", "cd"}));
}

TEST(Tokenize, SpansAreOrderedAndDisjoint) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "ab ,.!?\n\t-'\xC3\xA9";
  for (int iter = 0; iter < 300; ++iter) {
    std::string text;
    const auto len = rng() % 60;
    for (std::size_t i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
    const auto spans = tokenize(text);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      EXPECT_EQ(spans[i].token_index, i);
      EXPECT_LT(spans[i].byte_start, spans[i].byte_end);
      if (i > 0) EXPECT_LE(spans[i - 1].byte_end, spans[i].byte_start);
    }
  }
}

TEST(SplitSentences, DelimiterRunsCloseOneSentence) {
  const std::string text = "One two. Three?! Four\nFive";
  const auto s = split_sentences(text);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(text.substr(s[0].byte_start, s[0].byte_end - s[0].byte_start), "One two.");
  EXPECT_EQ(text.substr(s[1].byte_start, s[1].byte_end - s[1].byte_start), "Three?!");
  EXPECT_EQ(text.substr(s[2].byte_start, s[2].byte_end - s[2].byte_start), "Four");
  EXPECT_EQ(text.substr(s[3].byte_start, s[3].byte_end - s[3].byte_start), "Five");
}

TEST(SplitSentences, NoEmptySentences) {
  EXPECT_TRUE(split_sentences("").empty());
  EXPECT_TRUE(split_sentences("  \n ").empty());
  const auto s = split_sentences("a. . .\n\n b");
  ASSERT_EQ(s.size(), 2u);
  for (const auto& span : s) EXPECT_LT(span.byte_start, span.byte_end);
}

TEST(FoldCase, LowercasesAsciiAndUnicode) {
  EXPECT_EQ(fold_case("JaPaN"), "japan");
  EXPECT_EQ(fold_case("\xC3\x89TUDE"), "\xC3\xA9tude");  // ÉTUDE
  EXPECT_EQ(fold_case("already lower"), "already lower");
}

TEST(PunctuationToken, AllCodePointsMustBePunctuation) {
  EXPECT_TRUE(is_punctuation_token(","));
  EXPECT_TRUE(is_punctuation_token("\xC2\xAB"));
  EXPECT_FALSE(is_punctuation_token("a,"));
  EXPECT_FALSE(is_punctuation_token(""));
}

TEST(CorpusReader, StreamsDocumentsAndSkipsBlankLines) {
  TempDir dir;
  write_file(dir / "c.jsonl",
             "{\"id\":\"a\",\"text\":\"first doc\"}\n\n{\"id\":\"b\",\"text\":\"second\",\"source\":\"web\"}\n");
  CorpusReader reader(dir / "c.jsonl");
  auto a = reader.next();
  ASSERT_TRUE(a);
  EXPECT_EQ(a->id, "a");
  auto b = reader.next();
  ASSERT_TRUE(b);
  EXPECT_EQ(b->source, "web");
  EXPECT_FALSE(reader.next());
}

void expect_corpus_error(const std::string& content, const std::string& needle) {
  TempDir dir;
  write_file(dir / "c.jsonl", content);
  try {
    ingest_corpus(dir / "c.jsonl");
    FAIL() << "expected an error containing " << needle;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

TEST(CorpusReader, ReportsLineNumbers) {
  expect_corpus_error("{\"id\":\"a\",\"text\":\"x\"}\n{broken\n", ":2: malformed JSON");
  expect_corpus_error("{\"text\":\"x\"}\n", ":1: missing string field \"id\"");
  expect_corpus_error("{\"id\":\"a\"}\n", "missing string field \"text\"");
  expect_corpus_error("{\"id\":\"a\",\"text\":\"  \"}\n", "blank text");
  expect_corpus_error("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}\n", ":2: duplicate document id \"a\"");
}

TEST(CorpusReader, MissingFileIsNotFound) {
  try {
    ingest_corpus("/nonexistent/corpus.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

}  // namespace
}  // namespace memoed
