#include "memoed/index.hpp"

#include <gtest/gtest.h>

#include <random>

#include "memoed/error.hpp"
#include "support.hpp"

namespace memoed {
namespace {

using testing::TempDir;
using testing::write_file;

std::vector<Document> random_docs(std::mt19937_64& rng, std::size_t n, std::size_t max_tokens) {
  static const std::vector<std::string> words = {"a", "b", "c", "d", "rice", "japan", ".", ",", "!"};
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    const std::size_t len = 1 + rng() % max_tokens;
    for (std::size_t t = 0; t < len; ++t) text += words[rng() % words.size()] + " ";
    docs.push_back({"d" + std::to_string(i), text, ""});
  }
  return docs;
}

std::vector<std::string> folded_tokens(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text)) out.push_back(fold_case(text.substr(t.byte_start, t.byte_end - t.byte_start)));
  return out;
}

TEST(MakeQuery, NormalizesCaseAndWhitespace) {
  const auto q = make_query("  South   KOREA ");
  EXPECT_EQ(q.surface, "south korea");
  EXPECT_EQ(q.terms, (std::vector<std::string>{"south", "korea"}));
  EXPECT_EQ(make_query("wrapped-front").terms.size(), 3u);
  EXPECT_THROW(make_query("   "), Error);
}

TEST(Index, CountsOverlappingMatches) {
  std::vector<Document> docs = {{"x", "a a a. b", ""}, {"y", "A a", ""}, {"z", "b", ""}};
  const Index index = Index::build(docs);
  EXPECT_EQ(index.doc_count(), 3u);
  const auto rec = index.count(make_query("a a"));
  EXPECT_EQ(rec.doc_freq, 2u);
  EXPECT_EQ(rec.total_occurrences, 3u);
  EXPECT_EQ(index.count(make_query("never seen")).total_occurrences, 0u);
  EXPECT_EQ(index.docs_containing(make_query("b")), (std::vector<DocIndex>{0, 2}));
  EXPECT_EQ(index.cooccurrence_docs(make_query("a"), make_query("b")), (std::vector<DocIndex>{0}));
}

TEST(Index, MatchesNaiveScan) {
  std::mt19937_64 rng(5);
  const auto docs = random_docs(rng, 60, 80);
  const Index index = Index::build(docs, IndexOptions{8, 3});
  const std::vector<std::string> probes = {"a", "a b", "rice .", "japan , a", "b b b", "d ! d", "c"};
  for (const auto& p : probes) {
    const auto q = make_query(p);
    std::uint64_t total = 0;
    std::vector<DocIndex> containing;
    for (DocIndex d = 0; d < docs.size(); ++d) {
      const auto occ = testing::naive_occurrences(folded_tokens(docs[d].text), q.terms);
      std::vector<std::uint32_t> starts;
      for (const auto& o : occ) starts.push_back(o.first);
      EXPECT_EQ(index.positions_in(d, q), starts) << p << " in doc " << d;
      total += occ.size();
      if (!occ.empty()) containing.push_back(d);
    }
    EXPECT_EQ(index.count(q).total_occurrences, total) << p;
    EXPECT_EQ(index.count(q).doc_freq, containing.size()) << p;
    EXPECT_EQ(index.docs_containing(q), containing) << p;
  }
}

TEST(Index, BuildIsIndependentOfThreadCount) {
  std::mt19937_64 rng(9);
  const auto docs = random_docs(rng, 3000, 20);
  const Index one = Index::build(docs, IndexOptions{8, 1});
  const Index many = Index::build(docs, IndexOptions{8, 4});
  EXPECT_EQ(one.vocabulary_size(), many.vocabulary_size());
  for (TermId t = 0; t < one.vocabulary_size(); ++t) EXPECT_EQ(one.term(t), many.term(t));
  for (DocIndex d = 0; d < docs.size(); d += 97) {
    EXPECT_TRUE(std::ranges::equal(one.doc_terms(d), many.doc_terms(d)));
  }
}

TEST(Index, RejectsQueriesLongerThanLimit) {
  std::vector<Document> docs = {{"x", "a b c d", ""}};
  const Index index = Index::build(docs, IndexOptions{3, 1});
  EXPECT_NO_THROW(index.count(make_query("a b c")));
  try {
    index.count(make_query("a b c d"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnsupported);
  }
}

TEST(Index, SaveLoadRoundTrip) {
  TempDir dir;
  std::vector<Document> docs = {{"x", "Japanese kimono. Silk!", ""}, {"y", "kimono and sushi", ""}};
  const Index built = Index::build(docs);
  built.save(dir / "i.bin");
  const Index loaded = Index::load(dir / "i.bin");
  EXPECT_EQ(loaded.doc_count(), 2u);
  EXPECT_EQ(loaded.token_count(), built.token_count());
  EXPECT_EQ(loaded.doc_id(1), "y");
  EXPECT_EQ(loaded.find_doc("x"), std::optional<DocIndex>(0));
  EXPECT_EQ(loaded.tokenizer_name(), built.tokenizer_name());
  EXPECT_EQ(loaded.count(make_query("kimono")), built.count(make_query("kimono")));
  EXPECT_TRUE(std::ranges::equal(loaded.doc_sentences(0), built.doc_sentences(0)));
}

TEST(Index, LoadRejectsForeignAndTruncatedFiles) {
  TempDir dir;
  write_file(dir / "bad.bin", "not an index at all");
  try {
    Index::load(dir / "bad.bin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
  std::vector<Document> docs = {{"x", "a b c", ""}};
  Index::build(docs).save(dir / "ok.bin");
  const std::string full = testing::read_file(dir / "ok.bin");
  write_file(dir / "cut.bin", full.substr(0, full.size() / 2));
  EXPECT_THROW(Index::load(dir / "cut.bin"), Error);
  EXPECT_THROW(Index::load(dir / "missing.bin"), Error);
}

TEST(Index, SentenceOrdinalsFollowSplitter) {
  std::vector<Document> docs = {{"x", "a b. c! d\ne", ""}};
  const Index index = Index::build(docs);
  const auto s = index.doc_sentences(0);
  // a b . | c ! | d | e
  EXPECT_EQ(std::vector<std::uint32_t>(s.begin(), s.end()), (std::vector<std::uint32_t>{0, 0, 0, 1, 1, 2, 3}));
}

TEST(ExternalCounts, ParsesQuotedFieldsAndNormalizesKeys) {
  TempDir dir;
  write_file(dir / "c.csv", "ngram,doc_freq,total_occurrences\n\"Fried  Rice\",3,10\nsushi,1,1\n");
  const auto counts = import_external_counts(dir / "c.csv");
  ASSERT_EQ(counts.size(), 2u);
  EXPECT_EQ(counts.at("fried rice").total_occurrences, 10u);
  EXPECT_EQ(counts.at("sushi").doc_freq, 1u);
}

TEST(ExternalCounts, RejectsBadRows) {
  TempDir dir;
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"ngram,df,total\n", "header"},
      {"ngram,doc_freq,total_occurrences\na,1\n", "row 2"},
      {"ngram,doc_freq,total_occurrences\na,1,2,3\n", "row 2"},
      {"ngram,doc_freq,total_occurrences\na,-1,2\n", "negative"},
      {"ngram,doc_freq,total_occurrences\na,x,2\n", "row 2"},
      {"ngram,doc_freq,total_occurrences\na,5,2\n", "row 2"},
  };
  for (const auto& [content, needle] : cases) {
    write_file(dir / "c.csv", content);
    try {
      import_external_counts(dir / "c.csv");
      FAIL() << content;
    } catch (const Error& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  }
}

}  // namespace
}  // namespace memoed
