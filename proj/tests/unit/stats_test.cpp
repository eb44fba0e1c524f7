#include "memoed/stats.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "memoed/error.hpp"
#include "support.hpp"

namespace memoed {
namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, int levels) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng() % static_cast<std::uint64_t>(levels));
  return v;
}

bool constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

TEST(AverageRanks, TiesShareTheMeanRank) {
  const std::vector<double> v = {10, 20, 10, 30, 20, 10};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{2, 4.5, 2, 6, 4.5, 2}));
  EXPECT_EQ(average_ranks(v), testing::counting_ranks(v));
}

TEST(Correlation, SmallExamples) {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> up = {10, 20, 30};
  const std::vector<double> down = {30, 20, 10};
  EXPECT_DOUBLE_EQ(spearman(x, up), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(x, up), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, down), -1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(x, down), -1.0);
  const std::vector<double> swapped = {2, 1, 3};
  EXPECT_NEAR(kendall_tau(x, swapped), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(spearman(x, swapped), 0.5, 1e-15);
}

TEST(Correlation, MatchesPairwiseOraclesWithTies) {
  std::mt19937_64 rng(101);
  int checked = 0;
  for (int iter = 0; iter < 400; ++iter) {
    const std::size_t n = 2 + rng() % 60;
    const int levels = 2 + static_cast<int>(rng() % 12);
    const auto x = random_vector(rng, n, levels);
    const auto y = random_vector(rng, n, levels);
    if (constant(x) || constant(y)) continue;
    EXPECT_NEAR(spearman(x, y), testing::oracle_spearman(x, y), 1e-12);
    EXPECT_NEAR(kendall_tau(x, y), testing::oracle_kendall(x, y), 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 300);
}

TEST(Correlation, SymmetricAndMonotoneInvariant) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<double> x(40), y(40);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = std::round(u(rng));
    std::vector<double> fx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) fx[i] = std::exp(x[i]) + 3.0;
    EXPECT_NEAR(spearman(x, y), spearman(y, x), 1e-12);
    EXPECT_NEAR(kendall_tau(x, y), kendall_tau(y, x), 1e-12);
    EXPECT_NEAR(spearman(fx, y), spearman(x, y), 1e-12);
    EXPECT_NEAR(kendall_tau(fx, y), kendall_tau(x, y), 1e-12);
    const double rho = spearman(x, y);
    EXPECT_LE(std::abs(rho), 1.0);
  }
}

TEST(Correlation, RejectsDegenerateInput) {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {1, 2};
  const std::vector<double> one = {1};
  const std::vector<double> flat = {4, 4, 4};
  EXPECT_THROW(spearman(a, b), Error);
  EXPECT_THROW(kendall_tau(one, one), Error);
  EXPECT_THROW(spearman(a, flat), Error);
  EXPECT_THROW(kendall_tau(flat, a), Error);
  const std::vector<double> nan = {1, std::nan(""), 3};
  EXPECT_THROW(spearman(a, nan), Error);
}

TEST(Dashboard, FractionsPerCultureAndTopic) {
  const std::vector<GenerationRecord> gens = {
      {"g1", "Japan", "food", {"sushi", "rice", "rice"}},
      {"g2", "Japan", "food", {"sushi"}},
      {"g3", "Peru", "food", {"ceviche"}},
      {"g4", "Peru", "clothing", {}},
  };
  const std::vector<AssociationLabel> labels = {
      {"Japan", "food", "sushi", AssociationKind::kMemorized, "zscore", 3.0},
      {"Japan", "food", "rice", AssociationKind::kDiffuse, "", 5.0},
      {"Peru", "food", "ceviche", AssociationKind::kUnclassified, "", std::nullopt},
  };
  const auto d = build_dashboard(labels, gens);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].culture, "Japan");
  EXPECT_EQ(d[0].n_responses, 4u);
  EXPECT_DOUBLE_EQ(d[0].fraction(AssociationKind::kMemorized), 0.5);
  EXPECT_DOUBLE_EQ(d[0].fraction(AssociationKind::kDiffuse), 0.5);
  EXPECT_EQ(d[1].culture, "Peru");
  EXPECT_DOUBLE_EQ(d[1].fraction(AssociationKind::kUnclassified), 1.0);
  for (const auto& row : d) {
    double sum = 0;
    for (double f : row.fractions) sum += f;
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Dashboard, UnlabeledPairIsAStateError) {
  const std::vector<GenerationRecord> gens = {{"g1", "Japan", "food", {"sushi"}}};
  try {
    build_dashboard({}, gens);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kState);
  }
}

TEST(MemorizationFrequency, MatchesByCulture) {
  const std::map<std::string, double> memorized = {{"A", 5}, {"B", 3}, {"C", 1}};
  const std::map<std::string, double> docs = {{"A", 100}, {"B", 50}, {"C", 10}};
  const auto r = correlate_memorization_frequency(memorized, docs);
  EXPECT_DOUBLE_EQ(r.spearman_rho, 1.0);
  EXPECT_DOUBLE_EQ(r.kendall_tau, 1.0);
  EXPECT_EQ(r.n, 3u);
  EXPECT_THROW(correlate_memorization_frequency({{"A", 1}}, {{"A", 2}}), Error);
  EXPECT_THROW(correlate_memorization_frequency(memorized, {{"A", 1}, {"B", 2}, {"D", 3}}), Error);
}

TEST(CultureDocumentCounts, TopicKeywordsFilterDocuments) {
  std::vector<Document> docs = {
      {"a", "Japan serves rice.", ""},
      {"b", "Japan and Peru play football.", ""},
      {"c", "Peru rice and beans.", ""},
  };
  const Index index = Index::build(docs);
  const CultureLexicon lex({{"Japan", {"japan"}}, {"Peru", {"peru"}}});
  const DocumentClassifier classifier(index, lex, RelevanceConfig{});
  EXPECT_EQ(culture_document_counts(classifier), (std::vector<std::size_t>{2, 2}));
  const std::vector<std::string> food = {"rice", "beans"};
  EXPECT_EQ(culture_document_counts(classifier, &food), (std::vector<std::size_t>{1, 1}));
}

}  // namespace
}  // namespace memoed
