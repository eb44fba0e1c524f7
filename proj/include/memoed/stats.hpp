#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "memoed/associations.hpp"

namespace memoed {

/// Spearman's rho: Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

/// Kendall's tau-b, O(n log n) via merge-sort inversion counting.
double kendall_tau(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

struct CorrelationResult {
  double spearman_rho = 0.0;
  double kendall_tau = 0.0;
  std::size_t n = 0;
};

CorrelationResult correlate(std::span<const double> x, std::span<const double> y);

struct CultureDashboard {
  std::string culture;
  std::string topic;
  std::array<double, kAllAssociationKinds.size()> fractions{};  // indexed like kAllAssociationKinds
  std::size_t n_responses = 0;

  double fraction(AssociationKind kind) const { return fractions[static_cast<std::size_t>(kind)]; }
};

/// Every symbol occurrence in every generation counts once toward the label of
/// its (culture, topic, symbol) pair. Sorted by (culture, topic).
std::vector<CultureDashboard> build_dashboard(const std::vector<AssociationLabel>& labels,
                                              const std::vector<GenerationRecord>& generations);

/// Documents mentioning each culture; with `topic_keywords`, only documents
/// that also contain at least one keyword count.
std::vector<std::size_t> culture_document_counts(const DocumentClassifier& classifier,
                                                 const std::vector<std::string>* topic_keywords = nullptr);

/// Per-culture memorized-symbol counts against per-culture document counts.
/// Cultures are matched by name; both maps must cover the same cultures.
CorrelationResult correlate_memorization_frequency(const std::map<std::string, double>& memorized_counts,
                                                   const std::map<std::string, double>& document_counts);

}  // namespace memoed
