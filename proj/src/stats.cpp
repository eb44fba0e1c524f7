#include "memoed/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <tuple>

#include "memoed/error.hpp"

namespace memoed {

namespace {

void check_inputs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::kInvalidArgument, "correlation inputs differ in length (" + std::to_string(x.size()) + " vs " +
                                          std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) fail(ErrorCode::kInvalidArgument, "correlation needs at least 2 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      fail(ErrorCode::kInvalidArgument, "correlation input contains a non-finite value");
    }
  }
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x)) fail(ErrorCode::kInvalidArgument, "first correlation input is constant");
  if (constant(y)) fail(ErrorCode::kInvalidArgument, "second correlation input is constant");
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

// Pairs of equal adjacent elements in a sorted range, as sum t(t-1)/2.
template <typename It, typename Eq>
std::uint64_t tied_pairs(It first, It last, Eq eq) {
  std::uint64_t total = 0;
  while (first != last) {
    It run = first;
    std::uint64_t t = 0;
    while (run != last && eq(*run, *first)) {
      ++run;
      ++t;
    }
    total += t * (t - 1) / 2;
    first = run;
  }
  return total;
}

// Stable merge sort of v; returns the number of strictly inverted pairs.
std::uint64_t sort_counting_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = sort_counting_swaps(v, buf, lo, mid) + sort_counting_swaps(v, buf, mid, hi);
  std::size_t i = lo;
  std::size_t j = mid;
  std::size_t k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  return pearson(average_ranks(x), average_ranks(y));
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> pairs(n);
  for (std::size_t i = 0; i < n; ++i) pairs[i] = {x[i], y[i]};
  std::sort(pairs.begin(), pairs.end());

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t n1 = tied_pairs(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first == b.first; });
  const std::uint64_t n3 = tied_pairs(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a == b; });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = pairs[i].second;
  std::vector<double> buf(n);
  const std::uint64_t swaps = sort_counting_swaps(ys, buf, 0, n);
  const std::uint64_t n2 = tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  const double numerator = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                           static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
  const double denominator = std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));
  return std::clamp(numerator / denominator, -1.0, 1.0);
}

CorrelationResult correlate(std::span<const double> x, std::span<const double> y) {
  return {spearman(x, y), kendall_tau(x, y), x.size()};
}

std::vector<CultureDashboard> build_dashboard(const std::vector<AssociationLabel>& labels,
                                              const std::vector<GenerationRecord>& generations) {
  std::map<std::tuple<std::string, std::string, std::string>, AssociationKind> kind_of;
  for (const auto& l : labels) kind_of[{l.culture, l.topic, l.symbol}] = l.kind;

  std::map<std::pair<std::string, std::string>, std::array<std::size_t, kAllAssociationKinds.size()>> counts;
  for (const auto& g : generations) {
    auto& row = counts[{g.culture, g.topic}];
    for (const auto& s : g.symbols) {
      auto it = kind_of.find({g.culture, g.topic, s});
      if (it == kind_of.end()) {
        fail(ErrorCode::kState,
             "unlabeled pair (" + g.culture + ", " + g.topic + ", " + s + ") in generation " + g.generation_id);
      }
      ++row[static_cast<std::size_t>(it->second)];
    }
  }

  std::vector<CultureDashboard> out;
  for (const auto& [key, row] : counts) {
    CultureDashboard d;
    d.culture = key.first;
    d.topic = key.second;
    d.n_responses = std::accumulate(row.begin(), row.end(), std::size_t{0});
    if (d.n_responses == 0) continue;
    for (std::size_t k = 0; k < row.size(); ++k) {
      d.fractions[k] = static_cast<double>(row[k]) / static_cast<double>(d.n_responses);
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<std::size_t> culture_document_counts(const DocumentClassifier& classifier,
                                                 const std::vector<std::string>* topic_keywords) {
  const CultureLexicon& lexicon = classifier.lexicon();
  std::vector<DocIndex> topical;
  if (topic_keywords != nullptr) {
    for (const auto& kw : *topic_keywords) {
      const auto docs = classifier.index().docs_containing(make_query(kw));
      std::vector<DocIndex> merged;
      std::set_union(topical.begin(), topical.end(), docs.begin(), docs.end(), std::back_inserter(merged));
      topical = std::move(merged);
    }
  }
  std::vector<std::size_t> out(lexicon.size());
  for (std::size_t c = 0; c < lexicon.size(); ++c) {
    const auto& docs = classifier.docs_mentioning(c);
    if (topic_keywords == nullptr) {
      out[c] = docs.size();
    } else {
      std::vector<DocIndex> both;
      std::set_intersection(docs.begin(), docs.end(), topical.begin(), topical.end(), std::back_inserter(both));
      out[c] = both.size();
    }
  }
  return out;
}

CorrelationResult correlate_memorization_frequency(const std::map<std::string, double>& memorized_counts,
                                                   const std::map<std::string, double>& document_counts) {
  if (memorized_counts.size() < 2) {
    fail(ErrorCode::kInvalidArgument,
         "correlation needs at least 2 cultures, got " + std::to_string(memorized_counts.size()));
  }
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& [culture, m] : memorized_counts) {
    auto it = document_counts.find(culture);
    if (it == document_counts.end()) fail(ErrorCode::kInvalidArgument, "no document count for culture \"" + culture + "\"");
    x.push_back(m);
    y.push_back(it->second);
  }
  if (document_counts.size() != memorized_counts.size()) {
    fail(ErrorCode::kInvalidArgument, "memorized and document counts cover different cultures");
  }
  return correlate(x, y);
}

}  // namespace memoed
