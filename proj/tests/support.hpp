#pragma once

#include <stdlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "memoed/relevance.hpp"

namespace memoed::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "memoed-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Every start position where `phrase` matches `tokens`, by direct comparison.
inline std::vector<Occurrence> naive_occurrences(const std::vector<std::string>& tokens,
                                                 const std::vector<std::string>& phrase) {
  std::vector<Occurrence> out;
  if (phrase.empty() || phrase.size() > tokens.size()) return out;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
      out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + phrase.size() - 1)});
    }
  }
  return out;
}

// Minimum |i - j| over every token i of an occurrence in `a` and every token j
// of an occurrence in `b`.
inline std::optional<std::size_t> oracle_token_distance(const std::vector<Occurrence>& a,
                                                        const std::vector<Occurrence>& b) {
  std::optional<std::size_t> best;
  for (const auto& x : a) {
    for (const auto& y : b) {
      for (std::uint32_t i = x.first; i <= x.last; ++i) {
        for (std::uint32_t j = y.first; j <= y.last; ++j) {
          const std::size_t d = i > j ? i - j : j - i;
          if (!best || d < *best) best = d;
        }
      }
    }
  }
  return best;
}

inline std::optional<std::size_t> oracle_sentence_distance(const std::vector<Occurrence>& a,
                                                           const std::vector<Occurrence>& b,
                                                           const std::vector<std::uint32_t>& sentence_of) {
  std::optional<std::size_t> best;
  for (const auto& x : a) {
    for (const auto& y : b) {
      for (std::uint32_t i = x.first; i <= x.last; ++i) {
        for (std::uint32_t j = y.first; j <= y.last; ++j) {
          const std::uint32_t si = sentence_of[i];
          const std::uint32_t sj = sentence_of[j];
          const std::size_t d = si > sj ? si - sj : sj - si;
          if (!best || d < *best) best = d;
        }
      }
    }
  }
  return best;
}

// Rank of v[i] = 1 + (#values below) + (#other equal values) / 2.
inline std::vector<double> counting_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double below = 0;
    double equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) below += 1;
      else if (v[j] == v[i] && j != i) equal += 1;
    }
    r[i] = 1.0 + below + equal / 2.0;
  }
  return r;
}

inline double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = counting_ranks(x);
  const auto ry = counting_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i] / n;
    my += ry[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Tau-b by enumerating every pair.
inline double oracle_kendall(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) ties_x += 1;
      else if (dy == 0) ties_y += 1;
      else if ((dx > 0) == (dy > 0)) concordant += 1;
      else discordant += 1;
    }
  }
  return (concordant - discordant) / std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
}

}  // namespace memoed::testing
