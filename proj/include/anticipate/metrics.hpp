#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "anticipate/taxonomy.hpp"

namespace anticipate {

/// Optimal string alignment distance: insert, delete, substitute and adjacent
/// transposition at unit cost, no substring edited twice.
template <typename T>
std::size_t osa_distance(std::span<const T> a, std::span<const T> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

/// Unrestricted Damerau-Levenshtein (Lowrance-Wagner).
template <typename T>
std::size_t full_dl_distance(std::span<const T> a, std::span<const T> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const std::size_t inf = n + m;
  std::vector<std::vector<std::size_t>> d(n + 2, std::vector<std::size_t>(m + 2));
  d[0][0] = inf;
  for (std::size_t i = 0; i <= n; ++i) {
    d[i + 1][0] = inf;
    d[i + 1][1] = i;
  }
  for (std::size_t j = 0; j <= m; ++j) {
    d[0][j + 1] = inf;
    d[1][j + 1] = j;
  }
  std::map<T, std::size_t> last_row;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t last_match_col = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      auto it = last_row.find(b[j - 1]);
      const std::size_t i1 = it == last_row.end() ? 0 : it->second;
      const std::size_t j1 = last_match_col;
      std::size_t cost = 1;
      if (a[i - 1] == b[j - 1]) {
        cost = 0;
        last_match_col = j;
      }
      d[i + 1][j + 1] = std::min({d[i][j] + cost, d[i + 1][j] + 1, d[i][j + 1] + 1,
                                  d[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1)});
    }
    last_row[a[i - 1]] = i;
  }
  return d[n + 1][m + 1];
}

enum class DlVariant { Osa, Unrestricted };

template <typename T>
std::size_t dl_distance(std::span<const T> a, std::span<const T> b, DlVariant variant = DlVariant::Osa) {
  return variant == DlVariant::Osa ? osa_distance(a, b) : full_dl_distance(a, b);
}

/// K candidate sequences of length Z for one video.
struct PredictionSet {
  std::string video_id;
  std::vector<ActionSequence> sequences;

  /// Throws LengthMismatch / IdOutOfRange.
  void validate(std::size_t horizon, const Taxonomy* tax = nullptr) const;
};

struct VideoEd {
  std::string video_id;
  double verb_ed = 0.0;
  double noun_ed = 0.0;
  double action_ed = 0.0;
};

/// Min over K of distance / Z, independently for verbs, nouns and whole actions.
VideoEd ed_report(const PredictionSet& preds, const ActionSequence& gt, DlVariant variant = DlVariant::Osa);

struct EdReport {
  std::vector<VideoEd> videos;  // sorted by video_id
  double verb_ed = 0.0;
  double noun_ed = 0.0;
  double action_ed = 0.0;
};

/// Macro average over videos after sorting by id.
EdReport aggregate_ed(std::vector<VideoEd> per_video);

/// Mean precision at each positive rank, items sorted by descending score
/// (ties by index). 0 when there are no positives.
double average_precision(std::span<const double> scores, std::span<const bool> labels);

/// Fraction of the K*Z predicted slots carrying each verb.
std::vector<double> verb_scores(const PredictionSet& preds, std::size_t verb_count);

/// Per-video inputs at one observed ratio.
struct RatioInputs {
  std::vector<std::vector<double>> scores;
  std::vector<std::set<std::size_t>> remaining_verbs;
};

struct MapSplits {
  std::vector<std::size_t> all;
  std::vector<std::size_t> freq;
  std::vector<std::size_t> rare;
};

struct MapReport {
  double all_map = 0.0;
  std::optional<double> freq_map;
  std::optional<double> rare_map;
  std::map<int, double> all_by_ratio;
  std::map<int, std::optional<double>> freq_by_ratio;
  std::map<int, std::optional<double>> rare_by_ratio;
};

/// AP per verb class over videos, averaged per split (classes without a positive
/// skipped), then averaged over ratios. Throws EmptySplit when ALL has no scorable class.
MapReport map_report(const std::map<int, RatioInputs>& by_ratio, const MapSplits& splits);

}  // namespace anticipate
