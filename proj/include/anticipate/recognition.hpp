#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "anticipate/rng.hpp"
#include "anticipate/taxonomy.hpp"

namespace anticipate {

struct RecognitionConfig {
  std::size_t window = 4;   // segments per window (n); stride is always 1
  std::size_t samples = 5;  // draws per slot
  std::uint64_t seed = 0;
};

/// Classifier output for one window: one verb and one noun distribution per slot.
struct WindowDistributions {
  std::size_t window_start = 0;
  std::vector<std::vector<double>> verb_dists;
  std::vector<std::vector<double>> noun_dists;
};

/// A joint draw plus p(verb) * p(noun) under the distributions it came from.
struct Sample {
  ActionLabel label;
  double weight = 0.0;
};

inline constexpr double kDistributionTolerance = 1e-6;

/// Throws InvalidDistribution unless non-empty, finite, non-negative and summing to 1 +- 1e-6.
void validate_distribution(std::span<const double> dist);

/// Inverse-CDF lookup: first index whose running sum exceeds u. Rounding
/// overshoot resolves to the last index with positive mass.
std::size_t inverse_cdf(std::span<const double> dist, double u);

/// Window start indices. P < n yields a single window at 0 whose leading
/// slots alias segment 0.
std::vector<std::size_t> build_windows(std::size_t observed, std::size_t window);

/// Segment covered by `slot` of the window starting at `window_start`.
std::size_t slot_segment(std::size_t window_start, std::size_t slot, std::size_t observed, std::size_t window);

/// For each slot: `samples` verb draws, then `samples` noun draws, consumed in
/// that order from `rng`; the i-th verb draw pairs with the i-th noun draw.
std::vector<std::vector<Sample>> sample_window(const WindowDistributions& dists, std::size_t samples,
                                               SplitMix64& rng);

/// Most frequent pair; ties by larger summed weight, then lexicographic (verb, noun).
ActionLabel vote_top1(std::span<const Sample> pool);

/// Top-1 label per observed segment. Window w is sampled from SplitMix64(seed ^ window_start).
ActionSequence recognize_sequence(std::span<const WindowDistributions> windows, std::size_t observed,
                                  const RecognitionConfig& cfg);

/// Mean noun distribution over every slot of every window.
std::vector<double> mean_noun_distribution(std::span<const WindowDistributions> windows);

}  // namespace anticipate
