#include "anticipate/recognition.hpp"

#include <cmath>
#include <map>
#include <string>

#include "anticipate/error.hpp"

namespace anticipate {

void validate_distribution(std::span<const double> dist) {
  if (dist.empty()) throw Error(ErrorCode::InvalidDistribution, "empty distribution");
  double sum = 0.0;
  for (double p : dist) {
    if (!std::isfinite(p) || p < 0.0) throw Error(ErrorCode::InvalidDistribution, "negative or non-finite mass");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kDistributionTolerance) {
    throw Error(ErrorCode::InvalidDistribution, "mass sums to " + std::to_string(sum));
  }
}

std::size_t inverse_cdf(std::span<const double> dist, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i] <= 0.0) continue;
    cumulative += dist[i];
    last_positive = i;
    if (u < cumulative) return i;
  }
  return last_positive;
}

std::vector<std::size_t> build_windows(std::size_t observed, std::size_t window) {
  if (observed < window) return {0};
  std::vector<std::size_t> starts(observed - window + 1);
  for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = i;
  return starts;
}

std::size_t slot_segment(std::size_t window_start, std::size_t slot, std::size_t observed, std::size_t window) {
  if (observed >= window) return window_start + slot;
  const std::size_t pad = window - observed;
  return slot < pad ? 0 : slot - pad;
}

std::vector<std::vector<Sample>> sample_window(const WindowDistributions& dists, std::size_t samples,
                                               SplitMix64& rng) {
  if (dists.verb_dists.size() != dists.noun_dists.size()) {
    throw Error(ErrorCode::InvalidDistribution, "verb and noun slot counts differ");
  }
  std::vector<std::vector<Sample>> out(dists.verb_dists.size());
  for (std::size_t slot = 0; slot < dists.verb_dists.size(); ++slot) {
    const auto& verbs = dists.verb_dists[slot];
    const auto& nouns = dists.noun_dists[slot];
    validate_distribution(verbs);
    validate_distribution(nouns);
    std::vector<std::size_t> verb_draws(samples);
    std::vector<std::size_t> noun_draws(samples);
    for (auto& v : verb_draws) v = inverse_cdf(verbs, rng.next_unit());
    for (auto& n : noun_draws) n = inverse_cdf(nouns, rng.next_unit());
    out[slot].reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      out[slot].push_back(Sample{{verb_draws[i], noun_draws[i]}, verbs[verb_draws[i]] * nouns[noun_draws[i]]});
    }
  }
  return out;
}

ActionLabel vote_top1(std::span<const Sample> pool) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "no samples to vote on");
  struct Tally {
    std::size_t count = 0;
    double weight = 0.0;
  };
  std::map<ActionLabel, Tally> tallies;
  for (const Sample& s : pool) {
    auto& t = tallies[s.label];
    ++t.count;
    t.weight += s.weight;
  }
  // std::map iterates in lexicographic label order, so strict comparisons keep the lowest pair on full ties.
  auto best = tallies.begin();
  for (auto it = std::next(tallies.begin()); it != tallies.end(); ++it) {
    const Tally& a = it->second;
    const Tally& b = best->second;
    if (a.count > b.count || (a.count == b.count && a.weight > b.weight)) best = it;
  }
  return best->first;
}

ActionSequence recognize_sequence(std::span<const WindowDistributions> windows, std::size_t observed,
                                  const RecognitionConfig& cfg) {
  if (cfg.window == 0 || cfg.samples == 0) throw Error(ErrorCode::InvalidConfig, "window and samples must be >= 1");
  if (observed == 0) throw Error(ErrorCode::EmptyPool, "no observed segments");
  std::vector<std::vector<Sample>> pools(observed);
  for (const auto& win : windows) {
    if (win.verb_dists.size() != cfg.window) {
      throw Error(ErrorCode::InvalidDistribution, "window at " + std::to_string(win.window_start) + " has " +
                                                      std::to_string(win.verb_dists.size()) + " slots, expected " +
                                                      std::to_string(cfg.window));
    }
    SplitMix64 rng(cfg.seed ^ static_cast<std::uint64_t>(win.window_start));
    auto slots = sample_window(win, cfg.samples, rng);
    for (std::size_t slot = 0; slot < slots.size(); ++slot) {
      const std::size_t seg = slot_segment(win.window_start, slot, observed, cfg.window);
      if (seg >= observed) {
        throw Error(ErrorCode::InvalidDistribution, "window at " + std::to_string(win.window_start) +
                                                        " runs past the observed segments");
      }
      pools[seg].insert(pools[seg].end(), slots[slot].begin(), slots[slot].end());
    }
  }
  ActionSequence out;
  out.reserve(observed);
  for (const auto& pool : pools) out.push_back(vote_top1(pool));
  return out;
}

std::vector<double> mean_noun_distribution(std::span<const WindowDistributions> windows) {
  std::vector<double> mean;
  std::size_t slots = 0;
  for (const auto& win : windows) {
    for (const auto& dist : win.noun_dists) {
      if (mean.empty()) mean.assign(dist.size(), 0.0);
      if (dist.size() != mean.size()) throw Error(ErrorCode::DimensionMismatch, "noun distribution sizes differ");
      for (std::size_t i = 0; i < dist.size(); ++i) mean[i] += dist[i];
      ++slots;
    }
  }
  for (double& p : mean) p /= static_cast<double>(slots);
  return mean;
}

}  // namespace anticipate
