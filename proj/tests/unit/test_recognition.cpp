#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "anticipate/error.hpp"
#include "anticipate/recognition.hpp"
#include "anticipate/rng.hpp"

using namespace anticipate;

namespace {

// Reference mixer written out from the published constants.
std::uint64_t reference_mix(std::uint64_t state_after_increment) {
  std::uint64_t z = state_after_increment;
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

std::vector<double> one_hot(std::size_t size, std::size_t hot) {
  std::vector<double> d(size, 0.0);
  d[hot] = 1.0;
  return d;
}

WindowDistributions window_of(std::size_t start, const std::vector<ActionLabel>& slots, std::size_t verbs,
                              std::size_t nouns) {
  WindowDistributions w;
  w.window_start = start;
  for (const auto& a : slots) {
    w.verb_dists.push_back(one_hot(verbs, a.verb_id));
    w.noun_dists.push_back(one_hot(nouns, a.noun_id));
  }
  return w;
}

}  // namespace

TEST(SplitMix64, MatchesReferenceStream) {
  SplitMix64 zero(0);
  EXPECT_EQ(zero.next(), 0xE220A8397B1DCDAFull);

  for (std::uint64_t seed : {0ull, 1ull, 42ull, 0xdeadbeefcafebabeull}) {
    SplitMix64 rng(seed);
    std::uint64_t state = seed;
    for (int i = 0; i < 1000; ++i) {
      state += 0x9e3779b97f4a7c15ull;
      ASSERT_EQ(rng.next(), reference_mix(state)) << "seed " << seed << " draw " << i;
    }
  }
}

TEST(SplitMix64, DerivedDrawsUseDocumentedBits) {
  SplitMix64 a(7), b(7);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t raw = b.next();
    const double u = a.next_unit();
    EXPECT_EQ(u, static_cast<double>(raw >> 11) / 9007199254740992.0);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  SplitMix64 c(9), d(9);
  for (std::uint64_t range : {1ull, 2ull, 3ull, 10ull, 1000003ull, 1ull << 40}) {
    const std::uint64_t raw = d.next();
    // High word of raw * range via 32-bit limbs.
    const std::uint64_t lo = raw & 0xffffffffull, hi = raw >> 32;
    const std::uint64_t rlo = range & 0xffffffffull, rhi = range >> 32;
    const std::uint64_t t = lo * rlo;
    const std::uint64_t m1 = hi * rlo + (t >> 32);
    const std::uint64_t m2 = lo * rhi + (m1 & 0xffffffffull);
    const std::uint64_t high = hi * rhi + (m1 >> 32) + (m2 >> 32);
    const std::uint64_t got = c.next_below(range);
    EXPECT_EQ(got, high);
    EXPECT_LT(got, range);
  }
}

TEST(Recognition, ValidateDistribution) {
  EXPECT_NO_THROW(validate_distribution(std::vector<double>{0.25, 0.75}));
  EXPECT_NO_THROW(validate_distribution(std::vector<double>{0.5, 0.5 + 5e-7}));
  EXPECT_THROW(validate_distribution(std::vector<double>{0.5, 0.6}), Error);
  EXPECT_THROW(validate_distribution(std::vector<double>{}), Error);
  EXPECT_THROW(validate_distribution(std::vector<double>{1.5, -0.5}), Error);
  EXPECT_THROW(validate_distribution(std::vector<double>{std::nan(""), 1.0}), Error);
}

TEST(Recognition, InverseCdf) {
  const std::vector<double> d{0.2, 0.3, 0.5};
  EXPECT_EQ(inverse_cdf(d, 0.0), 0u);
  EXPECT_EQ(inverse_cdf(d, 0.1999), 0u);
  EXPECT_EQ(inverse_cdf(d, 0.2), 1u);
  EXPECT_EQ(inverse_cdf(d, 0.4999), 1u);
  EXPECT_EQ(inverse_cdf(d, 0.5), 2u);
  EXPECT_EQ(inverse_cdf(d, 0.999999), 2u);
  EXPECT_EQ(inverse_cdf(std::vector<double>{0.0, 1.0, 0.0}, 0.0), 1u);
  EXPECT_EQ(inverse_cdf(std::vector<double>{0.0, 1.0, 0.0}, 0.9999999), 1u);
  // Mass short of 1 by rounding: overshoot lands on the last index with mass.
  EXPECT_EQ(inverse_cdf(std::vector<double>{0.5, 0.4999995, 0.0}, 0.9999999), 1u);
}

TEST(Recognition, WindowsAndLeftPadding) {
  EXPECT_EQ(build_windows(8, 4), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(build_windows(4, 4), (std::vector<std::size_t>{0}));
  EXPECT_EQ(build_windows(2, 4), (std::vector<std::size_t>{0}));
  EXPECT_EQ(slot_segment(3, 2, 8, 4), 5u);
  std::vector<std::size_t> aliased;
  for (std::size_t s = 0; s < 4; ++s) aliased.push_back(slot_segment(0, s, 2, 4));
  EXPECT_EQ(aliased, (std::vector<std::size_t>{0, 0, 0, 1}));
}

TEST(Recognition, SampleWindowStreamLayout) {
  WindowDistributions w;
  w.window_start = 0;
  w.verb_dists = {{0.1, 0.2, 0.7}, {0.5, 0.5, 0.0}};
  w.noun_dists = {{0.25, 0.25, 0.25, 0.25}, {0.0, 0.0, 0.9, 0.1}};
  const std::size_t samples = 6;
  SplitMix64 rng(1234);
  const auto got = sample_window(w, samples, rng);

  // Per slot: all verb draws first, then all noun draws.
  SplitMix64 ref(1234);
  auto pick = [](const std::vector<double>& d, double u) {
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] <= 0.0) continue;
      acc += d[i];
      last = i;
      if (u < acc) return i;
    }
    return last;
  };
  ASSERT_EQ(got.size(), 2u);
  for (std::size_t slot = 0; slot < 2; ++slot) {
    std::vector<std::size_t> v, n;
    for (std::size_t i = 0; i < samples; ++i) v.push_back(pick(w.verb_dists[slot], ref.next_unit()));
    for (std::size_t i = 0; i < samples; ++i) n.push_back(pick(w.noun_dists[slot], ref.next_unit()));
    ASSERT_EQ(got[slot].size(), samples);
    for (std::size_t i = 0; i < samples; ++i) {
      EXPECT_EQ(got[slot][i].label, (ActionLabel{v[i], n[i]}));
      EXPECT_DOUBLE_EQ(got[slot][i].weight, w.verb_dists[slot][v[i]] * w.noun_dists[slot][n[i]]);
    }
  }
  EXPECT_EQ(rng.next(), ref.next());
}

TEST(Recognition, VoteCountThenWeightThenLabel) {
  std::vector<Sample> pool{{{1, 1}, 0.1}, {{1, 1}, 0.1}, {{0, 0}, 0.9}};
  EXPECT_EQ(vote_top1(pool), (ActionLabel{1, 1}));

  std::vector<Sample> weight_tie{{{2, 0}, 0.3}, {{0, 5}, 0.2}, {{2, 0}, 0.1}, {{0, 5}, 0.1}};
  EXPECT_EQ(vote_top1(weight_tie), (ActionLabel{2, 0}));

  std::vector<Sample> full_tie{{{2, 0}, 0.25}, {{1, 7}, 0.25}, {{1, 3}, 0.25}};
  EXPECT_EQ(vote_top1(full_tie), (ActionLabel{1, 3}));

  EXPECT_THROW(vote_top1(std::vector<Sample>{}), Error);
}

TEST(Recognition, CertainDistributionsRecoverTruth) {
  const std::vector<ActionLabel> truth{{0, 1}, {2, 2}, {1, 0}, {3, 3}, {2, 1}, {0, 0}};
  RecognitionConfig cfg{3, 4, 99};
  std::vector<WindowDistributions> windows;
  for (std::size_t s : build_windows(truth.size(), cfg.window)) {
    windows.push_back(window_of(s, {truth.begin() + s, truth.begin() + s + 3}, 4, 4));
  }
  EXPECT_EQ(recognize_sequence(windows, truth.size(), cfg), truth);
}

TEST(Recognition, ShortVideoAliasesFirstSegment) {
  RecognitionConfig cfg{4, 2, 5};
  // Two observed segments: slots 0..2 all describe segment 0, slot 3 describes segment 1.
  auto w = window_of(0, {{1, 1}, {1, 1}, {1, 1}, {2, 0}}, 3, 2);
  EXPECT_EQ(recognize_sequence(std::vector{w}, 2, cfg), (ActionSequence{{1, 1}, {2, 0}}));
}

TEST(Recognition, PoolsAcrossWindowsWithSubSeeds) {
  SplitMix64 gen(77);
  auto random_dist = [&](std::size_t size) {
    std::vector<double> d(size);
    double sum = 0.0;
    for (double& p : d) sum += (p = gen.next_unit() + 0.01);
    for (double& p : d) p /= sum;
    return d;
  };
  const std::size_t observed = 6, n = 3;
  RecognitionConfig cfg{n, 5, 0xabcdef};
  std::vector<WindowDistributions> windows;
  for (std::size_t s : build_windows(observed, n)) {
    WindowDistributions w;
    w.window_start = s;
    for (std::size_t i = 0; i < n; ++i) {
      w.verb_dists.push_back(random_dist(4));
      w.noun_dists.push_back(random_dist(3));
    }
    windows.push_back(w);
  }
  std::vector<std::vector<Sample>> pools(observed);
  for (const auto& w : windows) {
    SplitMix64 rng(cfg.seed ^ w.window_start);
    const auto slots = sample_window(w, cfg.samples, rng);
    for (std::size_t i = 0; i < n; ++i) pools[w.window_start + i].insert(pools[w.window_start + i].end(),
                                                                         slots[i].begin(), slots[i].end());
  }
  ActionSequence expected;
  for (const auto& p : pools) expected.push_back(vote_top1(p));
  EXPECT_EQ(recognize_sequence(windows, observed, cfg), expected);
  EXPECT_EQ(recognize_sequence(windows, observed, cfg), recognize_sequence(windows, observed, cfg));
}

TEST(Recognition, RejectsMisshapenWindows) {
  RecognitionConfig cfg{3, 2, 0};
  auto w = window_of(0, {{0, 0}, {0, 0}}, 2, 2);
  EXPECT_THROW(recognize_sequence(std::vector{w}, 3, cfg), Error);
  auto past_end = window_of(2, {{0, 0}, {0, 0}, {0, 0}}, 2, 2);
  EXPECT_THROW(recognize_sequence(std::vector{past_end}, 3, cfg), Error);
}

TEST(Recognition, MeanNounDistribution) {
  WindowDistributions a;
  a.noun_dists = {{1.0, 0.0}, {0.5, 0.5}};
  WindowDistributions b;
  b.noun_dists = {{0.0, 1.0}, {0.5, 0.5}};
  const auto mean = mean_noun_distribution(std::vector{a, b});
  EXPECT_DOUBLE_EQ(mean[0], 0.5);
  EXPECT_DOUBLE_EQ(mean[1], 0.5);
}
