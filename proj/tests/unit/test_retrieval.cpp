#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "anticipate/error.hpp"
#include "anticipate/retrieval.hpp"
#include "anticipate/rng.hpp"
#include "helpers/support.hpp"

using namespace anticipate;

namespace {

double plain_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Every step rescans every candidate and recomputes its full objective.
std::vector<std::string> brute_force_mmr(const std::vector<double>& q, const std::map<std::string, std::vector<double>>& pool,
                                         double lambda, std::size_t count) {
  std::vector<std::string> chosen;
  while (chosen.size() < count) {
    std::string best;
    double best_score = 0;
    bool have = false;
    for (const auto& [id, vec] : pool) {
      if (std::find(chosen.begin(), chosen.end(), id) != chosen.end()) continue;
      double redundancy = 0;
      for (std::size_t t = 0; t < chosen.size(); ++t) {
        const double s = plain_cosine(pool.at(chosen[t]), vec);
        redundancy = t == 0 ? s : std::max(redundancy, s);
      }
      const double score = lambda * plain_cosine(q, vec) - (1.0 - lambda) * redundancy;
      if (!have || score > best_score) {
        best = id;
        best_score = score;
        have = true;
      }
    }
    chosen.push_back(best);
  }
  return chosen;
}

EmbeddingStore store_of(const std::map<std::string, std::vector<double>>& pool) {
  EmbeddingStore s;
  for (const auto& [id, v] : pool) s.add(id, v);
  return s;
}

}  // namespace

TEST(Cosine, BasicsAndErrors) {
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 3}), 0.0);
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{2, 2}, std::vector<double>{1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{-1, 0}), -1.0);
  try {
    cosine(std::vector<double>{0, 0}, std::vector<double>{1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVector);
  }
  try {
    cosine(std::vector<double>{1}, std::vector<double>{1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Mmr, TwoDimensionalFixture) {
  const std::map<std::string, std::vector<double>> pool{{"a", {1, 0}}, {"b", {0.99, 0.14}}, {"c", {0, 1}}};
  const std::vector<double> q{1, 0};
  // Second step: b and c both score exactly 0, the lower id wins.
  EXPECT_EQ(select_mmr(q, store_of(pool), 0.5, 2), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(brute_force_mmr(q, pool, 0.5, 2), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(select_mmr(q, store_of(pool), 0.25, 2), (std::vector<std::string>{"a", "c"}));
}

TEST(Mmr, MatchesBruteForceOnRandomPools) {
  SplitMix64 rng(2024);
  for (int round = 0; round < 100; ++round) {
    const std::size_t size = 1 + rng.next_below(12);
    const std::size_t dim = 1 + rng.next_below(8);
    std::map<std::string, std::vector<double>> pool;
    for (std::size_t i = 0; i < size; ++i) {
      std::vector<double> v(dim);
      do {
        for (double& x : v) x = static_cast<double>(rng.next_below(5)) - 2.0;
      } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0; }));
      pool["e" + std::to_string(rng.next_below(1000))] = v;
    }
    std::vector<double> q(dim, 0.0);
    q[0] = 1.0;
    const auto store = store_of(pool);
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const std::size_t count = 1 + rng.next_below(pool.size());
      ASSERT_EQ(select_mmr(q, store, lambda, count), brute_force_mmr(q, pool, lambda, count));
    }
    EXPECT_EQ(select_mmr(q, store, 1.0, pool.size()), select_similar(q, store, pool.size()));
  }
}

TEST(Mmr, RejectsBadArguments) {
  const auto store = store_of({{"a", {1, 0}}});
  EXPECT_THROW(select_mmr(std::vector<double>{1, 0}, store, 1.5, 1), Error);
  EXPECT_THROW(select_mmr(std::vector<double>{1, 0}, store, 0.5, 2), Error);
  EXPECT_THROW(select_mmr(std::vector<double>{1, 0, 0}, store, 0.5, 1), Error);
}

TEST(Similar, DescendingWithIdTies) {
  const auto store = store_of({{"x", {1, 0}}, {"b", {1, 0}}, {"m", {0, 1}}, {"k", {1, 1}}});
  EXPECT_EQ(select_similar(std::vector<double>{1, 0}, store, 4), (std::vector<std::string>{"b", "x", "k", "m"}));
}

TEST(Random, DeterministicWithoutReplacement) {
  EmbeddingStore store;
  for (int i = 0; i < 20; ++i) store.add("id" + std::to_string(i), {1.0, static_cast<double>(i)});
  const auto a = select_random(store, 8, 5);
  EXPECT_EQ(a, select_random(store, 8, 5));
  EXPECT_EQ(std::set<std::string>(a.begin(), a.end()).size(), 8u);
  EXPECT_NE(a, select_random(store, 8, 6));
  EXPECT_EQ(select_random(store, 20, 1).size(), 20u);
}

TEST(Selection, DispatchAndPartition) {
  const auto store = store_of({{"a", {1, 0}}, {"b", {0.9, 0.1}}, {"c", {0, 1}}, {"d", {0.5, 0.5}}});
  SelectionPolicy sim{SelectionKind::Similarity, 0.5, 2, 0};
  EXPECT_EQ(select_exemplars(sim, std::vector<double>{1, 0}, store, 2), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(parse_selection_kind("mmr"), SelectionKind::Mmr);
  EXPECT_THROW(parse_selection_kind("best"), Error);

  const auto groups = partition_for_prompts({"a", "b", "c", "d", "e"}, 2, 2);
  EXPECT_EQ(groups, (std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}}));
  try {
    partition_for_prompts({"a", "b", "c"}, 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientExemplars);
  }
}

TEST(EmbeddingStore, RoundTripsThroughText) {
  testing_support::TempDir dir;
  EmbeddingStore store;
  store.add("ex@0", {0.1, -2.5e-7, 1.0 / 3.0});
  store.add("ex@8", {1, 2, 3});
  store.save(dir / "e.txt");
  const auto back = EmbeddingStore::load(dir / "e.txt");
  EXPECT_EQ(back.entries(), store.entries());
  EXPECT_EQ(back.dimension(), 3u);
  EXPECT_THROW(store.add("bad", {1, 2}), Error);
  EXPECT_THROW(store.add("nan", {1, 2, std::nan("")}), Error);
  testing_support::write_file(dir / "broken.txt", "dim 2\nx 1\n");
  EXPECT_THROW(EmbeddingStore::load(dir / "broken.txt"), Error);
}
