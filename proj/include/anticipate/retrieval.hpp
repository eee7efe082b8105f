#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace anticipate {

/// Dense exemplar embeddings of one fixed dimension, ordered by id.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dimension = 0) : dimension_(dimension) {}

  /// Throws DimensionMismatch, or InvalidDistribution on NaN/Inf components.
  void add(std::string id, std::vector<double> vec);

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::size_t size() const noexcept { return vectors_.size(); }
  [[nodiscard]] bool contains(const std::string& id) const { return vectors_.count(id) != 0; }
  [[nodiscard]] const std::vector<double>& at(const std::string& id) const;
  [[nodiscard]] const std::map<std::string, std::vector<double>>& entries() const noexcept { return vectors_; }
  [[nodiscard]] std::vector<std::string> ids() const;

  /// Text format: header "dim <d>", then one "<id> <f1> ... <fd>" line per record.
  static EmbeddingStore load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

 private:
  std::size_t dimension_;
  std::map<std::string, std::vector<double>> vectors_;
};

/// Shortest round-trip decimal.
std::string format_double(double value);

/// Cosine similarity. Throws DimensionMismatch / ZeroVector.
double cosine(std::span<const double> u, std::span<const double> v);

enum class SelectionKind { Random, Similarity, Mmr };

std::string_view to_string(SelectionKind kind);
SelectionKind parse_selection_kind(std::string_view name);

struct SelectionPolicy {
  SelectionKind kind = SelectionKind::Mmr;
  double lambda = 0.5;
  std::size_t per_prompt = 4;  // m
  std::uint64_t seed = 0;
};

/// Greedy maximal marginal relevance:
///   argmax_{p in D\T}  lambda * S(q, p) - (1 - lambda) * max_{t in T} S(t, p),
/// with the max over an empty T taken as 0 and ties resolved to the lowest id.
std::vector<std::string> select_mmr(std::span<const double> query, const EmbeddingStore& store, double lambda,
                                    std::size_t count);

/// Top `count` by S(q, .), descending, ties by lowest id.
std::vector<std::string> select_similar(std::span<const double> query, const EmbeddingStore& store,
                                        std::size_t count);

/// Uniform draw without replacement: partial Fisher-Yates over the sorted ids with SplitMix64(seed).
std::vector<std::string> select_random(const EmbeddingStore& store, std::size_t count, std::uint64_t seed);

std::vector<std::string> select_exemplars(const SelectionPolicy& policy, std::span<const double> query,
                                          const EmbeddingStore& store, std::size_t count);

/// Group k is ranked[k*m, k*m + m). Throws InsufficientExemplars.
std::vector<std::vector<std::string>> partition_for_prompts(const std::vector<std::string>& ranked,
                                                            std::size_t prompts, std::size_t per_prompt);

}  // namespace anticipate
