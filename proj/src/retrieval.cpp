#include "anticipate/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "anticipate/error.hpp"
#include "anticipate/rng.hpp"

namespace anticipate {

void EmbeddingStore::add(std::string id, std::vector<double> vec) {
  if (dimension_ == 0) dimension_ = vec.size();
  if (vec.size() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch, "embedding " + id + " has " + std::to_string(vec.size()) +
                                                  " components, store dimension is " + std::to_string(dimension_));
  }
  for (double x : vec) {
    if (!std::isfinite(x)) throw Error(ErrorCode::MalformedFile, "embedding " + id + " has a non-finite component");
  }
  vectors_[std::move(id)] = std::move(vec);
}

const std::vector<double>& EmbeddingStore::at(const std::string& id) const {
  auto it = vectors_.find(id);
  if (it == vectors_.end()) throw Error(ErrorCode::UnknownLabel, "no embedding for exemplar " + id);
  return it->second;
}

std::vector<std::string> EmbeddingStore::ids() const {
  std::vector<std::string> out;
  out.reserve(vectors_.size());
  for (const auto& [id, _] : vectors_) out.push_back(id);
  return out;
}

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path.string());
  std::string line;
  std::size_t dim = 0;
  {
    std::getline(in, line);
    std::istringstream header(line);
    std::string tag;
    if (!(header >> tag >> dim) || tag != "dim" || dim == 0) {
      throw Error(ErrorCode::MalformedFile, path.string() + ": expected header \"dim <d>\"");
    }
  }
  EmbeddingStore store(dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string id;
    row >> id;
    std::vector<double> vec;
    std::string tok;
    while (row >> tok) {
      double x = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw Error(ErrorCode::MalformedFile, path.string() + ":" + std::to_string(lineno) + ": bad number " + tok);
      }
      vec.push_back(x);
    }
    try {
      store.add(std::move(id), std::move(vec));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedFile, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return store;
}

void EmbeddingStore::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MalformedFile, "cannot write " + path.string());
  out << "dim " << dimension_ << '\n';
  for (const auto& [id, vec] : vectors_) {
    out << id;
    for (double x : vec) out << ' ' << format_double(x);
    out << '\n';
  }
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(u.size()) + " vs " + std::to_string(v.size()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw Error(ErrorCode::ZeroVector, "cosine of a zero vector");
  return dot / (std::sqrt(uu) * std::sqrt(vv));
}

std::string_view to_string(SelectionKind kind) {
  switch (kind) {
    case SelectionKind::Random: return "random";
    case SelectionKind::Similarity: return "similarity";
    case SelectionKind::Mmr: return "mmr";
  }
  return "";
}

SelectionKind parse_selection_kind(std::string_view name) {
  if (name == "random") return SelectionKind::Random;
  if (name == "similarity") return SelectionKind::Similarity;
  if (name == "mmr") return SelectionKind::Mmr;
  throw Error(ErrorCode::InvalidConfig, "unknown selection kind \"" + std::string(name) + "\"");
}

namespace {

void check_pool(const EmbeddingStore& store, std::size_t count) {
  if (count > store.size()) {
    throw Error(ErrorCode::PoolTooSmall, "requested " + std::to_string(count) + " exemplars from a pool of " +
                                             std::to_string(store.size()));
  }
}

}  // namespace

std::vector<std::string> select_mmr(std::span<const double> query, const EmbeddingStore& store, double lambda,
                                    std::size_t count) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::InvalidConfig, "lambda outside [0, 1]");
  check_pool(store, count);
  std::vector<const std::string*> ids;
  std::vector<const std::vector<double>*> vecs;
  for (const auto& [id, vec] : store.entries()) {
    ids.push_back(&id);
    vecs.push_back(&vec);
  }
  const std::size_t n = ids.size();
  std::vector<double> relevance(n);
  for (std::size_t j = 0; j < n; ++j) relevance[j] = cosine(query, *vecs[j]);

  std::vector<double> redundancy(n, -std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  std::vector<std::string> out;
  out.reserve(count);
  for (std::size_t step = 0; step < count; ++step) {
    std::size_t best = n;
    double best_score = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      const double penalty = out.empty() ? 0.0 : redundancy[j];
      const double score = lambda * relevance[j] - (1.0 - lambda) * penalty;
      if (best == n || score > best_score) {
        best = j;
        best_score = score;
      }
    }
    taken[best] = true;
    out.push_back(*ids[best]);
    for (std::size_t j = 0; j < n; ++j) {
      if (!taken[j]) redundancy[j] = std::max(redundancy[j], cosine(*vecs[best], *vecs[j]));
    }
  }
  return out;
}

std::vector<std::string> select_similar(std::span<const double> query, const EmbeddingStore& store,
                                        std::size_t count) {
  check_pool(store, count);
  std::vector<std::pair<double, const std::string*>> scored;
  for (const auto& [id, vec] : store.entries()) scored.emplace_back(cosine(query, vec), &id);
  // Stable sort over id-ordered input keeps the lowest id first among equal scores.
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(*scored[i].second);
  return out;
}

std::vector<std::string> select_random(const EmbeddingStore& store, std::size_t count, std::uint64_t seed) {
  check_pool(store, count);
  std::vector<std::string> ids = store.ids();
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(count);
  return ids;
}

std::vector<std::string> select_exemplars(const SelectionPolicy& policy, std::span<const double> query,
                                          const EmbeddingStore& store, std::size_t count) {
  switch (policy.kind) {
    case SelectionKind::Random: return select_random(store, count, policy.seed);
    case SelectionKind::Similarity: return select_similar(query, store, count);
    case SelectionKind::Mmr: return select_mmr(query, store, policy.lambda, count);
  }
  return {};
}

std::vector<std::vector<std::string>> partition_for_prompts(const std::vector<std::string>& ranked,
                                                            std::size_t prompts, std::size_t per_prompt) {
  if (ranked.size() < prompts * per_prompt) {
    throw Error(ErrorCode::InsufficientExemplars, std::to_string(ranked.size()) + " ranked exemplars for " +
                                                      std::to_string(prompts) + " prompts of " +
                                                      std::to_string(per_prompt));
  }
  std::vector<std::vector<std::string>> groups(prompts);
  for (std::size_t k = 0; k < prompts; ++k) {
    auto first = ranked.begin() + static_cast<std::ptrdiff_t>(k * per_prompt);
    groups[k].assign(first, first + static_cast<std::ptrdiff_t>(per_prompt));
  }
  return groups;
}

}  // namespace anticipate
