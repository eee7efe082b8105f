#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace anticipate {

struct ActionLabel {
  std::size_t verb_id = 0;
  std::size_t noun_id = 0;

  friend auto operator<=>(const ActionLabel&, const ActionLabel&) = default;
};

using ActionSequence = std::vector<ActionLabel>;

enum class Lexicon { Verbs, Nouns };

struct LexiconMatch {
  std::size_t id = 0;
  std::size_t begin = 0;  // byte offsets into the searched text
  std::size_t end = 0;

  friend bool operator==(const LexiconMatch&, const LexiconMatch&) = default;
};

/// Lowercases ASCII, collapses runs of whitespace to one space and trims.
std::string normalize_text(std::string_view text);

/// Closed verb/noun vocabularies. Position in each list is the canonical id.
/// Immutable after construction.
class Taxonomy {
 public:
  Taxonomy() = default;
  Taxonomy(std::vector<std::string> verbs, std::vector<std::string> nouns);

  [[nodiscard]] const std::vector<std::string>& verbs() const noexcept { return verbs_; }
  [[nodiscard]] const std::vector<std::string>& nouns() const noexcept { return nouns_; }
  [[nodiscard]] const std::vector<std::string>& entries(Lexicon which) const noexcept {
    return which == Lexicon::Verbs ? verbs_ : nouns_;
  }

  [[nodiscard]] std::optional<std::size_t> verb_id(std::string_view verb) const;
  [[nodiscard]] std::optional<std::size_t> noun_id(std::string_view noun) const;

  [[nodiscard]] bool valid(const ActionLabel& label) const noexcept {
    return label.verb_id < verbs_.size() && label.noun_id < nouns_.size();
  }

  /// Longest lexicon entry occurring in `text` on word boundaries. Equal lengths
  /// resolve to the lowest id; the span is that entry's leftmost occurrence.
  [[nodiscard]] std::optional<LexiconMatch> longest_match(std::string_view text,
                                                          Lexicon which) const;

  /// "(<verb>, <noun>)". Throws IdOutOfRange.
  [[nodiscard]] std::string label_to_text(const ActionLabel& label) const;

  /// Resolves a (verb, noun) string pair; throws UnknownLabel.
  [[nodiscard]] ActionLabel resolve(std::string_view verb, std::string_view noun) const;

 private:
  std::vector<std::string> verbs_;
  std::vector<std::string> nouns_;
  std::unordered_map<std::string, std::size_t> verb_index_;
  std::unordered_map<std::string, std::size_t> noun_index_;
};

/// Reads {"verbs": [...], "nouns": [...]}. Throws MalformedFile / DuplicateEntry.
Taxonomy load_taxonomy(const std::filesystem::path& path);

}  // namespace anticipate
