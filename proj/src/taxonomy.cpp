#include "anticipate/taxonomy.hpp"

#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

#include "anticipate/error.hpp"

namespace anticipate {

namespace {

bool is_word_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) != 0 || c == '_' || u >= 0x80;
}

void index_entries(std::vector<std::string>& list, std::unordered_map<std::string, std::size_t>& index,
                   std::string_view what) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    list[i] = normalize_text(list[i]);
    const std::string& entry = list[i];
    if (entry.empty()) {
      throw Error(ErrorCode::MalformedFile, "empty " + std::string(what) + " at position " + std::to_string(i));
    }
    // These characters (and the blank marker) are consumed by output post-processing.
    if (entry.find_first_of(",().") != std::string::npos || entry.find("___") != std::string::npos) {
      throw Error(ErrorCode::MalformedFile,
                  std::string(what) + " \"" + entry + "\" contains a reserved character");
    }
    if (!index.emplace(entry, i).second) {
      throw Error(ErrorCode::DuplicateEntry, std::string(what) + " \"" + entry + "\"");
    }
  }
}

}  // namespace

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

Taxonomy::Taxonomy(std::vector<std::string> verbs, std::vector<std::string> nouns)
    : verbs_(std::move(verbs)), nouns_(std::move(nouns)) {
  index_entries(verbs_, verb_index_, "verb");
  index_entries(nouns_, noun_index_, "noun");
}

std::optional<std::size_t> Taxonomy::verb_id(std::string_view verb) const {
  auto it = verb_index_.find(normalize_text(verb));
  if (it == verb_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Taxonomy::noun_id(std::string_view noun) const {
  auto it = noun_index_.find(normalize_text(noun));
  if (it == noun_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<LexiconMatch> Taxonomy::longest_match(std::string_view text, Lexicon which) const {
  const auto& list = entries(which);
  std::optional<LexiconMatch> best;
  for (std::size_t id = 0; id < list.size(); ++id) {
    const std::string& entry = list[id];
    if (best && entry.size() <= best->end - best->begin) continue;
    for (std::size_t pos = text.find(entry); pos != std::string_view::npos; pos = text.find(entry, pos + 1)) {
      const std::size_t end = pos + entry.size();
      const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
      const bool right_ok = end == text.size() || !is_word_char(text[end]);
      if (left_ok && right_ok) {
        best = LexiconMatch{id, pos, end};
        break;
      }
    }
  }
  return best;
}

std::string Taxonomy::label_to_text(const ActionLabel& label) const {
  if (!valid(label)) {
    throw Error(ErrorCode::IdOutOfRange, "label (" + std::to_string(label.verb_id) + ", " +
                                             std::to_string(label.noun_id) + ")");
  }
  return "(" + verbs_[label.verb_id] + ", " + nouns_[label.noun_id] + ")";
}

ActionLabel Taxonomy::resolve(std::string_view verb, std::string_view noun) const {
  auto v = verb_id(verb);
  if (!v) throw Error(ErrorCode::UnknownLabel, "verb \"" + std::string(verb) + "\"");
  auto n = noun_id(noun);
  if (!n) throw Error(ErrorCode::UnknownLabel, "noun \"" + std::string(noun) + "\"");
  return ActionLabel{*v, *n};
}

Taxonomy load_taxonomy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MalformedFile, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedFile, path.string() + ": " + e.what());
  }
  auto read_list = [&](const char* key) {
    if (!doc.is_object() || !doc.contains(key) || !doc[key].is_array()) {
      throw Error(ErrorCode::MalformedFile, path.string() + ": missing array \"" + key + "\"");
    }
    std::vector<std::string> out;
    for (const auto& item : doc[key]) {
      if (!item.is_string()) throw Error(ErrorCode::MalformedFile, path.string() + ": non-string in " + key);
      out.push_back(item.get<std::string>());
    }
    return out;
  };
  return Taxonomy(read_list("verbs"), read_list("nouns"));
}

}  // namespace anticipate
