#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "anticipate/cli.hpp"
#include "anticipate/rng.hpp"
#include "anticipate/taxonomy.hpp"

namespace testing_support {

inline anticipate::Taxonomy kitchen_taxonomy() {
  return anticipate::Taxonomy({"take", "put", "turn", "turn on", "turn off", "open", "close", "wash", "cut", "measure"},
                              {"tape", "tape measure", "knife", "board", "cup", "door", "tap", "light", "drawer",
                               "plate", "bowl", "sponge", "pan", "lid", "bottle"});
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("anticipate_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"anticipate"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliResult r;
  r.code = anticipate::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

inline anticipate::ActionSequence random_sequence(anticipate::SplitMix64& rng, const anticipate::Taxonomy& tax,
                                                  std::size_t length) {
  anticipate::ActionSequence seq;
  for (std::size_t i = 0; i < length; ++i) {
    seq.push_back({rng.next_below(tax.verbs().size()), rng.next_below(tax.nouns().size())});
  }
  return seq;
}

}  // namespace testing_support
