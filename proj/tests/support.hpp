// Shared fixtures: desk-scale corpora and scratch directories.
#ifndef MEMBIAS_TESTS_SUPPORT_HPP_
#define MEMBIAS_TESTS_SUPPORT_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "membias/corpus.hpp"
#include "membias/demo_bios.hpp"
#include "membias/embedding.hpp"

namespace membias::testing {

// Directory removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("membias-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::vector<CandidateRecord> demo_candidates(const DemoBioOptions& options,
                                                    const std::filesystem::path& scratch) {
  const auto path = scratch / "bios.jsonl";
  write_demo_bios(path, options);
  return load_bios(path, std::nullopt);
}

struct DeskCorpusOptions {
  std::size_t bios = 2400;
  std::size_t postings = 200;
  std::size_t recruiters = 40;
  std::uint64_t seed = 11;
  bool balanced_professions = false;
};

inline Corpus desk_corpus(const DeskCorpusOptions& o, const std::filesystem::path& scratch) {
  DemoBioOptions demo;
  demo.count = o.bios;
  demo.seed = o.seed;
  demo.balanced_professions = o.balanced_professions;
  HashingEmbedder embedder;
  SynthOptions synth{o.postings, o.recruiters, o.seed};
  return synthesize_corpus(demo_candidates(demo, scratch), synth, embedder);
}

}  // namespace membias::testing

#endif  // MEMBIAS_TESTS_SUPPORT_HPP_
