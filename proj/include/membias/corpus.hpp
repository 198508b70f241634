#ifndef MEMBIAS_CORPUS_HPP_
#define MEMBIAS_CORPUS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "membias/common.hpp"
#include "membias/embedding.hpp"

namespace membias {

struct CandidateRecord {
  std::string id;
  std::string profession;
  Gender gender = Gender::Male;
  std::string raw_bio;
  std::string scrubbed_bio;
  Split split = Split::Train;
  std::string first_name;  // optional; scrubbed when present
};

struct JobPosting {
  std::string id;
  std::string profession;
  std::string raw_query;
};

struct MemoryEntry {
  std::string posting_id;
  std::vector<std::string> sampled_candidate_ids;
  std::string shortlisted_candidate_id;
  Gender shortlist_gender = Gender::Male;
  std::int64_t timestamp_ordinal = 0;
  // Drawn gender was absent from every resample; the opposite gender was used.
  bool gender_fallback = false;
};

struct RecruiterProfile {
  std::string id;
  std::vector<std::string> posting_ids;
  std::vector<MemoryEntry> episodic_memory;
  std::string semantic_memory;
};

struct ProfessionShare {
  double p_male = 0.0;
  double p_female = 0.0;
  std::size_t count = 0;
};
using ProfessionStats = std::map<std::string, ProfessionShare>;

// Column / key names in the input bios file.
struct BioFields {
  std::string bio = "bio";
  std::string profession = "profession";
  std::string gender = "gender";
  std::string split = "split";
  std::string name = "name";
};

// Reads CSV (header row, RFC 4180 quoting) or JSON Lines, chosen by extension
// (.jsonl/.json vs anything else). Rows without a split value take
// `default_split`; if that is unset the split column is required.
// Ids are "c" + zero-padded row index + `id_offset`.
std::vector<CandidateRecord> load_bios(const std::filesystem::path& path,
                                       std::optional<Split> default_split,
                                       const BioFields& fields = {}, std::size_t id_offset = 0,
                                       std::ostream* warnings = nullptr);

// Replaces pronouns, honorifics and (if given) the first name with "_".
// Whole word, case-insensitive; latent gender-coded words are kept.
std::string scrub_gender_indicators(std::string_view text, std::string_view first_name = {});

ProfessionStats profession_gender_distribution(std::span<const CandidateRecord> pool);

// Largest-remainder allocation of n over the profession frequencies; ties in
// remainder go to the lexicographically smaller profession.
std::map<std::string, std::size_t> allocate_postings(const ProfessionStats& stats, std::size_t n);

std::string raw_query_for(std::string_view profession);
std::string profession_label(std::string_view profession);

std::vector<JobPosting> synthesize_postings(const ProfessionStats& stats, std::size_t n,
                                            std::uint64_t seed);

std::vector<RecruiterProfile> assign_postings(std::span<const JobPosting> postings,
                                              std::size_t n_recruiters, std::uint64_t seed);

// Samples Test-split candidates and picks the shortlist for one
// (recruiter, posting). Embeddings of the test pool and profession labels are
// computed once at construction.
class MemoryCurator {
 public:
  static constexpr int kMaxResamples = 8;

  MemoryCurator(std::span<const CandidateRecord> candidates, const ProfessionStats& stats,
                EmbeddingProvider& embedder, EmbeddingCache* cache = nullptr);

  MemoryEntry curate(const RecruiterProfile& recruiter, const JobPosting& posting,
                     std::uint64_t seed) const;

  std::size_t available(std::string_view profession) const;

 private:
  struct ProfessionPool {
    std::vector<std::size_t> members;  // indices into candidates_
    EmbeddingVector label_vec;
  };
  std::span<const CandidateRecord> candidates_;
  const ProfessionStats& stats_;
  std::vector<EmbeddingVector> bio_vecs_;  // aligned with candidates_, test split only
  std::map<std::string, ProfessionPool, std::less<>> by_profession_;
};

struct SynthOptions {
  std::size_t n_postings = 10000;
  std::size_t n_recruiters = 1000;
  std::uint64_t seed = 0;
};

struct Corpus {
  std::vector<CandidateRecord> candidates;
  std::vector<JobPosting> postings;
  std::vector<RecruiterProfile> recruiters;
  ProfessionStats stats;

  const CandidateRecord& candidate(std::string_view id) const;
  const JobPosting& posting(std::string_view id) const;
  void build_index();

 private:
  std::unordered_map<std::string, std::size_t> candidate_index_;
  std::unordered_map<std::string, std::size_t> posting_index_;
};

// Stats -> postings -> assignment -> one memory entry per (recruiter, posting).
Corpus synthesize_corpus(std::vector<CandidateRecord> candidates, const SynthOptions& options,
                         EmbeddingProvider& embedder, EmbeddingCache* cache = nullptr);

// corpus/candidates.jsonl, postings.jsonl, recruiters.jsonl, stats.json and,
// with `write_scrubbed`, corpus/scrubbed/candidates.jsonl.
void write_corpus(const std::filesystem::path& dir, const Corpus& corpus, bool write_scrubbed);
// Scrubbed bios are read from scrubbed/ when present, recomputed otherwise.
Corpus load_corpus(const std::filesystem::path& dir);

// Structural checks for a synthesized corpus; throws InputError with the first
// violation.
void validate_corpus(const Corpus& corpus);

}  // namespace membias

#endif  // MEMBIAS_CORPUS_HPP_
