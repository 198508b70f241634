#ifndef MEMBIAS_PIPELINE_HPP_
#define MEMBIAS_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "membias/common.hpp"
#include "membias/corpus.hpp"
#include "membias/embedding.hpp"
#include "membias/gateway.hpp"
#include "membias/retrieval.hpp"

namespace membias {

// Which bio text a composition may read. Experiment 6 runs entirely on
// BioVariant::Scrubbed; everything else on BioVariant::Raw.
enum class BioVariant { Raw, Scrubbed };
std::string_view to_string(BioVariant v);
BioVariant bio_variant_for(ExperimentId e);

template <BioVariant V>
struct BioSource {
  static const std::string& bio(const CandidateRecord& c) {
    if constexpr (V == BioVariant::Raw) {
      return c.raw_bio;
    } else {
      return c.scrubbed_bio;
    }
  }
};

// Read-only state shared by every task of a run: train-split pools embedded
// on raw and scrubbed bios, and profession-label vectors for relevance.
class PipelineContext {
 public:
  PipelineContext(const Corpus& corpus, EmbeddingProvider& embedder, EmbeddingCache* cache,
                  std::size_t k, Execution execution = Execution::Parallel);

  const Corpus& corpus() const { return *corpus_; }
  EmbeddingProvider& embedder() const { return *embedder_; }
  EmbeddingCache* cache() const { return cache_; }
  std::size_t k() const { return k_; }
  Execution execution() const { return execution_; }

  const EmbeddedPool& pool(BioVariant v) const {
    return v == BioVariant::Raw ? raw_pool_ : scrubbed_pool_;
  }
  std::span<const double> pool_vector(BioVariant v, std::string_view candidate_id) const;

  // Cosine between the candidate's scrubbed-bio vector and the label vector
  // of `profession`.
  double relevance(std::string_view candidate_id, std::string_view profession) const;

 private:
  const Corpus* corpus_;
  EmbeddingProvider* embedder_;
  EmbeddingCache* cache_;
  std::size_t k_;
  Execution execution_;
  EmbeddedPool raw_pool_;
  EmbeddedPool scrubbed_pool_;
  std::unordered_map<std::string, std::size_t> pool_index_;
  std::map<std::string, EmbeddingVector, std::less<>> label_vecs_;
};

// Entries of the recruiter's episodic memory whose posting has the same
// profession as `posting`, in timestamp order.
std::vector<const MemoryEntry*> task_memory(const Corpus& corpus, const RecruiterProfile& recruiter,
                                            const JobPosting& posting);

// Strict majority of shortlist genders; nullopt on a tie.
std::optional<Gender> memory_direction(std::span<const MemoryEntry* const> memory);

struct TracedList {
  RankedList list;
  std::vector<Gender> genders;     // aligned with list.entries
  std::vector<double> relevance;   // aligned with list.entries
  double utility_at_5 = 0.0;
};

struct MemoryDigest {
  std::size_t entries = 0;
  int male = 0;
  int female = 0;
  std::optional<Gender> direction;
  std::vector<std::string> shortlisted_ids;
};

struct StageTrace {
  std::string recruiter_id;
  std::string posting_id;
  std::string profession;
  ExperimentId experiment = ExperimentId::E0;
  std::string raw_query;
  std::optional<std::string> semantic_memory;
  std::optional<std::string> personalized_query;
  std::optional<std::string> memory_summary;
  std::optional<SummaryLabel> summary_label;
  std::optional<std::string> job_description;
  TracedList retrieval;
  std::optional<TracedList> reranked;
  // Experiment whose retrieval stages were reused (E0 for E1, E3 for E4).
  std::optional<ExperimentId> shared_from;
  MemoryDigest memory;
  std::vector<std::string> repairs;
  TranscriptLog transcripts;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;

  std::string key() const;
};

std::string task_key(std::string_view recruiter_id, std::string_view posting_id, ExperimentId e);

// E1 shares E0's retrieval, E4 shares E3's stages.
std::optional<ExperimentId> retrieval_partner(ExperimentId e);

// Throws InputError unless `partner` is the retrieval partner of `e` for the
// same task and seed.
void check_partner(const StageTrace& partner, std::string_view recruiter_id,
                   std::string_view posting_id, ExperimentId e, std::uint64_t seed);

// Semantic memory generated once per (recruiter, bio variant) and shared by
// all of that recruiter's tasks.
class SemanticMemoryStore {
 public:
  struct Entry {
    std::string text;
    TranscriptLog transcripts;
  };
  Entry get(const PipelineContext& ctx, ModelBackend& backend, const RecruiterProfile& recruiter,
            BioVariant variant);

 private:
  std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

// Runs one experiment composition for (recruiter, posting). `partner`, when
// given, supplies the shared retrieval stages. Errors are rethrown with the
// task key and stage prepended, preserving the error category.
StageTrace run_task(const PipelineContext& ctx, ModelBackend& backend,
                    const RecruiterProfile& recruiter, const JobPosting& posting, ExperimentId e,
                    std::uint64_t seed, const StageTrace* partner = nullptr,
                    SemanticMemoryStore* semantic_store = nullptr);

}  // namespace membias

#endif  // MEMBIAS_PIPELINE_HPP_
