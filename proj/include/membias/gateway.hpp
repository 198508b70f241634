#ifndef MEMBIAS_GATEWAY_HPP_
#define MEMBIAS_GATEWAY_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "membias/chat_client.hpp"
#include "membias/common.hpp"
#include "membias/retrieval.hpp"

namespace membias {

enum class TaskKind { SemanticMemory, PersonalizedQuery, MemorySummary, JobDescription, ReRank, ClassifySummary };
std::string_view to_string(TaskKind k);
TaskKind parse_task_kind(std::string_view text);

enum class SummaryLabel { Biased, Neutral, Fair };
std::string_view to_string(SummaryLabel l);
// Exact label (case-insensitive, surrounding punctuation ignored); anything
// else throws BackendError.
SummaryLabel parse_summary_label(std::string_view text);

// One episodic memory entry as the model sees it. `shortlisted_bio` is raw or
// scrubbed depending on the experiment; the label is metadata that only the
// stub may consult (GenderSignal::Label).
struct MemoryItem {
  std::string posting_id;
  std::string profession;
  Gender shortlist_gender = Gender::Male;
  std::string shortlisted_bio;
  std::int64_t ordinal = 0;
};

struct RerankCandidate {
  std::string id;
  std::string bio;
  Gender gender = Gender::Male;
  double score = 0.0;
};

struct Transcript {
  TaskKind kind = TaskKind::SemanticMemory;
  std::string backend;
  std::string model;
  std::string request;
  std::string response;
  int attempts = 1;
};
using TranscriptLog = std::vector<Transcript>;

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual std::string name() const = 0;

  virtual std::string semantic_memory(std::span<const MemoryItem> memory, TranscriptLog& log) = 0;
  virtual std::string personalized_query(std::string_view raw_query, std::span<const MemoryItem> memory,
                                         bool include_gender, TranscriptLog& log) = 0;
  virtual std::string memory_summary(std::string_view semantic_memory,
                                     std::span<const MemoryItem> memory, TranscriptLog& log) = 0;
  virtual std::string job_description(std::string_view personalized_query,
                                      std::string_view memory_summary, TranscriptLog& log) = 0;
  // Proposed order of candidate ids; may be malformed for remote backends.
  virtual std::vector<std::string> rerank_order(std::span<const RerankCandidate> candidates,
                                                std::string_view job_description,
                                                std::string_view memory_summary,
                                                TranscriptLog& log) = 0;
  virtual SummaryLabel classify(std::string_view summary, TranscriptLog& log) = 0;
};

// ---- Validated task entry points ----

std::string generate_semantic_memory(std::span<const MemoryItem> episodic, ModelBackend& backend,
                                     TranscriptLog& log);
std::string create_personalized_query(std::string_view raw_query, std::span<const MemoryItem> episodic,
                                      bool include_gender, ModelBackend& backend, TranscriptLog& log);
std::string summarize_memory(std::string_view semantic_memory, std::span<const MemoryItem> episodic,
                             ModelBackend& backend, TranscriptLog& log);
std::string create_job_description(std::string_view personalized_query, std::string_view memory_summary,
                                   ModelBackend& backend, TranscriptLog& log);
SummaryLabel classify_summary(std::string_view summary, ModelBackend& backend, TranscriptLog& log);

struct PermutationRepair {
  std::vector<std::string> order;
  std::vector<std::string> dropped;   // unknown or duplicate ids in the proposal
  std::vector<std::string> appended;  // expected ids the proposal omitted
  bool repaired() const { return !dropped.empty() || !appended.empty(); }
  std::string describe() const;
};

// Keeps recognized ids in proposed order, then appends the missing ones in
// their original order. Throws BackendError if fewer than half the expected
// ids are recognized.
PermutationRepair repair_permutation(std::span<const std::string> expected,
                                     std::span<const std::string> proposed);

struct RerankResult {
  RankedList list;  // stage = Reranking; scores carried over from the input
  PermutationRepair repair;
};

// `candidates` must be aligned with `list.entries`. `job_description` may be
// empty (summary-only re-ranking).
RerankResult rerank(const RankedList& list, std::span<const RerankCandidate> candidates,
                    std::string_view job_description, std::string_view memory_summary,
                    ModelBackend& backend, TranscriptLog& log);

// ---- Deterministic biased-persona stub ----

enum class GenderSignal {
  ExplicitIndicators,  // infer gender from pronouns/honorifics in the bio text
  Label,               // read the dataset label
};
std::string_view to_string(GenderSignal s);
GenderSignal parse_gender_signal(std::string_view text);

struct StubPersonaConfig {
  double beta = 0.5;  // [-1, 1]; > 0 promotes the memory-favored gender
  bool gender_token_emission = true;
  std::uint64_t seed = 0;
  GenderSignal gender_signal = GenderSignal::ExplicitIndicators;
  double alignment_weight = 0.0;  // >= 0; pull toward memory-highlighted vocabulary
  void validate() const;
};

// Majority of explicit indicators (he/him/his/mr vs she/her/hers/mrs/ms/miss);
// nullopt when absent or tied.
std::optional<Gender> infer_gender_from_indicators(std::string_view text);

// Gender named right after a preference verb ("prefers female candidates").
std::optional<Gender> stated_gender_preference(std::string_view text);

// "gender does not influence", "regardless of gender", ...
bool states_gender_irrelevance(std::string_view text);

class StubBackend final : public ModelBackend {
 public:
  explicit StubBackend(StubPersonaConfig config);

  std::string name() const override { return "stub"; }
  const StubPersonaConfig& config() const { return config_; }

  std::string semantic_memory(std::span<const MemoryItem> memory, TranscriptLog& log) override;
  std::string personalized_query(std::string_view raw_query, std::span<const MemoryItem> memory,
                                 bool include_gender, TranscriptLog& log) override;
  std::string memory_summary(std::string_view semantic_memory, std::span<const MemoryItem> memory,
                             TranscriptLog& log) override;
  std::string job_description(std::string_view personalized_query, std::string_view memory_summary,
                              TranscriptLog& log) override;
  std::vector<std::string> rerank_order(std::span<const RerankCandidate> candidates,
                                        std::string_view job_description,
                                        std::string_view memory_summary, TranscriptLog& log) override;
  SummaryLabel classify(std::string_view summary, TranscriptLog& log) override;

  // Score bonus (in score units) applied to a memory-favored candidate.
  static double favored_bonus(double beta, std::span<const RerankCandidate> candidates);

 private:
  struct MemoryReading {
    int male = 0;
    int female = 0;
    std::optional<Gender> favored;
    std::vector<std::string> keywords;
  };
  MemoryReading read_memory(std::span<const MemoryItem> memory) const;
  std::optional<Gender> perceived_gender(const RerankCandidate& c) const;
  bool may_mention_gender() const;

  StubPersonaConfig config_;
};

// ---- Remote chat-completions backend ----

class RemoteBackend final : public ModelBackend {
 public:
  explicit RemoteBackend(RemoteChatConfig config);

  std::string name() const override { return "remote"; }
  std::string semantic_memory(std::span<const MemoryItem> memory, TranscriptLog& log) override;
  std::string personalized_query(std::string_view raw_query, std::span<const MemoryItem> memory,
                                 bool include_gender, TranscriptLog& log) override;
  std::string memory_summary(std::string_view semantic_memory, std::span<const MemoryItem> memory,
                             TranscriptLog& log) override;
  std::string job_description(std::string_view personalized_query, std::string_view memory_summary,
                              TranscriptLog& log) override;
  std::vector<std::string> rerank_order(std::span<const RerankCandidate> candidates,
                                        std::string_view job_description,
                                        std::string_view memory_summary, TranscriptLog& log) override;
  SummaryLabel classify(std::string_view summary, TranscriptLog& log) override;

  ChatClient& client() { return client_; }

 private:
  std::string call(TaskKind kind, const std::string& model, const std::string& prompt,
                   TranscriptLog& log);
  ChatClient client_;
};

// Ids inside the first JSON array of a model response; empty if none parses.
std::vector<std::string> parse_id_array(std::string_view response);

// Memory rendered as prompt lines (bios only, never labels).
std::string render_memory(std::span<const MemoryItem> memory);

}  // namespace membias

#endif  // MEMBIAS_GATEWAY_HPP_
