#ifndef MEMBIAS_HARNESS_HPP_
#define MEMBIAS_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "membias/chat_client.hpp"
#include "membias/corpus.hpp"
#include "membias/embedding.hpp"
#include "membias/gateway.hpp"
#include "membias/report.hpp"

namespace membias {

enum class BackendKind { Stub, Remote };
std::string_view to_string(BackendKind k);
BackendKind parse_backend_kind(std::string_view text);

struct RunConfig {
  std::vector<ExperimentId> experiments{kAllExperiments.begin(), kAllExperiments.end()};
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path out_root = "runs";
  std::string run_id;  // empty: "run-" + config hash prefix
  BackendKind backend = BackendKind::Stub;
  StubPersonaConfig stub;
  RemoteChatConfig remote;  // api_key is never serialized
  EmbeddingProviderConfig embedding;
  std::optional<std::filesystem::path> cache_dir;
  std::size_t k = kDefaultListLength;
  std::uint64_t seed = 0;
  std::size_t workers = 0;  // 0: OpenMP default

  void validate() const;
  nlohmann::json to_json() const;
  // Overlays the keys present in `j` onto `base`; unknown keys are errors.
  static RunConfig from_json(const nlohmann::json& j, RunConfig base);
  static RunConfig from_json(const nlohmann::json& j) { return from_json(j, RunConfig()); }
  // Hash of the result-determining fields (everything except output
  // location, run id, worker count and cache directory).
  std::string hash() const;
  std::filesystem::path run_dir() const;
};

// Master-seeded per-task seed shared by every experiment of the task.
std::uint64_t task_seed(std::uint64_t master, std::string_view recruiter_id, std::string_view posting_id);

// Every (recruiter, posting, experiment) key in execution order.
std::vector<std::string> planned_keys(const Corpus& corpus, std::span<const ExperimentId> experiments);

std::unique_ptr<ModelBackend> make_backend(const RunConfig& config);

struct RunControl {
  // Stop after this many (recruiter, posting) units have been written.
  std::optional<std::size_t> max_units;
  std::ostream* progress = nullptr;
};

struct RunOutcome {
  std::filesystem::path run_dir;
  std::size_t executed_traces = 0;
  std::size_t resumed_traces = 0;
  std::size_t repaired_reranks = 0;
  bool complete = false;
  std::optional<ExperimentReport> report;  // set when complete
};

// Loads the corpus and backends named by `config`.
RunOutcome run_suite(const RunConfig& config, const RunControl& control = {});

// Same, with caller-provided corpus and services.
RunOutcome run_suite(const RunConfig& config, const Corpus& corpus, ModelBackend& backend,
                     EmbeddingProvider& embedder, EmbeddingCache* cache,
                     const RunControl& control = {});

// Re-aggregates a run directory from its plan and trace log. Throws
// IncompleteTraces listing the missing keys.
ExperimentReport report_run(const std::filesystem::path& run_dir);

}  // namespace membias

#endif  // MEMBIAS_HARNESS_HPP_
