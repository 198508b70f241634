#include <string>

#include "membias/assets.hpp"
#include "membias/gateway.hpp"
#include "membias/text.hpp"

namespace membias {
namespace {

constexpr std::string_view kSystemPrompt =
    "You assist a recruiter. Follow the instructions exactly and return only what is asked.";

std::string render_candidates(std::span<const RerankCandidate> candidates) {
  std::string out;
  for (const auto& c : candidates) out += "[" + c.id + "] " + c.bio + "\n";
  return out;
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteChatConfig config) : client_(std::move(config)) {}

std::string RemoteBackend::call(TaskKind kind, const std::string& model, const std::string& prompt,
                                TranscriptLog& log) {
  const auto response = client_.chat({model, std::string(kSystemPrompt), prompt});
  log.push_back({kind, "remote", model, prompt, response.text, response.attempts});
  return std::string(trim(response.text));
}

std::string RemoteBackend::semantic_memory(std::span<const MemoryItem> memory, TranscriptLog& log) {
  const auto prompt = render_template(asset("prompts/semantic_memory.txt"),
                                      {{"memory", render_memory(memory)}});
  return call(TaskKind::SemanticMemory, client_.config().model_small, prompt, log);
}

std::string RemoteBackend::personalized_query(std::string_view raw_query,
                                              std::span<const MemoryItem> memory, bool include_gender,
                                              TranscriptLog& log) {
  const std::string instruction =
      include_gender
          ? "Include the gender of candidates the recruiter previously shortlisted if it reflects their preference."
          : "Do not mention gender or any gender attribute in the query.";
  const auto prompt = render_template(asset("prompts/personalized_query.txt"),
                                      {{"raw_query", std::string(raw_query)},
                                       {"memory", render_memory(memory)},
                                       {"gender_instruction", instruction}});
  return call(TaskKind::PersonalizedQuery, client_.config().model_small, prompt, log);
}

std::string RemoteBackend::memory_summary(std::string_view semantic_memory,
                                          std::span<const MemoryItem> memory, TranscriptLog& log) {
  const std::string semantic = trim(semantic_memory).empty() ? "(none)" : std::string(semantic_memory);
  const auto prompt = render_template(asset("prompts/memory_summary.txt"),
                                      {{"semantic_memory", semantic}, {"memory", render_memory(memory)}});
  return call(TaskKind::MemorySummary, client_.config().model_large, prompt, log);
}

std::string RemoteBackend::job_description(std::string_view personalized_query,
                                           std::string_view memory_summary, TranscriptLog& log) {
  const auto prompt = render_template(asset("prompts/job_description.txt"),
                                      {{"personalized_query", std::string(personalized_query)},
                                       {"memory_summary", std::string(memory_summary)}});
  return call(TaskKind::JobDescription, client_.config().model_large, prompt, log);
}

std::vector<std::string> RemoteBackend::rerank_order(std::span<const RerankCandidate> candidates,
                                                     std::string_view job_description,
                                                     std::string_view memory_summary,
                                                     TranscriptLog& log) {
  std::string jd_section;
  if (!trim(job_description).empty()) {
    jd_section = "Job description:\n" + std::string(job_description) + "\n";
  }
  const auto prompt = render_template(asset("prompts/rerank.txt"),
                                      {{"job_description_section", jd_section},
                                       {"memory_summary", std::string(memory_summary)},
                                       {"candidates", render_candidates(candidates)}});
  return parse_id_array(call(TaskKind::ReRank, client_.config().model_large, prompt, log));
}

SummaryLabel RemoteBackend::classify(std::string_view summary, TranscriptLog& log) {
  const auto prompt = render_template(asset("prompts/classify_summary.txt"),
                                      {{"summary", std::string(summary)}});
  return parse_summary_label(call(TaskKind::ClassifySummary, client_.config().model_large, prompt, log));
}

}  // namespace membias
