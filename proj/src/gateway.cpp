#include "membias/gateway.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "membias/text.hpp"

namespace membias {

std::string_view to_string(TaskKind k) {
  switch (k) {
    case TaskKind::SemanticMemory: return "semantic_memory";
    case TaskKind::PersonalizedQuery: return "personalized_query";
    case TaskKind::MemorySummary: return "memory_summary";
    case TaskKind::JobDescription: return "job_description";
    case TaskKind::ReRank: return "rerank";
    case TaskKind::ClassifySummary: return "classify_summary";
  }
  return "semantic_memory";
}

TaskKind parse_task_kind(std::string_view text) {
  for (auto k : {TaskKind::SemanticMemory, TaskKind::PersonalizedQuery, TaskKind::MemorySummary,
                 TaskKind::JobDescription, TaskKind::ReRank, TaskKind::ClassifySummary}) {
    if (to_string(k) == text) return k;
  }
  throw InputError("unknown task kind '" + std::string(text) + "'");
}

std::string_view to_string(SummaryLabel l) {
  switch (l) {
    case SummaryLabel::Biased: return "Biased";
    case SummaryLabel::Neutral: return "Neutral";
    case SummaryLabel::Fair: return "Fair";
  }
  return "Neutral";
}

SummaryLabel parse_summary_label(std::string_view text) {
  std::string_view t = trim(text);
  if (to_lower(t.substr(0, std::min<std::size_t>(6, t.size()))) == "label:") t = trim(t.substr(6));
  while (!t.empty() && std::ispunct(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
  while (!t.empty() && std::ispunct(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
  const std::string v = to_lower(t);
  if (v == "biased") return SummaryLabel::Biased;
  if (v == "neutral") return SummaryLabel::Neutral;
  if (v == "fair") return SummaryLabel::Fair;
  throw BackendError("summary label '" + std::string(text.substr(0, 60)) +
                     "' is not one of Biased/Neutral/Fair");
}

std::string_view to_string(GenderSignal s) {
  return s == GenderSignal::Label ? "label" : "explicit-indicators";
}

GenderSignal parse_gender_signal(std::string_view text) {
  const std::string v = to_lower(trim(text));
  if (v == "label") return GenderSignal::Label;
  if (v == "explicit-indicators" || v == "indicators") return GenderSignal::ExplicitIndicators;
  throw InputError("unknown gender signal '" + std::string(text) + "'");
}

std::string generate_semantic_memory(std::span<const MemoryItem> episodic, ModelBackend& backend,
                                     TranscriptLog& log) {
  if (episodic.empty()) throw InputError("semantic memory needs a nonempty episodic memory");
  return backend.semantic_memory(episodic, log);
}

std::string create_personalized_query(std::string_view raw_query, std::span<const MemoryItem> episodic,
                                      bool include_gender, ModelBackend& backend, TranscriptLog& log) {
  if (trim(raw_query).empty()) throw InputError("personalized query needs a raw query");
  return backend.personalized_query(raw_query, episodic, include_gender, log);
}

std::string summarize_memory(std::string_view semantic_memory, std::span<const MemoryItem> episodic,
                             ModelBackend& backend, TranscriptLog& log) {
  if (trim(semantic_memory).empty() && episodic.empty()) {
    throw InputError("memory summary needs semantic or episodic memory");
  }
  return backend.memory_summary(semantic_memory, episodic, log);
}

std::string create_job_description(std::string_view personalized_query, std::string_view memory_summary,
                                   ModelBackend& backend, TranscriptLog& log) {
  if (trim(personalized_query).empty() || trim(memory_summary).empty()) {
    throw InputError("job description needs a personalized query and a memory summary");
  }
  return backend.job_description(personalized_query, memory_summary, log);
}

SummaryLabel classify_summary(std::string_view summary, ModelBackend& backend, TranscriptLog& log) {
  if (trim(summary).empty()) throw InputError("cannot classify an empty summary");
  return backend.classify(summary, log);
}

std::string PermutationRepair::describe() const {
  std::string out;
  if (!dropped.empty()) {
    out += "dropped";
    for (const auto& id : dropped) out += " " + id;
  }
  if (!appended.empty()) {
    if (!out.empty()) out += "; ";
    out += "appended";
    for (const auto& id : appended) out += " " + id;
  }
  return out;
}

PermutationRepair repair_permutation(std::span<const std::string> expected,
                                     std::span<const std::string> proposed) {
  const std::unordered_set<std::string> known(expected.begin(), expected.end());
  std::unordered_set<std::string> placed;
  PermutationRepair r;
  for (const auto& id : proposed) {
    if (known.count(id) && placed.insert(id).second) {
      r.order.push_back(id);
    } else {
      r.dropped.push_back(id);
    }
  }
  if (2 * r.order.size() < expected.size()) {
    throw BackendError("re-rank response recognized " + std::to_string(r.order.size()) + " of " +
                       std::to_string(expected.size()) + " candidate ids");
  }
  for (const auto& id : expected) {
    if (!placed.count(id)) {
      r.order.push_back(id);
      r.appended.push_back(id);
    }
  }
  return r;
}

RerankResult rerank(const RankedList& list, std::span<const RerankCandidate> candidates,
                    std::string_view job_description, std::string_view memory_summary,
                    ModelBackend& backend, TranscriptLog& log) {
  if (list.entries.empty()) throw InputError("cannot re-rank an empty list");
  if (candidates.size() != list.entries.size()) {
    throw InputError("re-rank candidates are not aligned with the ranked list");
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].id != list.entries[i].candidate_id) {
      throw InputError("re-rank candidate " + candidates[i].id + " does not match rank " +
                       std::to_string(i + 1));
    }
  }
  const auto expected = list.ids();
  const auto proposed = backend.rerank_order(candidates, job_description, memory_summary, log);
  RerankResult result;
  result.repair = repair_permutation(expected, proposed);

  std::unordered_map<std::string, double> score;
  for (const auto& e : list.entries) score[e.candidate_id] = e.score;
  result.list.stage = Stage::Reranking;
  result.list.experiment = list.experiment;
  result.list.k = list.k;
  int rank = 1;
  for (const auto& id : result.repair.order) {
    result.list.entries.push_back({id, score.at(id), rank++});
  }
  return result;
}

std::vector<std::string> parse_id_array(std::string_view response) {
  const auto open = response.find('[');
  const auto close = response.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) return {};
  try {
    const auto arr = nlohmann::json::parse(response.substr(open, close - open + 1));
    std::vector<std::string> ids;
    for (const auto& v : arr) {
      if (v.is_string()) ids.push_back(v.get<std::string>());
      else if (v.is_object() && v.contains("id") && v["id"].is_string()) ids.push_back(v["id"].get<std::string>());
    }
    return ids;
  } catch (const nlohmann::json::exception&) {
    return {};
  }
}

std::string render_memory(std::span<const MemoryItem> memory) {
  std::string out;
  for (const auto& m : memory) {
    out += "- Posting " + m.posting_id + " (" + m.profession + "), shortlisted candidate bio: " +
           m.shortlisted_bio + "\n";
  }
  if (out.empty()) out = "(no previous shortlisting)\n";
  return out;
}

}  // namespace membias
