#include "membias/trace_io.hpp"

#include <fstream>
#include <sstream>

namespace membias {
namespace {

using nlohmann::json;

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  } else {
    j[key] = nullptr;
  }
}

std::optional<std::string> get_optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

json traced_list_json(const TracedList& t) {
  json entries = json::array();
  for (std::size_t i = 0; i < t.list.entries.size(); ++i) {
    const auto& e = t.list.entries[i];
    entries.push_back({{"rank", e.rank},
                       {"id", e.candidate_id},
                       {"score", e.score},
                       {"gender", to_string(t.genders.at(i))},
                       {"relevance", t.relevance.at(i)}});
  }
  return {{"stage", to_string(t.list.stage)},
          {"experiment", to_string(t.list.experiment)},
          {"k", t.list.k},
          {"utility_at_5", t.utility_at_5},
          {"entries", std::move(entries)}};
}

TracedList traced_list_from_json(const json& j) {
  TracedList t;
  t.list = ranked_list_from_json(j);
  for (const auto& e : j.at("entries")) {
    t.genders.push_back(parse_gender(e.at("gender").get<std::string>()));
    t.relevance.push_back(e.at("relevance").get<double>());
  }
  t.utility_at_5 = j.at("utility_at_5").get<double>();
  return t;
}

}  // namespace

json to_json(const RankedList& list) {
  json entries = json::array();
  for (const auto& e : list.entries) {
    entries.push_back({{"rank", e.rank}, {"id", e.candidate_id}, {"score", e.score}});
  }
  return {{"stage", to_string(list.stage)},
          {"experiment", to_string(list.experiment)},
          {"k", list.k},
          {"entries", std::move(entries)}};
}

RankedList ranked_list_from_json(const json& j) {
  RankedList list;
  list.stage = parse_stage(j.at("stage").get<std::string>());
  list.experiment = parse_experiment(j.at("experiment").get<std::string>());
  list.k = j.at("k").get<std::size_t>();
  for (const auto& e : j.at("entries")) {
    list.entries.push_back({e.at("id").get<std::string>(), e.at("score").get<double>(), e.at("rank").get<int>()});
  }
  return list;
}

json to_json(const StageTrace& t) {
  json j;
  j["recruiter_id"] = t.recruiter_id;
  j["posting_id"] = t.posting_id;
  j["experiment"] = to_string(t.experiment);
  j["profession"] = t.profession;
  j["seed"] = t.seed;
  j["raw_query"] = t.raw_query;
  put_optional(j, "semantic_memory", t.semantic_memory);
  put_optional(j, "personalized_query", t.personalized_query);
  put_optional(j, "memory_summary", t.memory_summary);
  if (t.summary_label) {
    j["summary_label"] = to_string(*t.summary_label);
  } else {
    j["summary_label"] = nullptr;
  }
  put_optional(j, "job_description", t.job_description);
  j["memory"] = {{"entries", t.memory.entries},
                 {"male", t.memory.male},
                 {"female", t.memory.female},
                 {"direction", t.memory.direction ? json(to_string(*t.memory.direction)) : json(nullptr)},
                 {"shortlisted_ids", t.memory.shortlisted_ids}};
  j["shared_from"] = t.shared_from ? json(to_string(*t.shared_from)) : json(nullptr);
  j["retrieval_list"] = traced_list_json(t.retrieval);
  j["reranked_list"] = t.reranked ? traced_list_json(*t.reranked) : json(nullptr);
  j["repairs"] = t.repairs;
  json transcripts = json::array();
  for (const auto& tr : t.transcripts) {
    transcripts.push_back({{"task", to_string(tr.kind)},
                           {"backend", tr.backend},
                           {"model", tr.model},
                           {"attempts", tr.attempts},
                           {"request", tr.request},
                           {"response", tr.response}});
  }
  j["transcripts"] = std::move(transcripts);
  j["wall_clock_seconds"] = t.wall_clock_seconds;
  return j;
}

StageTrace trace_from_json(const json& j) {
  StageTrace t;
  t.recruiter_id = j.at("recruiter_id").get<std::string>();
  t.posting_id = j.at("posting_id").get<std::string>();
  t.experiment = parse_experiment(j.at("experiment").get<std::string>());
  t.profession = j.at("profession").get<std::string>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.raw_query = j.at("raw_query").get<std::string>();
  t.semantic_memory = get_optional_string(j, "semantic_memory");
  t.personalized_query = get_optional_string(j, "personalized_query");
  t.memory_summary = get_optional_string(j, "memory_summary");
  if (auto label = get_optional_string(j, "summary_label")) t.summary_label = parse_summary_label(*label);
  t.job_description = get_optional_string(j, "job_description");
  const auto& m = j.at("memory");
  t.memory.entries = m.at("entries").get<std::size_t>();
  t.memory.male = m.at("male").get<int>();
  t.memory.female = m.at("female").get<int>();
  if (!m.at("direction").is_null()) t.memory.direction = parse_gender(m.at("direction").get<std::string>());
  t.memory.shortlisted_ids = m.at("shortlisted_ids").get<std::vector<std::string>>();
  if (auto shared = get_optional_string(j, "shared_from")) t.shared_from = parse_experiment(*shared);
  t.retrieval = traced_list_from_json(j.at("retrieval_list"));
  if (!j.at("reranked_list").is_null()) t.reranked = traced_list_from_json(j.at("reranked_list"));
  t.repairs = j.at("repairs").get<std::vector<std::string>>();
  for (const auto& tr : j.at("transcripts")) {
    t.transcripts.push_back({parse_task_kind(tr.at("task").get<std::string>()),
                             tr.at("backend").get<std::string>(), tr.at("model").get<std::string>(),
                             tr.at("request").get<std::string>(), tr.at("response").get<std::string>(),
                             tr.at("attempts").get<int>()});
  }
  t.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  return t;
}

std::string trace_line(const StageTrace& trace) {
  return to_json(trace).dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

TraceLog read_trace_log(const std::filesystem::path& path) {
  TraceLog log;
  std::ifstream in(path, std::ios::binary);
  if (!in) return log;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    ++line_no;
    const auto nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      log.torn_tail = true;
      break;
    }
    const std::string_view line(data.data() + pos, nl - pos);
    try {
      log.traces.push_back(trace_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      if (nl + 1 == data.size()) {
        log.torn_tail = true;
        break;
      }
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed trace: " + e.what());
    }
    pos = nl + 1;
    log.valid_bytes = pos;
  }
  return log;
}

}  // namespace membias
