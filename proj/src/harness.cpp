#include "membias/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "membias/pipeline.hpp"
#include "membias/rng.hpp"
#include "membias/trace_io.hpp"

namespace membias {
namespace {

using nlohmann::json;

constexpr const char* kConfigFile = "config.json";
constexpr const char* kPlanFile = "plan.txt";
constexpr const char* kTraceFile = "traces.jsonl";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InputError("unknown config key '" + std::string(where) + key + "'");
    }
  }
}

json experiments_json(std::span<const ExperimentId> experiments) {
  json arr = json::array();
  for (auto e : experiments) arr.push_back(to_string(e));
  return arr;
}

struct Unit {
  const RecruiterProfile* recruiter;
  const JobPosting* posting;
};

}  // namespace

std::string_view to_string(BackendKind k) { return k == BackendKind::Stub ? "stub" : "remote"; }

BackendKind parse_backend_kind(std::string_view text) {
  if (text == "stub") return BackendKind::Stub;
  if (text == "remote") return BackendKind::Remote;
  throw InputError("unknown backend '" + std::string(text) + "' (expected stub or remote)");
}

void RunConfig::validate() const {
  if (experiments.empty()) throw InputError("no experiments selected");
  if (k < 5) throw InputError("--k must be at least 5, got " + std::to_string(k));
  const bool has_e2 = std::find(experiments.begin(), experiments.end(), ExperimentId::E2) != experiments.end();
  if (has_e2 && k % 2 != 0) {
    throw InputError("--k must be even when E2 (balanced retrieval) is selected, got " + std::to_string(k));
  }
  if (embedding.dimension == 0) throw InputError("embedding dimension must be positive");
  stub.validate();
  if (backend == BackendKind::Remote && remote.api_key.empty()) {
    throw InputError("remote backend needs the MEMBIAS_API_KEY environment variable");
  }
}

json RunConfig::to_json() const {
  json j;
  j["experiments"] = experiments_json(experiments);
  j["corpus"] = corpus_dir.string();
  j["out"] = out_root.string();
  j["run_id"] = run_id;
  j["backend"] = to_string(backend);
  j["stub"] = {{"beta", stub.beta},
               {"gender_token_emission", stub.gender_token_emission},
               {"seed", stub.seed},
               {"gender_signal", to_string(stub.gender_signal)},
               {"alignment_weight", stub.alignment_weight}};
  j["remote"] = {{"endpoint", remote.endpoint},
                 {"model_small", remote.model_small},
                 {"model_large", remote.model_large},
                 {"max_in_flight", remote.max_in_flight},
                 {"tokens_per_minute", remote.tokens_per_minute},
                 {"temperature", remote.temperature},
                 {"max_attempts", remote.retry.max_attempts}};
  j["embedding"] = {{"provider", to_string(embedding.kind)},
                    {"model_id", embedding.model_id},
                    {"dimension", embedding.dimension},
                    {"endpoint", embedding.endpoint},
                    {"max_in_flight", embedding.max_in_flight}};
  j["cache"] = cache_dir ? json(cache_dir->string()) : json(nullptr);
  j["k"] = k;
  j["seed"] = seed;
  j["workers"] = workers;
  return j;
}

RunConfig RunConfig::from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  try {
    reject_unknown(j, {"experiments", "corpus", "out", "run_id", "backend", "stub", "remote", "embedding",
                       "cache", "k", "seed", "workers", "config_hash"},
                   "");
    if (j.contains("experiments")) {
      const auto& e = j.at("experiments");
      if (e.is_string()) {
        c.experiments = parse_experiment_list(e.get<std::string>());
      } else {
        std::string joined;
        for (const auto& item : e) joined += (joined.empty() ? "" : ",") + item.get<std::string>();
        c.experiments = parse_experiment_list(joined);
      }
    }
    if (j.contains("corpus")) c.corpus_dir = j.at("corpus").get<std::string>();
    if (j.contains("out")) c.out_root = j.at("out").get<std::string>();
    take(j, "run_id", c.run_id);
    if (j.contains("backend")) c.backend = parse_backend_kind(j.at("backend").get<std::string>());
    if (j.contains("stub")) {
      const auto& s = j.at("stub");
      reject_unknown(s, {"beta", "gender_token_emission", "seed", "gender_signal", "alignment_weight"}, "stub.");
      take(s, "beta", c.stub.beta);
      take(s, "gender_token_emission", c.stub.gender_token_emission);
      take(s, "seed", c.stub.seed);
      if (s.contains("gender_signal")) c.stub.gender_signal = parse_gender_signal(s.at("gender_signal").get<std::string>());
      take(s, "alignment_weight", c.stub.alignment_weight);
    }
    if (j.contains("remote")) {
      const auto& r = j.at("remote");
      reject_unknown(r, {"endpoint", "model_small", "model_large", "max_in_flight", "tokens_per_minute",
                         "temperature", "max_attempts"},
                     "remote.");
      take(r, "endpoint", c.remote.endpoint);
      take(r, "model_small", c.remote.model_small);
      take(r, "model_large", c.remote.model_large);
      take(r, "max_in_flight", c.remote.max_in_flight);
      take(r, "tokens_per_minute", c.remote.tokens_per_minute);
      take(r, "temperature", c.remote.temperature);
      take(r, "max_attempts", c.remote.retry.max_attempts);
    }
    if (j.contains("embedding")) {
      const auto& e = j.at("embedding");
      reject_unknown(e, {"provider", "model_id", "dimension", "endpoint", "max_in_flight"}, "embedding.");
      if (e.contains("provider")) c.embedding.kind = parse_provider_kind(e.at("provider").get<std::string>());
      take(e, "model_id", c.embedding.model_id);
      take(e, "dimension", c.embedding.dimension);
      take(e, "endpoint", c.embedding.endpoint);
      take(e, "max_in_flight", c.embedding.max_in_flight);
    }
    if (j.contains("cache")) {
      if (j.at("cache").is_null()) c.cache_dir.reset();
      else c.cache_dir = j.at("cache").get<std::string>();
    }
    take(j, "k", c.k);
    take(j, "seed", c.seed);
    take(j, "workers", c.workers);
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid config value: ") + e.what());
  }
  return c;
}

std::string RunConfig::hash() const {
  json j = to_json();
  j.erase("out");
  j.erase("run_id");
  j.erase("workers");
  j.erase("cache");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a64(j.dump()));
  return buf;
}

std::filesystem::path RunConfig::run_dir() const {
  return out_root / (run_id.empty() ? "run-" + hash().substr(0, 12) : run_id);
}

std::uint64_t task_seed(std::uint64_t master, std::string_view recruiter_id, std::string_view posting_id) {
  return derive_seed(master, {"task", recruiter_id, posting_id});
}

std::vector<std::string> planned_keys(const Corpus& corpus, std::span<const ExperimentId> experiments) {
  std::vector<std::string> keys;
  for (const auto& r : corpus.recruiters) {
    for (const auto& pid : r.posting_ids) {
      for (auto e : experiments) keys.push_back(task_key(r.id, pid, e));
    }
  }
  return keys;
}

std::unique_ptr<ModelBackend> make_backend(const RunConfig& config) {
  if (config.backend == BackendKind::Stub) return std::make_unique<StubBackend>(config.stub);
  if (config.remote.api_key.empty()) {
    throw InputError("remote backend needs the MEMBIAS_API_KEY environment variable");
  }
  return std::make_unique<RemoteBackend>(config.remote);
}

RunOutcome run_suite(const RunConfig& config, const RunControl& control) {
  config.validate();
  Corpus corpus = load_corpus(config.corpus_dir);
  validate_corpus(corpus);
  auto backend = make_backend(config);
  auto embedder = make_embedding_provider(config.embedding, config.cache_dir);
  std::optional<EmbeddingCache> cache;
  if (config.cache_dir && config.embedding.kind != ProviderKind::FileCache) cache.emplace(*config.cache_dir);
  return run_suite(config, corpus, *backend, *embedder, cache ? &*cache : nullptr, control);
}

RunOutcome run_suite(const RunConfig& config, const Corpus& corpus, ModelBackend& backend,
                     EmbeddingProvider& embedder, EmbeddingCache* cache, const RunControl& control) {
  if (config.backend == BackendKind::Stub || !config.remote.api_key.empty()) {
    config.validate();
  }
  RunOutcome outcome;
  outcome.run_dir = config.run_dir();
  std::filesystem::create_directories(outcome.run_dir);

  // Resolved config; a resumed run must match it.
  const auto config_path = outcome.run_dir / kConfigFile;
  const std::string hash = config.hash();
  if (std::filesystem::exists(config_path)) {
    json existing;
    try {
      existing = json::parse(read_file(config_path));
    } catch (const json::exception& e) {
      throw InputError("unreadable " + config_path.string() + ": " + e.what());
    }
    const auto previous = existing.value("config_hash", std::string());
    if (previous != hash) {
      throw InputError("run directory " + outcome.run_dir.string() + " belongs to config " + previous +
                       ", not " + hash + "; choose another --run-id or --out");
    }
  }
  json resolved = config.to_json();
  resolved["config_hash"] = hash;
  write_file_atomic(config_path, resolved.dump(2) + "\n");

  std::vector<ExperimentId> experiments = config.experiments;
  std::sort(experiments.begin(), experiments.end());
  experiments.erase(std::unique(experiments.begin(), experiments.end()), experiments.end());

  std::string plan;
  for (const auto& key : planned_keys(corpus, experiments)) plan += key + "\n";
  write_file_atomic(outcome.run_dir / kPlanFile, plan);

  // Existing traces; a torn final line from an interrupted write is dropped.
  const auto trace_path = outcome.run_dir / kTraceFile;
  auto log = read_trace_log(trace_path);
  if (log.torn_tail) std::filesystem::resize_file(trace_path, log.valid_bytes);
  std::unordered_map<std::string, StageTrace> done;
  for (auto& t : log.traces) {
    auto key = t.key();
    done.emplace(std::move(key), std::move(t));
  }
  outcome.resumed_traces = done.size();

  std::vector<Unit> pending;
  std::size_t total_units = 0;
  for (const auto& r : corpus.recruiters) {
    for (const auto& pid : r.posting_ids) {
      ++total_units;
      const bool complete = std::all_of(experiments.begin(), experiments.end(), [&](ExperimentId e) {
        return done.count(task_key(r.id, pid, e)) > 0;
      });
      if (!complete) pending.push_back({&r, &corpus.posting(pid)});
    }
  }

  if (!pending.empty()) {
    const PipelineContext ctx(corpus, embedder, cache, config.k);
    SemanticMemoryStore semantic;
    std::ofstream out(trace_path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot append to " + trace_path.string());

    const int threads = config.workers ? static_cast<int>(config.workers) : omp_get_max_threads();
    const std::size_t chunk = std::max<std::size_t>(1, static_cast<std::size_t>(threads) * 4);
    std::size_t limit = pending.size();
    if (control.max_units) limit = std::min(limit, *control.max_units);

    for (std::size_t start = 0; start < limit; start += chunk) {
      const std::size_t end = std::min(limit, start + chunk);
      std::vector<std::vector<StageTrace>> produced(end - start);
      std::vector<std::exception_ptr> failures(end - start);

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
      for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(end - start); ++i) {
        const Unit& unit = pending[start + static_cast<std::size_t>(i)];
        try {
          const auto seed = task_seed(config.seed, unit.recruiter->id, unit.posting->id);
          std::map<ExperimentId, const StageTrace*> available;
          for (auto e : experiments) {
            auto it = done.find(task_key(unit.recruiter->id, unit.posting->id, e));
            if (it != done.end()) available[e] = &it->second;
          }
          auto& mine = produced[static_cast<std::size_t>(i)];
          mine.reserve(experiments.size());
          for (auto e : experiments) {
            if (available.count(e)) continue;
            const StageTrace* partner = nullptr;
            if (auto p = retrieval_partner(e); p && available.count(*p)) partner = available[*p];
            mine.push_back(run_task(ctx, backend, *unit.recruiter, *unit.posting, e, seed, partner, &semantic));
            available[e] = &mine.back();
          }
        } catch (...) {
          failures[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }

      // Completed units are persisted in plan order up to the first failure.
      for (std::size_t i = 0; i < produced.size(); ++i) {
        if (failures[i]) {
          out.flush();
          std::rethrow_exception(failures[i]);
        }
        std::string lines;
        for (const auto& t : produced[i]) {
          lines += trace_line(t);
          if (!t.repairs.empty()) ++outcome.repaired_reranks;
        }
        out << lines;
        out.flush();
        outcome.executed_traces += produced[i].size();
      }
      if (control.progress) {
        *control.progress << "[" << (total_units - pending.size() + end) << "/" << total_units
                           << "] tasks written\n";
      }
    }
  }

  if (control.max_units && *control.max_units < pending.size()) return outcome;
  outcome.complete = true;
  outcome.report = report_run(outcome.run_dir);
  write_report(outcome.run_dir / "report", *outcome.report, ReportFormat::Csv);
  return outcome;
}

ExperimentReport report_run(const std::filesystem::path& run_dir) {
  const auto plan_path = run_dir / kPlanFile;
  if (!std::filesystem::exists(plan_path)) {
    throw InputError(run_dir.string() + " is not a run directory (no " + kPlanFile + ")");
  }
  std::vector<std::string> planned;
  {
    std::istringstream in(read_file(plan_path));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty()) planned.push_back(line);
    }
  }
  auto log = read_trace_log(run_dir / kTraceFile);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < log.traces.size(); ++i) {
    if (!index.emplace(log.traces[i].key(), i).second) {
      throw InputError("duplicate trace for task " + log.traces[i].key());
    }
  }
  std::vector<std::string> missing;
  std::vector<StageTrace> traces;
  traces.reserve(planned.size());
  for (const auto& key : planned) {
    auto it = index.find(key);
    if (it == index.end()) {
      missing.push_back(key);
    } else {
      traces.push_back(std::move(log.traces[it->second]));
    }
  }
  if (!missing.empty()) throw IncompleteTraces(std::move(missing));
  return build_report(traces);
}

}  // namespace membias
