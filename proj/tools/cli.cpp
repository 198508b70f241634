#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "membias/corpus.hpp"
#include "membias/harness.hpp"
#include "membias/pipeline.hpp"
#include "membias/report.hpp"

namespace membias::cli {
namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

// Embedding flags shared by synth, embed and run.
struct EmbeddingFlags {
  std::string provider = "hashing";
  std::string model_id;
  std::size_t dimension = 0;
  std::string endpoint;
  std::string cache;
  CLI::Option* provider_opt = nullptr;
  CLI::Option* model_opt = nullptr;
  CLI::Option* dimension_opt = nullptr;
  CLI::Option* endpoint_opt = nullptr;
  CLI::Option* cache_opt = nullptr;

  void add(CLI::App& app) {
    provider_opt = app.add_option("--embedding-provider", provider, "hashing | file | remote");
    model_opt = app.add_option("--embedding-model", model_id, "Embedding model id");
    dimension_opt = app.add_option("--embedding-dim", dimension, "Embedding dimension");
    endpoint_opt = app.add_option("--embedding-endpoint", endpoint, "Remote embeddings URL");
    cache_opt = app.add_option("--cache", cache, "Embedding cache directory");
  }

  void apply(EmbeddingProviderConfig& c, std::optional<std::filesystem::path>& cache_dir) const {
    if (provider_opt->count()) c.kind = parse_provider_kind(provider);
    if (model_opt->count()) c.model_id = model_id;
    if (dimension_opt->count()) c.dimension = dimension;
    if (endpoint_opt->count()) c.endpoint = endpoint;
    if (cache_opt->count()) cache_dir = cache;
    if (c.kind == ProviderKind::Remote && c.endpoint.empty()) {
      if (auto url = env("MEMBIAS_EMBEDDING_URL")) c.endpoint = *url;
    }
  }
};

struct SynthArgs {
  std::string bios;
  std::string out = "corpus";
  SynthOptions synth;
  bool scrub = false;
  std::string default_split;
  BioFields fields;
  EmbeddingFlags embedding;
};

struct EmbedArgs {
  std::string corpus = "corpus";
  EmbeddingFlags embedding;
};

struct RunArgs {
  std::string config;
  std::string corpus, experiments, backend, out, run_id, stub_signal;
  double stub_beta = 0.0, stub_alignment = 0.0;
  bool stub_emission = true;
  std::uint64_t stub_seed = 0, seed = 0;
  std::size_t k = 0, workers = 0, max_units = 0;
  std::map<std::string, CLI::Option*> opts;
  EmbeddingFlags embedding;
};

struct ReportArgs {
  std::string run;
  std::string format = "csv";
};

struct ClassifyArgs {
  std::string text, file;
  std::string backend = "stub";
};

void check_readable(const std::string& flag, const std::string& path) {
  if (!std::filesystem::exists(path)) throw InputError(flag + ": no such file or directory: " + path);
}

// Env-provided remote settings; applied before config file and flags.
void apply_remote_env(RunConfig& c) {
  if (auto key = env("MEMBIAS_API_KEY")) c.remote.api_key = *key;
  if (auto url = env("MEMBIAS_CHAT_URL")) c.remote.endpoint = *url;
  if (auto m = env("MEMBIAS_MODEL_SMALL")) c.remote.model_small = *m;
  if (auto m = env("MEMBIAS_MODEL_LARGE")) c.remote.model_large = *m;
}

int do_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
  check_readable("--bios", a.bios);
  std::optional<Split> default_split;
  if (!a.default_split.empty()) default_split = parse_split(a.default_split);
  auto candidates = load_bios(a.bios, default_split, a.fields, 0, &err);
  for (auto& c : candidates) {
    if (c.scrubbed_bio.empty()) c.scrubbed_bio = scrub_gender_indicators(c.raw_bio, c.first_name);
  }
  EmbeddingProviderConfig ec;
  std::optional<std::filesystem::path> cache_dir;
  a.embedding.apply(ec, cache_dir);
  auto embedder = make_embedding_provider(ec, cache_dir);
  std::optional<EmbeddingCache> cache;
  if (cache_dir && ec.kind != ProviderKind::FileCache) cache.emplace(*cache_dir);

  const Corpus corpus = synthesize_corpus(std::move(candidates), a.synth, *embedder, cache ? &*cache : nullptr);
  validate_corpus(corpus);
  write_corpus(a.out, corpus, a.scrub);

  std::map<std::string, std::size_t> postings_per_profession;
  for (const auto& p : corpus.postings) ++postings_per_profession[p.profession];
  out << "candidates: " << corpus.candidates.size() << ", postings: " << corpus.postings.size()
      << ", recruiters: " << corpus.recruiters.size() << "\n";
  out << "profession,candidates,p_male,p_female,postings\n";
  for (const auto& [prof, share] : corpus.stats) {
    out << prof << "," << share.count << "," << share.p_male << "," << share.p_female << ","
        << postings_per_profession[prof] << "\n";
  }
  std::size_t male = 0, female = 0, tie = 0;
  for (const auto& r : corpus.recruiters) {
    for (const auto& pid : r.posting_ids) {
      const auto dir = memory_direction(task_memory(corpus, r, corpus.posting(pid)));
      if (!dir) ++tie;
      else (*dir == Gender::Male ? male : female) += 1;
    }
  }
  out << "memory direction: rm_male " << male << ", rm_female " << female << ", tie " << tie << "\n";
  return kOk;
}

int do_embed(const EmbedArgs& a, std::ostream& out) {
  check_readable("--corpus", a.corpus);
  EmbeddingProviderConfig ec;
  std::optional<std::filesystem::path> cache_dir;
  a.embedding.apply(ec, cache_dir);
  if (!cache_dir) throw InputError("--cache is required for embed");
  if (ec.kind == ProviderKind::FileCache) throw InputError("--embedding-provider file cannot fill a cache");
  const Corpus corpus = load_corpus(a.corpus);
  std::vector<std::string> texts;
  for (const auto& c : corpus.candidates) {
    texts.push_back(c.raw_bio);
    texts.push_back(c.scrubbed_bio);
  }
  for (const auto& [prof, share] : corpus.stats) texts.push_back(profession_label(prof));
  auto embedder = make_embedding_provider(ec, cache_dir);
  EmbeddingCache cache(*cache_dir);
  embed_batch(texts, *embedder, &cache);
  out << "embedded " << texts.size() << " texts into " << cache_dir->string() << "\n";
  return kOk;
}

RunConfig resolve_run_config(const RunArgs& a) {
  RunConfig c;
  apply_remote_env(c);
  if (!a.config.empty()) {
    check_readable("--config", a.config);
    std::ifstream in(a.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("--config: " + a.config + " is not valid JSON: " + e.what());
    }
    c = RunConfig::from_json(j, c);
  }
  auto set = [&](const char* name) { return a.opts.at(name)->count() > 0; };
  if (set("--corpus")) c.corpus_dir = a.corpus;
  if (set("--experiments")) c.experiments = parse_experiment_list(a.experiments);
  if (set("--backend")) c.backend = parse_backend_kind(a.backend);
  if (set("--stub-beta")) c.stub.beta = a.stub_beta;
  if (set("--stub-emission")) c.stub.gender_token_emission = a.stub_emission;
  if (set("--stub-signal")) c.stub.gender_signal = parse_gender_signal(a.stub_signal);
  if (set("--stub-alignment")) c.stub.alignment_weight = a.stub_alignment;
  if (set("--stub-seed")) c.stub.seed = a.stub_seed;
  if (set("--k")) c.k = a.k;
  if (set("--seed")) c.seed = a.seed;
  if (set("--out")) c.out_root = a.out;
  if (set("--run-id")) c.run_id = a.run_id;
  if (set("--workers")) c.workers = a.workers;
  a.embedding.apply(c.embedding, c.cache_dir);
  c.validate();
  return c;
}

int do_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig config = resolve_run_config(a);
  check_readable("--corpus", config.corpus_dir.string());
  RunControl control;
  control.progress = &err;
  if (a.opts.at("--max-units")->count()) control.max_units = a.max_units;
  const auto outcome = run_suite(config, control);
  if (outcome.repaired_reranks) {
    err << "warning: " << outcome.repaired_reranks << " re-rank response(s) needed permutation repair\n";
  }
  out << "run directory: " << outcome.run_dir.string() << "\n";
  if (!outcome.complete) {
    out << "stopped early; rerun the same command to resume\n";
    return kOk;
  }
  out << report_summary(*outcome.report);
  return kOk;
}

int do_report(const ReportArgs& a, std::ostream& out) {
  check_readable("--run", a.run);
  const auto format = parse_report_format(a.format);
  const auto report = report_run(a.run);
  const auto dir = std::filesystem::path(a.run) / "report";
  write_report(dir, report, format);
  if (format == ReportFormat::Markdown) {
    out << render_report(report, format).at("report.md");
  } else {
    out << report_summary(report);
  }
  return kOk;
}

int do_classify(const ClassifyArgs& a, const RunArgs& stub, std::ostream& out) {
  std::string text = a.text;
  if (!a.file.empty()) {
    check_readable("--file", a.file);
    std::ifstream in(a.file);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (text.empty()) throw InputError("classify needs --text or --file");
  RunConfig c;
  apply_remote_env(c);
  c.backend = parse_backend_kind(a.backend);
  if (stub.opts.at("--stub-beta")->count()) c.stub.beta = stub.stub_beta;
  auto backend = make_backend(c);
  TranscriptLog log;
  out << to_string(classify_summary(text, *backend, log)) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Memory-personalization bias audit: corpus synthesis, experiments E0-E6, reports"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize postings, recruiters and memories from a bios file");
  synth_cmd->add_option("--bios", synth.bios, "Bios file (.csv or .jsonl)")->required();
  synth_cmd->add_option("--out", synth.out, "Corpus output directory")->capture_default_str();
  synth_cmd->add_option("--postings", synth.synth.n_postings, "Number of job postings")->capture_default_str();
  synth_cmd->add_option("--recruiters", synth.synth.n_recruiters, "Number of recruiters")->capture_default_str();
  synth_cmd->add_option("--seed", synth.synth.seed, "Master seed")->capture_default_str();
  synth_cmd->add_flag("--scrub", synth.scrub, "Also write corpus/scrubbed/candidates.jsonl");
  synth_cmd->add_option("--default-split", synth.default_split, "Split for rows without one (train|test)");
  synth_cmd->add_option("--bio-field", synth.fields.bio, "Bio column name")->capture_default_str();
  synth_cmd->add_option("--profession-field", synth.fields.profession, "Profession column name")->capture_default_str();
  synth_cmd->add_option("--gender-field", synth.fields.gender, "Gender column name")->capture_default_str();
  synth_cmd->add_option("--split-field", synth.fields.split, "Split column name")->capture_default_str();
  synth_cmd->add_option("--name-field", synth.fields.name, "First-name column name")->capture_default_str();
  synth.embedding.add(*synth_cmd);

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Precompute bio and profession embeddings into a cache");
  embed_cmd->add_option("--corpus", embed.corpus, "Corpus directory")->capture_default_str();
  embed.embedding.add(*embed_cmd);

  RunArgs runa;
  auto* run_cmd = app.add_subcommand("run", "Execute experiments and write traces and reports");
  runa.opts["--config"] = run_cmd->add_option("--config", runa.config, "JSON run configuration");
  runa.opts["--corpus"] = run_cmd->add_option("--corpus", runa.corpus, "Corpus directory (default corpus)");
  runa.opts["--experiments"] = run_cmd->add_option("--experiments", runa.experiments, "e.g. E0,E1,E5 (default all)");
  runa.opts["--backend"] = run_cmd->add_option("--backend", runa.backend, "stub | remote (default stub)");
  runa.opts["--stub-beta"] = run_cmd->add_option("--stub-beta", runa.stub_beta, "Stub bias strength in [-1, 1] (default 0.5)");
  runa.opts["--stub-emission"] = run_cmd->add_option("--stub-emission", runa.stub_emission, "Stub emits gender tokens (default true)");
  runa.opts["--stub-signal"] = run_cmd->add_option("--stub-signal", runa.stub_signal, "explicit-indicators | label");
  runa.opts["--stub-alignment"] = run_cmd->add_option("--stub-alignment", runa.stub_alignment, "Stub pull toward memory vocabulary (default 0)");
  runa.opts["--stub-seed"] = run_cmd->add_option("--stub-seed", runa.stub_seed, "Stub phrasing seed");
  runa.opts["--k"] = run_cmd->add_option("--k", runa.k, "List length (default 20)");
  runa.opts["--seed"] = run_cmd->add_option("--seed", runa.seed, "Run seed (default 0)");
  runa.opts["--out"] = run_cmd->add_option("--out", runa.out, "Runs root directory (default runs)");
  runa.opts["--run-id"] = run_cmd->add_option("--run-id", runa.run_id, "Run directory name (default from config hash)");
  runa.opts["--workers"] = run_cmd->add_option("--workers", runa.workers, "Parallel tasks (default: all cores)");
  runa.opts["--max-units"] = run_cmd->add_option("--max-units", runa.max_units,
                                                 "Stop after this many (recruiter, posting) tasks; rerun to resume");
  runa.embedding.add(*run_cmd);

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Re-aggregate reports from a run directory");
  report_cmd->add_option("--run", report.run, "Run directory")->required();
  report_cmd->add_option("--format", report.format, "csv | md")->capture_default_str();

  ClassifyArgs classify;
  RunArgs classify_stub;
  auto* classify_cmd = app.add_subcommand("classify", "Label a memory summary as Biased, Neutral or Fair");
  classify_cmd->add_option("--text", classify.text, "Summary text");
  classify_cmd->add_option("--file", classify.file, "File holding the summary");
  classify_cmd->add_option("--backend", classify.backend, "stub | remote")->capture_default_str();
  classify_stub.opts["--stub-beta"] = classify_cmd->add_option("--stub-beta", classify_stub.stub_beta, "Stub bias strength");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*synth_cmd) return do_synth(synth, out, err);
    if (*embed_cmd) return do_embed(embed, out);
    if (*run_cmd) return do_run(runa, out, err);
    if (*report_cmd) return do_report(report, out);
    if (*classify_cmd) return do_classify(classify, classify_stub, out);
  } catch (const IncompleteTraces& e) {
    err << "error: " << e.what() << "\n";
    return kIncompleteTraces;
  } catch (const BackendError& e) {
    err << "error: " << e.what() << "\n";
    return kBackendError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace membias::cli
