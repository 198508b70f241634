#include "membias/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "membias/metrics.hpp"

namespace membias {
namespace {

// Runs `fn`, prefixing any error with `where` while keeping its category.
template <typename F>
auto annotated(const std::string& where, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const BackendExhausted& e) {
    throw BackendExhausted(where + ": " + e.what());
  } catch (const BackendError& e) {
    throw BackendError(where + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  } catch (const IncompleteTraces&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
}

EmbeddingVector embed_one(const PipelineContext& ctx, const std::string& text) {
  return embed_batch(std::span<const std::string>(&text, 1), ctx.embedder(), ctx.cache()).front();
}

template <BioVariant V>
std::vector<MemoryItem> memory_items(const Corpus& corpus, std::span<const MemoryEntry* const> entries) {
  std::vector<MemoryItem> items;
  items.reserve(entries.size());
  for (const MemoryEntry* m : entries) {
    const auto& cand = corpus.candidate(m->shortlisted_candidate_id);
    items.push_back({m->posting_id, corpus.posting(m->posting_id).profession, m->shortlist_gender,
                     BioSource<V>::bio(cand), m->timestamp_ordinal});
  }
  return items;
}

template <BioVariant V>
TracedList trace_list(const PipelineContext& ctx, RankedList list, const JobPosting& posting,
                      std::span<const EmbeddingVector> shortlisted_vecs) {
  TracedList t;
  for (const auto& e : list.entries) {
    t.genders.push_back(ctx.corpus().candidate(e.candidate_id).gender);
    t.relevance.push_back(ctx.relevance(e.candidate_id, posting.profession));
  }
  std::vector<EmbeddingVector> top;
  for (std::size_t i = 0; i < list.entries.size() && i < 5; ++i) {
    const auto row = ctx.pool_vector(V, list.entries[i].candidate_id);
    top.emplace_back(row.begin(), row.end());
  }
  t.utility_at_5 = utility_at_5(shortlisted_vecs, top);
  t.list = std::move(list);
  return t;
}

template <BioVariant V>
StageTrace compose(const PipelineContext& ctx, ModelBackend& backend,
                   const RecruiterProfile& recruiter, const JobPosting& posting, ExperimentId e,
                   const StageTrace* partner, SemanticMemoryStore* store, StageTrace trace) {
  const Corpus& corpus = ctx.corpus();
  const std::string where = "[" + trace.key() + "]";
  auto at = [&](std::string_view stage) { return where + " " + std::string(stage); };

  const auto mem = task_memory(corpus, recruiter, posting);
  const auto items = memory_items<V>(corpus, mem);
  std::vector<std::string> shortlisted_bios;
  for (const auto& item : items) shortlisted_bios.push_back(item.shortlisted_bio);
  const auto shortlisted_vecs = annotated(at("memory"), [&] {
    return embed_batch(shortlisted_bios, ctx.embedder(), ctx.cache());
  });

  auto semantic = [&] {
    return annotated(at("semantic_memory"), [&] {
      SemanticMemoryStore::Entry entry;
      if (store) {
        entry = store->get(ctx, backend, recruiter, V);
      } else {
        std::vector<const MemoryEntry*> all;
        for (const auto& m : recruiter.episodic_memory) all.push_back(&m);
        entry.text = generate_semantic_memory(memory_items<V>(corpus, all), backend, entry.transcripts);
      }
      trace.transcripts.insert(trace.transcripts.end(), entry.transcripts.begin(), entry.transcripts.end());
      trace.semantic_memory = entry.text;
      return entry.text;
    });
  };
  auto summarize = [&] {
    const auto sem = semantic();
    trace.memory_summary = annotated(at("memory_summary"), [&] {
      return summarize_memory(sem, items, backend, trace.transcripts);
    });
    trace.summary_label = annotated(at("classify_summary"), [&] {
      return classify_summary(*trace.memory_summary, backend, trace.transcripts);
    });
  };
  auto retrieve = [&](const std::string& query_text, bool balanced) {
    return annotated(at("retrieval"), [&] {
      const auto q = embed_one(ctx, query_text);
      auto list = balanced ? retrieve_balanced(q, ctx.pool(V), ctx.k(), e, ctx.execution())
                           : retrieve_top_k(q, ctx.pool(V), ctx.k(), e, ctx.execution());
      return trace_list<V>(ctx, std::move(list), posting, shortlisted_vecs);
    });
  };
  auto reuse = [&](const StageTrace& p) {
    trace.shared_from = p.experiment;
    trace.retrieval = p.retrieval;
    trace.retrieval.list.experiment = e;
  };

  switch (e) {
    case ExperimentId::E0:
    case ExperimentId::E1:
      if (partner) {
        reuse(*partner);
      } else {
        trace.retrieval = retrieve(posting.raw_query, false);
      }
      if (e == ExperimentId::E1) summarize();
      break;
    case ExperimentId::E2:
      trace.retrieval = retrieve(posting.raw_query, true);
      summarize();
      break;
    case ExperimentId::E3:
    case ExperimentId::E4:
    case ExperimentId::E5:
    case ExperimentId::E6:
      if (partner) {
        reuse(*partner);
        trace.semantic_memory = partner->semantic_memory;
        trace.personalized_query = partner->personalized_query;
        trace.memory_summary = partner->memory_summary;
        trace.summary_label = partner->summary_label;
        trace.job_description = partner->job_description;
      } else {
        trace.personalized_query = annotated(at("personalized_query"), [&] {
          return create_personalized_query(posting.raw_query, items, e == ExperimentId::E5, backend,
                                           trace.transcripts);
        });
        summarize();
        trace.job_description = annotated(at("job_description"), [&] {
          return create_job_description(*trace.personalized_query, *trace.memory_summary, backend,
                                        trace.transcripts);
        });
        trace.retrieval = retrieve(*trace.job_description, false);
      }
      break;
  }

  if (has_rerank(e)) {
    const bool with_jd = e == ExperimentId::E4 || e == ExperimentId::E5 || e == ExperimentId::E6;
    trace.reranked = annotated(at("rerank"), [&] {
      std::vector<RerankCandidate> candidates;
      for (const auto& entry : trace.retrieval.list.entries) {
        const auto& cand = corpus.candidate(entry.candidate_id);
        candidates.push_back({cand.id, BioSource<V>::bio(cand), cand.gender, entry.score});
      }
      auto result = rerank(trace.retrieval.list, candidates,
                           with_jd ? std::string_view(*trace.job_description) : std::string_view(),
                           *trace.memory_summary, backend, trace.transcripts);
      if (result.repair.repaired()) trace.repairs.push_back(result.repair.describe());
      return trace_list<V>(ctx, std::move(result.list), posting, shortlisted_vecs);
    });
  }
  return trace;
}

}  // namespace

std::string_view to_string(BioVariant v) { return v == BioVariant::Raw ? "raw" : "scrubbed"; }

BioVariant bio_variant_for(ExperimentId e) {
  return e == ExperimentId::E6 ? BioVariant::Scrubbed : BioVariant::Raw;
}

PipelineContext::PipelineContext(const Corpus& corpus, EmbeddingProvider& embedder,
                                 EmbeddingCache* cache, std::size_t k, Execution execution)
    : corpus_(&corpus), embedder_(&embedder), cache_(cache), k_(k), execution_(execution) {
  if (k < 5) throw InputError("list length k must be at least 5 (utility uses the top 5), got " + std::to_string(k));
  std::vector<std::string> ids, raw, scrubbed;
  std::vector<Gender> genders;
  for (const auto& c : corpus.candidates) {
    if (c.split != Split::Train) continue;
    pool_index_.emplace(c.id, ids.size());
    ids.push_back(c.id);
    genders.push_back(c.gender);
    raw.push_back(c.raw_bio);
    scrubbed.push_back(c.scrubbed_bio);
  }
  if (ids.size() < k) {
    throw InputError("candidate pool has " + std::to_string(ids.size()) +
                     " train candidates, fewer than k = " + std::to_string(k));
  }
  const auto raw_vecs = embed_batch(raw, embedder, cache);
  const auto scrubbed_vecs = embed_batch(scrubbed, embedder, cache);
  raw_pool_ = EmbeddedPool(ids, genders, raw_vecs);
  scrubbed_pool_ = EmbeddedPool(std::move(ids), std::move(genders), scrubbed_vecs);

  std::vector<std::string> labels;
  for (const auto& [prof, share] : corpus.stats) labels.push_back(profession_label(prof));
  auto label_vecs = embed_batch(labels, embedder, cache);
  std::size_t j = 0;
  for (const auto& [prof, share] : corpus.stats) label_vecs_.emplace(prof, std::move(label_vecs[j++]));
}

std::span<const double> PipelineContext::pool_vector(BioVariant v, std::string_view candidate_id) const {
  auto it = pool_index_.find(std::string(candidate_id));
  if (it == pool_index_.end()) {
    throw InputError("candidate " + std::string(candidate_id) + " is not in the train pool");
  }
  return pool(v).matrix().row(it->second);
}

double PipelineContext::relevance(std::string_view candidate_id, std::string_view profession) const {
  auto label = label_vecs_.find(profession);
  if (label == label_vecs_.end()) throw InputError("unknown profession '" + std::string(profession) + "'");
  return cosine_similarity(pool_vector(BioVariant::Scrubbed, candidate_id), label->second);
}

std::vector<const MemoryEntry*> task_memory(const Corpus& corpus, const RecruiterProfile& recruiter,
                                            const JobPosting& posting) {
  std::vector<const MemoryEntry*> out;
  for (const auto& m : recruiter.episodic_memory) {
    if (corpus.posting(m.posting_id).profession == posting.profession) out.push_back(&m);
  }
  std::stable_sort(out.begin(), out.end(), [](const MemoryEntry* a, const MemoryEntry* b) {
    return a->timestamp_ordinal < b->timestamp_ordinal;
  });
  return out;
}

std::optional<Gender> memory_direction(std::span<const MemoryEntry* const> memory) {
  if (memory.empty()) throw InputError("memory direction of an empty memory");
  int male = 0, female = 0;
  for (const MemoryEntry* m : memory) (m->shortlist_gender == Gender::Male ? male : female) += 1;
  if (male > female) return Gender::Male;
  if (female > male) return Gender::Female;
  return std::nullopt;
}

std::string task_key(std::string_view recruiter_id, std::string_view posting_id, ExperimentId e) {
  return std::string(recruiter_id) + "/" + std::string(posting_id) + "/" + std::string(to_string(e));
}

std::string StageTrace::key() const { return task_key(recruiter_id, posting_id, experiment); }

std::optional<ExperimentId> retrieval_partner(ExperimentId e) {
  if (e == ExperimentId::E1) return ExperimentId::E0;
  if (e == ExperimentId::E4) return ExperimentId::E3;
  return std::nullopt;
}

void check_partner(const StageTrace& partner, std::string_view recruiter_id,
                   std::string_view posting_id, ExperimentId e, std::uint64_t seed) {
  const auto expected = retrieval_partner(e);
  if (!expected || partner.experiment != *expected) {
    throw InputError(std::string(to_string(partner.experiment)) + " cannot share retrieval with " +
                     std::string(to_string(e)));
  }
  if (partner.recruiter_id != recruiter_id || partner.posting_id != posting_id) {
    throw InputError("shared retrieval belongs to task " + partner.key() + ", not " +
                     task_key(recruiter_id, posting_id, e));
  }
  if (partner.seed != seed) {
    throw InputError("seed mismatch between " + partner.key() + " (seed " + std::to_string(partner.seed) +
                     ") and " + std::string(to_string(e)) + " (seed " + std::to_string(seed) + ")");
  }
}

SemanticMemoryStore::Entry SemanticMemoryStore::get(const PipelineContext& ctx, ModelBackend& backend,
                                                    const RecruiterProfile& recruiter,
                                                    BioVariant variant) {
  const std::string key = recruiter.id + "/" + std::string(to_string(variant));
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  std::vector<const MemoryEntry*> all;
  for (const auto& m : recruiter.episodic_memory) all.push_back(&m);
  Entry entry;
  const auto items = variant == BioVariant::Raw ? memory_items<BioVariant::Raw>(ctx.corpus(), all)
                                                : memory_items<BioVariant::Scrubbed>(ctx.corpus(), all);
  entry.text = generate_semantic_memory(items, backend, entry.transcripts);
  std::lock_guard lock(mutex_);
  return entries_.try_emplace(key, std::move(entry)).first->second;
}

StageTrace run_task(const PipelineContext& ctx, ModelBackend& backend,
                    const RecruiterProfile& recruiter, const JobPosting& posting, ExperimentId e,
                    std::uint64_t seed, const StageTrace* partner, SemanticMemoryStore* semantic_store) {
  const auto start = std::chrono::steady_clock::now();
  if (partner) check_partner(*partner, recruiter.id, posting.id, e, seed);
  if (e == ExperimentId::E2 && ctx.k() % 2 != 0) {
    throw InputError("balanced retrieval (E2) needs an even k, got " + std::to_string(ctx.k()));
  }
  if (std::find(recruiter.posting_ids.begin(), recruiter.posting_ids.end(), posting.id) ==
      recruiter.posting_ids.end()) {
    throw InputError("posting " + posting.id + " is not owned by recruiter " + recruiter.id);
  }

  StageTrace trace;
  trace.recruiter_id = recruiter.id;
  trace.posting_id = posting.id;
  trace.profession = posting.profession;
  trace.experiment = e;
  trace.raw_query = posting.raw_query;
  trace.seed = seed;

  const auto mem = task_memory(ctx.corpus(), recruiter, posting);
  if (mem.empty()) {
    throw InputError("[" + trace.key() + "] recruiter has no task-specific memory for this posting");
  }
  trace.memory.entries = mem.size();
  for (const MemoryEntry* m : mem) {
    (m->shortlist_gender == Gender::Male ? trace.memory.male : trace.memory.female) += 1;
    trace.memory.shortlisted_ids.push_back(m->shortlisted_candidate_id);
  }
  trace.memory.direction = memory_direction(mem);

  if (bio_variant_for(e) == BioVariant::Scrubbed) {
    trace = compose<BioVariant::Scrubbed>(ctx, backend, recruiter, posting, e, partner, semantic_store,
                                          std::move(trace));
  } else {
    trace = compose<BioVariant::Raw>(ctx, backend, recruiter, posting, e, partner, semantic_store,
                                     std::move(trace));
  }
  trace.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace membias
