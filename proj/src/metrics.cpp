#include "membias/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "membias/text.hpp"

namespace membias {
namespace {

std::vector<MeritItem> merit_items(const RankedList& list, const GenderMap& gender_of,
                                   const RelevanceMap& relevance) {
  std::vector<MeritItem> items;
  items.reserve(list.entries.size());
  for (const auto& e : list.entries) {
    auto g = gender_of.find(e.candidate_id);
    if (g == gender_of.end()) throw InputError("no gender for candidate " + e.candidate_id);
    auto rel = relevance.find(e.candidate_id);
    if (rel == relevance.end()) throw InputError("no relevance for candidate " + e.candidate_id);
    items.push_back({g->second, rel->second});
  }
  return items;
}

}  // namespace

double gain(int rank) {
  if (rank < 1) throw std::invalid_argument("gain: rank must be >= 1, got " + std::to_string(rank));
  return 1.0 / std::log2(static_cast<double>(rank) + 1.0);
}

double attention(int rank, int n) {
  if (n < 1 || rank < 1 || rank > n) {
    throw std::invalid_argument("attention: rank " + std::to_string(rank) + " outside 1.." +
                                std::to_string(n));
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += gain(j);
  return gain(rank) / total;
}

AttentionProfile AttentionProfile::for_length(int n) {
  if (n < 1) throw std::invalid_argument("attention profile needs n >= 1");
  AttentionProfile p;
  p.weights.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += gain(j);
  for (int r = 1; r <= n; ++r) p.weights[static_cast<std::size_t>(r - 1)] = gain(r) / total;
  return p;
}

GroupAttention group_attention(std::span<const Gender> genders_by_rank) {
  if (genders_by_rank.empty()) throw std::invalid_argument("group_attention: empty list");
  const auto profile = AttentionProfile::for_length(static_cast<int>(genders_by_rank.size()));
  GroupAttention ga;
  for (std::size_t i = 0; i < genders_by_rank.size(); ++i) {
    (genders_by_rank[i] == Gender::Male ? ga.a_male : ga.a_female) += profile.weights[i];
  }
  return ga;
}

GroupAttention group_attention(const RankedList& list, const GenderMap& gender_of) {
  std::vector<Gender> genders;
  genders.reserve(list.entries.size());
  for (const auto& e : list.entries) {
    auto it = gender_of.find(e.candidate_id);
    if (it == gender_of.end()) throw InputError("no gender for candidate " + e.candidate_id);
    genders.push_back(it->second);
  }
  return group_attention(genders);
}

std::string_view to_string(Cohort c) {
  switch (c) {
    case Cohort::HFB: return "hfb";
    case Cohort::BAL: return "bal";
    case Cohort::HMB: return "hmb";
  }
  return "bal";
}

Cohort cohort_of(double a_male) {
  if (!(a_male >= 0.0 && a_male <= 1.0)) {
    throw std::invalid_argument("cohort_of: A(male) must lie in [0, 1], got " + std::to_string(a_male));
  }
  if (a_male <= 0.3) return Cohort::HFB;
  if (a_male <= 0.7) return Cohort::BAL;
  return Cohort::HMB;
}

int meritocratic_unfairness(std::size_t position, std::span<const MeritItem> ranked) {
  if (position >= ranked.size()) throw std::out_of_range("meritocratic_unfairness: position out of range");
  const auto& me = ranked[position];
  int count = 0;
  for (std::size_t i = 0; i < position; ++i) {
    if (ranked[i].gender != me.gender && ranked[i].relevance < me.relevance) ++count;
  }
  return count;
}

int meritocratic_unfairness(std::string_view candidate_id, const RankedList& list,
                            const GenderMap& gender_of, const RelevanceMap& relevance) {
  std::size_t pos = list.entries.size();
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    if (list.entries[i].candidate_id == candidate_id) pos = i;
  }
  if (pos == list.entries.size()) {
    throw InputError("candidate " + std::string(candidate_id) + " is not in the list");
  }
  const auto items = merit_items(list, gender_of, relevance);
  return meritocratic_unfairness(pos, items);
}

long aggregate_unfairness(std::span<const MeritItem> ranked, Gender group) {
  long total = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].gender == group) total += meritocratic_unfairness(i, ranked);
  }
  return total;
}

bool unfairness_increase_flag(std::span<const MeritItem> retrieval,
                              std::span<const MeritItem> reranked, Gender memory_favored) {
  const Gender disfavored = opposite(memory_favored);
  return aggregate_unfairness(reranked, disfavored) > aggregate_unfairness(retrieval, disfavored);
}

bool unfairness_increase_flag(const RankedList& retrieval, const RankedList& reranked,
                              Gender memory_favored, const GenderMap& gender_of,
                              const RelevanceMap& relevance) {
  if (reranked.stage != Stage::Reranking) {
    throw InputError("unfairness_increase_flag needs a re-ranked list");
  }
  return unfairness_increase_flag(merit_items(retrieval, gender_of, relevance),
                                  merit_items(reranked, gender_of, relevance), memory_favored);
}

double utility_at_5(std::span<const EmbeddingVector> shortlisted_bios,
                    std::span<const EmbeddingVector> ranked_bios) {
  if (shortlisted_bios.empty()) throw InputError("utility_at_5: no shortlisted bios");
  if (ranked_bios.size() < 5) throw InputError("utility_at_5: ranked list has fewer than 5 entries");
  double total = 0.0;
  for (const auto& s : shortlisted_bios) {
    for (std::size_t i = 0; i < 5; ++i) total += cosine_similarity(s, ranked_bios[i]);
  }
  return total / static_cast<double>(shortlisted_bios.size() * 5);
}

double utility_at_5(std::span<const std::string> shortlisted_bios,
                    std::span<const std::string> ranked_bios, EmbeddingProvider& embedder,
                    EmbeddingCache* cache) {
  if (ranked_bios.size() < 5) throw InputError("utility_at_5: ranked list has fewer than 5 entries");
  const auto s = embed_batch(shortlisted_bios, embedder, cache);
  const auto r = embed_batch(ranked_bios.subspan(0, 5), embedder, cache);
  return utility_at_5(s, r);
}

GenderMentions detect_gender_mentions(std::string_view text) {
  GenderMentions m;
  m.terms = gender_terms_lexicon().find(text);
  m.found = !m.terms.empty();
  return m;
}

}  // namespace membias
