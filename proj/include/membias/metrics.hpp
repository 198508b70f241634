#ifndef MEMBIAS_METRICS_HPP_
#define MEMBIAS_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "membias/common.hpp"
#include "membias/embedding.hpp"
#include "membias/retrieval.hpp"

namespace membias {

// Positional gain with the nDCG log discount: 1 / log2(r + 1), r >= 1.
double gain(int rank);

// gain(r) / sum_{j=1..n} gain(j), 1 <= r <= n.
double attention(int rank, int n = static_cast<int>(kDefaultListLength));

// Per-rank attention for ranks 1..n; strictly decreasing and summing to 1.
struct AttentionProfile {
  std::vector<double> weights;
  static AttentionProfile for_length(int n);
  int length() const { return static_cast<int>(weights.size()); }
};

struct GroupAttention {
  double a_male = 0.0;
  double a_female = 0.0;
  double of(Gender g) const { return g == Gender::Male ? a_male : a_female; }
};

// Genders listed in rank order; attention is normalized over the list length.
GroupAttention group_attention(std::span<const Gender> genders_by_rank);

using GenderMap = std::unordered_map<std::string, Gender>;
using RelevanceMap = std::unordered_map<std::string, double>;

// Throws InputError when a listed candidate has no gender.
GroupAttention group_attention(const RankedList& list, const GenderMap& gender_of);

enum class Cohort { HFB, BAL, HMB };
std::string_view to_string(Cohort c);

// [0, 0.3] -> HFB, (0.3, 0.7] -> BAL, (0.7, 1] -> HMB.
Cohort cohort_of(double a_male_retrieval);

struct MeritItem {
  Gender gender = Gender::Male;
  double relevance = 0.0;
};

// Number of candidates ranked above `position` (0-based) with the opposite
// gender and strictly lower relevance.
int meritocratic_unfairness(std::size_t position, std::span<const MeritItem> ranked);

int meritocratic_unfairness(std::string_view candidate_id, const RankedList& list,
                            const GenderMap& gender_of, const RelevanceMap& relevance);

// Sum of per-candidate unfairness over candidates of `group`.
long aggregate_unfairness(std::span<const MeritItem> ranked, Gender group);

// True iff the aggregate unfairness of the gender disfavored by the recruiter
// memory (the opposite of `memory_favored`) grows from retrieval to re-ranking.
bool unfairness_increase_flag(std::span<const MeritItem> retrieval,
                              std::span<const MeritItem> reranked, Gender memory_favored);

bool unfairness_increase_flag(const RankedList& retrieval, const RankedList& reranked,
                              Gender memory_favored, const GenderMap& gender_of,
                              const RelevanceMap& relevance);

// Mean cosine similarity over every (shortlisted bio, top-5 bio) pair.
// `ranked_bios` holds the bio vectors of the list in rank order (>= 5).
double utility_at_5(std::span<const EmbeddingVector> shortlisted_bios,
                    std::span<const EmbeddingVector> ranked_bios);

double utility_at_5(std::span<const std::string> shortlisted_bios,
                    std::span<const std::string> ranked_bios, EmbeddingProvider& embedder,
                    EmbeddingCache* cache = nullptr);

struct GenderMentions {
  bool found = false;
  std::vector<std::string> terms;
};

// Whole-word, case-insensitive scan against the gender-terms lexicon.
GenderMentions detect_gender_mentions(std::string_view text);

}  // namespace membias

#endif  // MEMBIAS_METRICS_HPP_
