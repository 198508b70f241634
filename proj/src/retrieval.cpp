#include "membias/retrieval.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

namespace membias {
namespace {

std::vector<double> score_pool(std::span<const double> query, const EmbeddedPool& pool,
                               Execution execution) {
  std::vector<double> scores(pool.size());
  if (execution == Execution::Parallel) {
    kernels::cosine_scores_parallel(query, pool.matrix(), scores);
  } else {
    kernels::cosine_scores_serial(query, pool.matrix(), scores);
  }
  return scores;
}

// Orders pool rows by (score desc, id asc).
struct ScoreOrder {
  const std::vector<double>& scores;
  const EmbeddedPool& pool;
  bool operator()(std::size_t a, std::size_t b) const {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return pool.id(a) < pool.id(b);
  }
};

std::vector<std::size_t> top_rows(std::vector<std::size_t> rows, std::size_t k, const ScoreOrder& order) {
  std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end(), order);
  rows.resize(k);
  return rows;
}

RankedList make_list(const std::vector<std::size_t>& rows, const std::vector<double>& scores,
                     const EmbeddedPool& pool, std::size_t k, ExperimentId experiment) {
  RankedList list;
  list.stage = Stage::Retrieval;
  list.experiment = experiment;
  list.k = k;
  list.entries.reserve(rows.size());
  int rank = 1;
  for (std::size_t r : rows) list.entries.push_back({pool.id(r), scores[r], rank++});
  return list;
}

}  // namespace

std::vector<std::string> RankedList::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.candidate_id);
  return out;
}

void validate_ranked_list(const RankedList& list) {
  if (list.entries.size() != list.k) {
    throw std::logic_error("ranked list has " + std::to_string(list.entries.size()) +
                           " entries, expected " + std::to_string(list.k));
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    const auto& e = list.entries[i];
    if (e.rank != static_cast<int>(i) + 1) throw std::logic_error("ranks are not contiguous from 1");
    if (!seen.insert(e.candidate_id).second) {
      throw std::logic_error("duplicate candidate " + e.candidate_id + " in ranked list");
    }
    if (list.stage == Stage::Retrieval && i > 0 && e.score > list.entries[i - 1].score) {
      throw std::logic_error("retrieval scores increase at rank " + std::to_string(e.rank));
    }
  }
}

EmbeddedPool::EmbeddedPool(std::vector<std::string> ids, std::vector<Gender> genders,
                           std::span<const EmbeddingVector> vectors)
    : ids_(std::move(ids)), genders_(std::move(genders)) {
  if (ids_.size() != genders_.size() || ids_.size() != vectors.size()) {
    throw std::invalid_argument("pool ids, genders and vectors differ in length");
  }
  matrix_ = kernels::DenseMatrix(vectors.empty() ? 0 : vectors.front().size());
  for (const auto& v : vectors) matrix_.append(v);
}

RankedList retrieve_top_k(std::span<const double> query, const EmbeddedPool& pool, std::size_t k,
                          ExperimentId experiment, Execution execution) {
  if (k == 0) throw InputError("list length k must be positive");
  if (pool.size() < k) {
    throw InputError("pool has " + std::to_string(pool.size()) + " candidates, fewer than k=" +
                     std::to_string(k));
  }
  const auto scores = score_pool(query, pool, execution);
  std::vector<std::size_t> rows(pool.size());
  std::iota(rows.begin(), rows.end(), 0);
  const ScoreOrder order{scores, pool};
  return make_list(top_rows(std::move(rows), k, order), scores, pool, k, experiment);
}

RankedList retrieve_balanced(std::span<const double> query, const EmbeddedPool& pool, std::size_t k,
                             ExperimentId experiment, Execution execution) {
  if (k == 0 || k % 2 != 0) {
    throw InputError("balanced retrieval needs an even positive k (got " + std::to_string(k) + ")");
  }
  std::vector<std::size_t> male, female;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    (pool.gender(i) == Gender::Male ? male : female).push_back(i);
  }
  const std::size_t half = k / 2;
  if (male.size() < half || female.size() < half) {
    throw InputError("balanced retrieval needs " + std::to_string(half) +
                     " candidates of each gender (pool has " + std::to_string(male.size()) +
                     " male, " + std::to_string(female.size()) + " female)");
  }
  const auto scores = score_pool(query, pool, execution);
  const ScoreOrder order{scores, pool};
  auto rows = top_rows(std::move(male), half, order);
  auto top_female = top_rows(std::move(female), half, order);
  rows.insert(rows.end(), top_female.begin(), top_female.end());
  std::sort(rows.begin(), rows.end(), order);
  return make_list(rows, scores, pool, k, experiment);
}

}  // namespace membias
