#ifndef MEMBIAS_RETRIEVAL_HPP_
#define MEMBIAS_RETRIEVAL_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "membias/common.hpp"
#include "membias/embedding.hpp"
#include "membias/kernels.hpp"

namespace membias {

inline constexpr std::size_t kDefaultListLength = 20;

struct RankedEntry {
  std::string candidate_id;
  double score = 0.0;
  int rank = 0;  // 1-based
};

struct RankedList {
  std::vector<RankedEntry> entries;
  Stage stage = Stage::Retrieval;
  ExperimentId experiment = ExperimentId::E0;
  std::size_t k = 0;

  std::vector<std::string> ids() const;
  std::size_t size() const { return entries.size(); }
};

// Contiguous ranks 1..k, distinct ids, non-increasing scores for retrieval
// lists. Throws std::logic_error on violation.
void validate_ranked_list(const RankedList& list);

// Candidate embeddings searched by exact scan.
class EmbeddedPool {
 public:
  EmbeddedPool() = default;
  EmbeddedPool(std::vector<std::string> ids, std::vector<Gender> genders,
               std::span<const EmbeddingVector> vectors);

  std::size_t size() const { return ids_.size(); }
  std::size_t dimension() const { return matrix_.cols(); }
  const std::string& id(std::size_t i) const { return ids_[i]; }
  Gender gender(std::size_t i) const { return genders_[i]; }
  const kernels::DenseMatrix& matrix() const { return matrix_; }

 private:
  std::vector<std::string> ids_;
  std::vector<Gender> genders_;
  kernels::DenseMatrix matrix_;
};

enum class Execution { Serial, Parallel };

// Highest-cosine k candidates, score descending, ties by ascending id.
RankedList retrieve_top_k(std::span<const double> query, const EmbeddedPool& pool,
                          std::size_t k = kDefaultListLength,
                          ExperimentId experiment = ExperimentId::E0,
                          Execution execution = Execution::Parallel);

// Top k/2 per gender merged by score (ties by id); k must be even.
RankedList retrieve_balanced(std::span<const double> query, const EmbeddedPool& pool,
                             std::size_t k = kDefaultListLength,
                             ExperimentId experiment = ExperimentId::E2,
                             Execution execution = Execution::Parallel);

}  // namespace membias

#endif  // MEMBIAS_RETRIEVAL_HPP_
