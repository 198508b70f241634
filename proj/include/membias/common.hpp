#ifndef MEMBIAS_COMMON_HPP_
#define MEMBIAS_COMMON_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace membias {

enum class Gender { Male, Female };
enum class Split { Train, Test };
enum class Stage { Retrieval, Reranking };
enum class ExperimentId { E0, E1, E2, E3, E4, E5, E6 };

inline constexpr std::array<ExperimentId, 7> kAllExperiments = {
    ExperimentId::E0, ExperimentId::E1, ExperimentId::E2, ExperimentId::E3,
    ExperimentId::E4, ExperimentId::E5, ExperimentId::E6};

std::string_view to_string(Gender g);
std::string_view to_string(Split s);
std::string_view to_string(Stage s);
std::string_view to_string(ExperimentId e);

Gender opposite(Gender g);

// Accepts m/male/f/female in any case.
Gender parse_gender(std::string_view text);
Split parse_split(std::string_view text);
Stage parse_stage(std::string_view text);
ExperimentId parse_experiment(std::string_view text);
// Comma separated list such as "E0,E1,E5"; result is sorted and unique.
std::vector<ExperimentId> parse_experiment_list(std::string_view text);

bool has_rerank(ExperimentId e);

// Bad user input: malformed files, invalid flags, violated preconditions.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A generative or embedding backend failed.
class BackendError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Retry budget spent, or the remote service refused us permanently.
class BackendExhausted : public BackendError {
 public:
  using BackendError::BackendError;
};

// Trace log does not cover every planned task.
class IncompleteTraces : public std::runtime_error {
 public:
  IncompleteTraces(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const { return missing_; }

 private:
  std::vector<std::string> missing_;
};

}  // namespace membias

#endif  // MEMBIAS_COMMON_HPP_
