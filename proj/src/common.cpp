#include "membias/common.hpp"

#include <algorithm>
#include <cctype>

#include "membias/rng.hpp"

namespace membias {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string join_missing(const std::vector<std::string>& missing) {
  std::string msg = "trace log is missing " + std::to_string(missing.size()) + " task(s)";
  for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += (i ? ", " : ": ") + missing[i];
  if (missing.size() > 20) msg += ", ...";
  return msg;
}

}  // namespace

std::string_view to_string(Gender g) { return g == Gender::Male ? "male" : "female"; }

std::string_view to_string(Split s) { return s == Split::Train ? "train" : "test"; }

std::string_view to_string(Stage s) { return s == Stage::Retrieval ? "retrieval" : "reranking"; }

std::string_view to_string(ExperimentId e) {
  static constexpr std::string_view names[] = {"E0", "E1", "E2", "E3", "E4", "E5", "E6"};
  return names[static_cast<int>(e)];
}

Gender opposite(Gender g) { return g == Gender::Male ? Gender::Female : Gender::Male; }

Gender parse_gender(std::string_view text) {
  const std::string v = lower(trim(text));
  if (v == "m" || v == "male") return Gender::Male;
  if (v == "f" || v == "female") return Gender::Female;
  throw InputError("unknown gender value '" + std::string(text) + "'");
}

Split parse_split(std::string_view text) {
  const std::string v = lower(trim(text));
  if (v == "train") return Split::Train;
  if (v == "test") return Split::Test;
  throw InputError("unknown split value '" + std::string(text) + "'");
}

Stage parse_stage(std::string_view text) {
  const std::string v = lower(trim(text));
  if (v == "retrieval") return Stage::Retrieval;
  if (v == "reranking") return Stage::Reranking;
  throw InputError("unknown stage '" + std::string(text) + "'");
}

ExperimentId parse_experiment(std::string_view text) {
  const std::string v = lower(trim(text));
  if (v.size() == 2 && v[0] == 'e' && v[1] >= '0' && v[1] <= '6') {
    return static_cast<ExperimentId>(v[1] - '0');
  }
  throw InputError("unknown experiment '" + std::string(text) + "' (expected E0..E6)");
}

std::vector<ExperimentId> parse_experiment_list(std::string_view text) {
  std::vector<ExperimentId> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view part = trim(text.substr(start, end - start));
    if (!part.empty()) out.push_back(parse_experiment(part));
    start = end + 1;
  }
  if (out.empty()) throw InputError("experiment list is empty");
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool has_rerank(ExperimentId e) {
  return e != ExperimentId::E0 && e != ExperimentId::E3;
}

IncompleteTraces::IncompleteTraces(std::vector<std::string> missing)
    : std::runtime_error(join_missing(missing)), missing_(std::move(missing)) {}

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::string_view> parts) {
  std::uint64_t h = splitmix64(master);
  for (std::string_view p : parts) {
    h = splitmix64(h ^ fnv1a64(p));
  }
  return h;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
  return lo + static_cast<std::int64_t>(
                  uniform_index(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace membias
