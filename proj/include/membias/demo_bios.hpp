#ifndef MEMBIAS_DEMO_BIOS_HPP_
#define MEMBIAS_DEMO_BIOS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "membias/common.hpp"

namespace membias {

// Template-generated biographies shaped like the Bias in Bios records
// (first name, pronouns, honorifics, occupation vocabulary, occasional
// gender-coded kinship words). Used for offline runs and tests when the real
// dataset is not available.
struct DemoBio {
  std::string name;
  std::string profession;
  Gender gender = Gender::Male;
  Split split = Split::Train;
  std::string bio;
};

struct DemoBioOptions {
  std::size_t count = 4000;
  std::uint64_t seed = 7;
  double test_fraction = 0.35;
  // When set, every profession is drawn 50/50 male/female instead of the
  // skewed per-profession shares.
  bool balanced_professions = false;
};

std::vector<DemoBio> generate_demo_bios(const DemoBioOptions& options);

// JSON Lines with keys name, profession, gender, split, bio.
void write_demo_bios(const std::filesystem::path& path, const DemoBioOptions& options);

}  // namespace membias

#endif  // MEMBIAS_DEMO_BIOS_HPP_
