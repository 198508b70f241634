#include "membias/demo_bios.hpp"

#include <fstream>
#include <span>
#include <string_view>

#include "json.hpp"
#include "membias/rng.hpp"

namespace membias {
namespace {

struct ProfessionSpec {
  std::string_view name;
  double p_female;
  std::vector<std::string_view> vocabulary;
};

const std::vector<ProfessionSpec>& professions() {
  static const std::vector<ProfessionSpec> specs = {
      {"professor", 0.45, {"research", "teaching", "lectures", "publications", "grants", "seminars", "doctoral", "curriculum", "theory", "faculty"}},
      {"physician", 0.49, {"patients", "clinical", "diagnosis", "internal", "medicine", "residency", "hospital", "treatment", "primary", "care"}},
      {"attorney", 0.38, {"litigation", "contracts", "clients", "court", "counsel", "corporate", "legal", "disputes", "trial", "compliance"}},
      {"photographer", 0.35, {"portraits", "weddings", "lighting", "studio", "editorial", "camera", "landscapes", "prints", "exhibitions", "composition"}},
      {"journalist", 0.50, {"reporting", "newsroom", "stories", "investigative", "editor", "coverage", "interviews", "politics", "columns", "broadcast"}},
      {"nurse", 0.91, {"patients", "ward", "bedside", "pediatric", "triage", "medication", "registered", "clinical", "emergency", "care"}},
      {"psychologist", 0.62, {"therapy", "counseling", "cognitive", "behavioral", "assessment", "anxiety", "clients", "trauma", "wellbeing", "licensed"}},
      {"teacher", 0.59, {"classroom", "students", "lessons", "elementary", "curriculum", "literacy", "mathematics", "grade", "school", "mentoring"}},
      {"dentist", 0.35, {"dental", "oral", "hygiene", "orthodontics", "implants", "cosmetic", "practice", "teeth", "periodontal", "restorative"}},
      {"surgeon", 0.15, {"surgery", "operating", "orthopedic", "trauma", "procedures", "minimally", "invasive", "cardiac", "surgical", "fellowship"}},
      {"architect", 0.24, {"buildings", "design", "residential", "urban", "sustainable", "drawings", "construction", "planning", "spaces", "renovation"}},
      {"software_engineer", 0.16, {"software", "distributed", "systems", "backend", "cloud", "algorithms", "scalable", "code", "infrastructure", "platforms"}},
      {"dietitian", 0.93, {"nutrition", "diet", "meal", "wellness", "obesity", "diabetes", "counseling", "food", "metabolic", "coaching"}},
      {"accountant", 0.37, {"audit", "tax", "financial", "statements", "bookkeeping", "payroll", "reporting", "certified", "ledger", "budgets"}},
  };
  return specs;
}

constexpr std::string_view kMaleNames[] = {
    "James", "Robert", "Michael", "William", "David", "Richard", "Joseph", "Thomas",
    "Daniel", "Matthew", "Anthony", "Mark", "Steven", "Paul", "Andrew", "Kevin",
    "Brian", "George", "Edward", "Ryan", "Jacob", "Eric", "Samuel", "Peter"};
constexpr std::string_view kFemaleNames[] = {
    "Mary", "Patricia", "Jennifer", "Linda", "Elizabeth", "Barbara", "Susan", "Jessica",
    "Sarah", "Karen", "Nancy", "Lisa", "Margaret", "Sandra", "Ashley", "Emily",
    "Donna", "Michelle", "Laura", "Rachel", "Anna", "Julia", "Grace", "Helen"};
constexpr std::string_view kCities[] = {"Boston", "Chicago", "Denver", "Seattle", "Austin",
                                        "Portland", "Atlanta", "Phoenix", "Toronto", "Dublin"};
constexpr std::string_view kSchools[] = {"State University", "the City College", "Northern Institute",
                                         "Lakeside University", "the National Academy"};
constexpr std::string_view kGeneric[] = {"quality", "collaboration", "leadership", "innovation",
                                         "community", "outcomes", "excellence", "integrity"};

template <typename T, std::size_t N>
std::string_view pick(Rng& rng, const T (&items)[N]) {
  return items[rng.uniform_index(N)];
}

std::string_view pick(Rng& rng, const std::vector<std::string_view>& items) {
  return items[rng.uniform_index(items.size())];
}

std::string capitalize(std::string_view w) {
  std::string s(w);
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

}  // namespace

std::vector<DemoBio> generate_demo_bios(const DemoBioOptions& options) {
  Rng rng(derive_seed(options.seed, {"demo-bios"}));
  const auto& specs = professions();
  std::vector<DemoBio> out;
  out.reserve(options.count);
  for (std::size_t i = 0; i < options.count; ++i) {
    const auto& spec = specs[i % specs.size()];
    DemoBio b;
    b.profession = spec.name;
    const double p_female = options.balanced_professions ? 0.5 : spec.p_female;
    b.gender = rng.bernoulli(p_female) ? Gender::Female : Gender::Male;
    b.split = rng.bernoulli(options.test_fraction) ? Split::Test : Split::Train;
    const bool male = b.gender == Gender::Male;
    b.name = std::string(male ? pick(rng, kMaleNames) : pick(rng, kFemaleNames));
    const std::string subj = male ? "He" : "She";
    const std::string poss = male ? "his" : "her";
    std::string label(spec.name);
    for (char& c : label) if (c == '_') c = ' ';

    std::string bio;
    if (rng.bernoulli(0.15)) {
      bio += male ? "Mr. " : (rng.bernoulli(0.5) ? "Ms. " : "Mrs. ");
    }
    bio += b.name + " is a " + label + " based in " + std::string(pick(rng, kCities)) + ". ";
    bio += subj + " has " + std::to_string(rng.uniform_int(2, 30)) + " years of experience in " +
           std::string(pick(rng, spec.vocabulary)) + " and " + std::string(pick(rng, spec.vocabulary)) + ". ";
    bio += capitalize(poss) + " work focuses on " + std::string(pick(rng, spec.vocabulary)) + ", " +
           std::string(pick(rng, spec.vocabulary)) + " and " + std::string(pick(rng, kGeneric)) + ". ";
    if (rng.bernoulli(0.5)) {
      bio += subj + " earned " + poss + " degree from " + std::string(pick(rng, kSchools)) + ". ";
    }
    if (rng.bernoulli(0.25)) {
      bio += subj + " lives in " + std::string(pick(rng, kCities)) + " with " + poss + " " +
             (male ? "wife" : "husband") + " and two children. ";
    }
    if (rng.bernoulli(0.1)) {
      bio += subj + " once worked as a " + (male ? "waiter" : "waitress") + " while studying. ";
    }
    if (rng.bernoulli(0.5)) {
      bio += "Colleagues describe " + std::string(male ? "him" : "her") + " as focused on " +
             std::string(pick(rng, kGeneric)) + ".";
    }
    while (!bio.empty() && bio.back() == ' ') bio.pop_back();
    b.bio = std::move(bio);
    out.push_back(std::move(b));
  }
  return out;
}

void write_demo_bios(const std::filesystem::path& path, const DemoBioOptions& options) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& b : generate_demo_bios(options)) {
    nlohmann::json j = {{"name", b.name},
                        {"profession", b.profession},
                        {"gender", to_string(b.gender)},
                        {"split", to_string(b.split)},
                        {"bio", b.bio}};
    out << j.dump() << '\n';
  }
}

}  // namespace membias
