#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "membias/corpus.hpp"
#include "membias/rng.hpp"
#include "membias/text.hpp"
#include "support.hpp"

namespace membias {
namespace {

using testing::ScratchDir;
using testing::slurp;
using testing::spit;

CandidateRecord make(std::string id, std::string prof, Gender g, Split s, std::string bio = "bio text") {
  CandidateRecord c;
  c.id = std::move(id);
  c.profession = std::move(prof);
  c.gender = g;
  c.split = s;
  c.raw_bio = std::move(bio);
  c.scrubbed_bio = scrub_gender_indicators(c.raw_bio);
  return c;
}

TEST(LoadBios, ReadsWellFormedCsv) {
  ScratchDir dir("load");
  spit(dir / "b.csv",
       "bio,profession,gender,split\n"
       "\"She teaches, and writes.\",professor,F,train\n"
       "He codes.,software_engineer,male,test\n"
       "They nurse.,nurse,female,train\n");
  const auto pool = load_bios(dir / "b.csv", std::nullopt);
  ASSERT_EQ(pool.size(), 3u);
  EXPECT_EQ(pool[0].raw_bio, "She teaches, and writes.");
  EXPECT_EQ(pool[0].gender, Gender::Female);
  EXPECT_EQ(pool[1].split, Split::Test);
  EXPECT_EQ(pool[0].id, "c0000000");
  EXPECT_EQ(pool[2].id, "c0000002");
}

TEST(LoadBios, EmptyFileWarns) {
  ScratchDir dir("load");
  spit(dir / "e.jsonl", "");
  std::ostringstream warnings;
  const auto pool = load_bios(dir / "e.jsonl", Split::Train, {}, 0, &warnings);
  EXPECT_TRUE(pool.empty());
  EXPECT_NE(warnings.str().find("no records"), std::string::npos);
}

TEST(LoadBios, MissingProfessionNamesRow) {
  ScratchDir dir("load");
  spit(dir / "b.jsonl",
       "{\"bio\":\"a\",\"profession\":\"nurse\",\"gender\":\"f\",\"split\":\"train\"}\n"
       "{\"bio\":\"b\",\"gender\":\"m\",\"split\":\"train\"}\n");
  try {
    load_bios(dir / "b.jsonl", std::nullopt);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(LoadBios, RejectsUnknownGenderAndMissingFile) {
  ScratchDir dir("load");
  spit(dir / "b.csv", "bio,profession,gender,split\nx,nurse,other,train\n");
  EXPECT_THROW(load_bios(dir / "b.csv", std::nullopt), InputError);
  EXPECT_THROW(load_bios(dir / "missing.csv", std::nullopt), InputError);
}

TEST(Scrub, SpecExamples) {
  EXPECT_EQ(scrub_gender_indicators("She is a professor. Her work is cited."),
            "_ is a professor. _ work is cited.");
  EXPECT_EQ(scrub_gender_indicators("A dedicated software engineer with 10 years of experience."),
            "A dedicated software engineer with 10 years of experience.");
  EXPECT_EQ(scrub_gender_indicators("She supported her husband's career as a waitress."),
            "_ supported _ husband's career as a waitress.");
  EXPECT_EQ(scrub_gender_indicators("Mr. Smith and MRS. Jones met Anna.", "anna"), "_. Smith and _. Jones met _.");
  // Whole words only.
  EXPECT_EQ(scrub_gender_indicators("Sheila helps the shepherd"), "Sheila helps the shepherd");
}

std::string random_text(Rng& rng) {
  static const std::vector<std::string> words = {
      "he", "She", "HIS", "her", "him", "hers", "himself", "Herself", "mr", "Mrs.", "ms", "Miss",
      "husband", "wife", "waitress", "nurse", "the", "he-man", "_", "shed", "hero", "x", "42", "Ms.Smith"};
  static const std::vector<std::string> seps = {" ", "  ", ", ", ". ", "-", "\n", "'"};
  std::string t;
  const auto n = rng.uniform_int(0, 25);
  for (std::int64_t i = 0; i < n; ++i) {
    t += words[rng.uniform_index(words.size())];
    t += seps[rng.uniform_index(seps.size())];
  }
  return t;
}

TEST(ScrubProperties, IdempotentAndComplete) {
  Rng rng(1234);
  const auto& lex = explicit_indicator_lexicon();
  for (int i = 0; i < 2000; ++i) {
    const auto t = random_text(rng);
    const auto once = scrub_gender_indicators(t, "anna");
    EXPECT_EQ(scrub_gender_indicators(once, "anna"), once);
    EXPECT_TRUE(lex.find(once).empty()) << once;
  }
}

TEST(ProfessionStats, Examples) {
  std::vector<CandidateRecord> pool = {
      make("a", "p", Gender::Male, Split::Train), make("b", "p", Gender::Male, Split::Train),
      make("c", "p", Gender::Male, Split::Test), make("d", "p", Gender::Female, Split::Test),
      make("e", "q", Gender::Female, Split::Test)};
  const auto stats = profession_gender_distribution(pool);
  EXPECT_DOUBLE_EQ(stats.at("p").p_male, 0.75);
  EXPECT_DOUBLE_EQ(stats.at("p").p_female, 0.25);
  EXPECT_DOUBLE_EQ(stats.at("q").p_male, 0.0);
  EXPECT_DOUBLE_EQ(stats.at("q").p_female, 1.0);
  EXPECT_THROW(profession_gender_distribution({}), InputError);
}

TEST(ProfessionStats, DemoPoolMatchesIndependentTally) {
  ScratchDir dir("stats");
  DemoBioOptions o;
  o.count = 3000;
  const auto pool = testing::demo_candidates(o, dir.path());
  const auto stats = profession_gender_distribution(pool);
  std::map<std::string, int> male, total;
  for (const auto& c : pool) {
    total[c.profession] += 1;
    if (c.gender == Gender::Male) male[c.profession] += 1;
  }
  std::size_t sum = 0;
  for (const auto& [prof, s] : stats) {
    sum += s.count;
    EXPECT_EQ(static_cast<int>(s.count), total[prof]);
    EXPECT_DOUBLE_EQ(s.p_male, static_cast<double>(male[prof]) / total[prof]);
    EXPECT_NEAR(s.p_male + s.p_female, 1.0, 1e-15);
  }
  EXPECT_EQ(sum, pool.size());
}

ProfessionStats stats_of(std::map<std::string, std::size_t> counts) {
  ProfessionStats s;
  for (auto& [p, n] : counts) s[p] = {0.5, 0.5, n};
  return s;
}

// Hamilton apportionment written independently of the library.
std::map<std::string, std::size_t> largest_remainder_oracle(const ProfessionStats& stats, std::size_t n) {
  std::size_t total = 0;
  for (const auto& [p, s] : stats) total += s.count;
  std::map<std::string, std::size_t> out;
  std::vector<std::pair<double, std::string>> rem;
  std::size_t assigned = 0;
  for (const auto& [p, s] : stats) {
    const double exact = static_cast<double>(n) * static_cast<double>(s.count) / static_cast<double>(total);
    out[p] = static_cast<std::size_t>(std::floor(exact));
    assigned += out[p];
    rem.push_back({exact - std::floor(exact), p});
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) out[rem[i].second] += 1;
  return out;
}

TEST(SynthesizePostings, ExactProportions) {
  const auto stats = stats_of({{"a", 50}, {"b", 50}});
  const auto postings = synthesize_postings(stats, 10, 3);
  ASSERT_EQ(postings.size(), 10u);
  EXPECT_EQ(std::count_if(postings.begin(), postings.end(), [](auto& p) { return p.profession == "a"; }), 5);
  EXPECT_EQ(postings[0].raw_query.rfind("Find candidates for", 0), 0u);
}

TEST(SynthesizePostings, LargestRemainderAtPaperScale) {
  ScratchDir dir("alloc");
  DemoBioOptions o;
  o.count = 5003;
  const auto stats = profession_gender_distribution(testing::demo_candidates(o, dir.path()));
  const auto postings = synthesize_postings(stats, 10000, 5);
  std::map<std::string, std::size_t> counts;
  for (const auto& p : postings) counts[p.profession] += 1;
  EXPECT_EQ(counts, largest_remainder_oracle(stats, 10000));
  for (const auto& [prof, s] : stats) {
    EXPECT_LE(std::abs(static_cast<double>(counts[prof]) - 10000.0 * s.count / 5003.0), 1.0);
  }
  std::set<std::string> ids;
  for (const auto& p : postings) ids.insert(p.id);
  EXPECT_EQ(ids.size(), postings.size());
}

TEST(SynthesizePostings, DeterministicAndValidated) {
  const auto stats = stats_of({{"a", 3}, {"b", 7}, {"c", 1}});
  const auto x = synthesize_postings(stats, 100, 9);
  const auto y = synthesize_postings(stats, 100, 9);
  ASSERT_EQ(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].id, y[i].id);
    EXPECT_EQ(x[i].profession, y[i].profession);
  }
  EXPECT_THROW(synthesize_postings(stats, 2, 9), InputError);
}

TEST(AssignPostings, PigeonholeAndCoverage) {
  const auto stats = stats_of({{"a", 1}, {"b", 1}});
  auto ten = synthesize_postings(stats, 10, 1);
  for (const auto& r : assign_postings(ten, 10, 1)) EXPECT_EQ(r.posting_ids.size(), 1u);

  const auto many = synthesize_postings(stats, 10000, 2);
  const auto recs = assign_postings(many, 1000, 2);
  ASSERT_EQ(recs.size(), 1000u);
  std::multiset<std::string> seen;
  for (const auto& r : recs) {
    EXPECT_GE(r.posting_ids.size(), 1u);
    seen.insert(r.posting_ids.begin(), r.posting_ids.end());
  }
  EXPECT_EQ(seen.size(), 10000u);
  EXPECT_EQ(std::set<std::string>(seen.begin(), seen.end()).size(), 10000u);

  const auto five = synthesize_postings(stats, 5, 1);
  EXPECT_THROW(assign_postings(five, 6, 1), InputError);
}

TEST(CurateMemory, ShortlistIsArgmaxAmongDrawnGender) {
  std::vector<CandidateRecord> pool;
  const std::vector<std::string> bios = {"chef cooking pasta", "pastry chef kitchen", "chef chef chef", "gardener"};
  for (int i = 0; i < 4; ++i) pool.push_back(make("m" + std::to_string(i), "chef", Gender::Male, Split::Test, bios[i]));
  const auto stats = profession_gender_distribution(pool);
  HashingEmbedder embedder;
  MemoryCurator curator(pool, stats, embedder);
  RecruiterProfile rec{"r0", {"p0"}, {}, {}};
  JobPosting posting{"p0", "chef", raw_query_for("chef")};
  const auto label = embedder.embed("chef");
  std::string best;
  double best_sim = -2;
  for (const auto& c : pool) {
    const double s = cosine_similarity(embedder.embed(c.raw_bio), label);
    if (s > best_sim) best_sim = s, best = c.id;
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto entry = curator.curate(rec, posting, seed);
    EXPECT_EQ(entry.sampled_candidate_ids.size(), 4u);
    EXPECT_EQ(entry.shortlist_gender, Gender::Male);
    EXPECT_EQ(entry.shortlisted_candidate_id, best);
  }
}

TEST(CurateMemory, BernoulliRateWithinBinomialInterval) {
  std::vector<CandidateRecord> pool;
  for (int i = 0; i < 70; ++i) pool.push_back(make("m" + std::to_string(100 + i), "nurse", Gender::Male, Split::Test, "nurse ward care " + std::to_string(i)));
  for (int i = 0; i < 30; ++i) pool.push_back(make("f" + std::to_string(100 + i), "nurse", Gender::Female, Split::Test, "nurse clinic care " + std::to_string(i)));
  const auto stats = profession_gender_distribution(pool);
  ASSERT_DOUBLE_EQ(stats.at("nurse").p_male, 0.7);
  HashingEmbedder embedder;
  MemoryCurator curator(pool, stats, embedder);
  RecruiterProfile rec{"r0", {"p0"}, {}, {}};
  JobPosting posting{"p0", "nurse", raw_query_for("nurse")};
  int male = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const auto e = curator.curate(rec, posting, derive_seed(77, {std::to_string(i)}));
    male += e.shortlist_gender == Gender::Male;
    const auto& ids = e.sampled_candidate_ids;
    ASSERT_GE(ids.size(), 4u);
    ASSERT_LE(ids.size(), 10u);
    ASSERT_NE(std::find(ids.begin(), ids.end(), e.shortlisted_candidate_id), ids.end());
  }
  // 99% normal interval for Binomial(1000, 0.7): 0.7 +- 2.576 * sqrt(0.21 / 1000).
  const double half = 2.576 * std::sqrt(0.7 * 0.3 / n);
  const double rate = static_cast<double>(male) / n;
  EXPECT_GE(rate, 0.7 - half);
  EXPECT_LE(rate, 0.7 + half);
  EXPECT_GE(0.7 - half, 0.66);
  EXPECT_LE(0.7 + half, 0.74);
}

TEST(CurateMemory, CertainGenderAndTooFewCandidates) {
  std::vector<CandidateRecord> pool;
  for (int i = 0; i < 6; ++i) pool.push_back(make("m" + std::to_string(i), "pilot", Gender::Male, Split::Test, "pilot flight " + std::to_string(i)));
  for (int i = 0; i < 3; ++i) pool.push_back(make("x" + std::to_string(i), "judge", Gender::Female, Split::Test, "judge court"));
  pool.push_back(make("t0", "judge", Gender::Female, Split::Train, "judge court"));
  const auto stats = profession_gender_distribution(pool);
  HashingEmbedder embedder;
  MemoryCurator curator(pool, stats, embedder);
  RecruiterProfile rec{"r0", {"p0", "p1"}, {}, {}};
  for (std::uint64_t s = 0; s < 50; ++s) {
    EXPECT_EQ(curator.curate(rec, {"p0", "pilot", "q"}, s).shortlist_gender, Gender::Male);
  }
  EXPECT_THROW(curator.curate(rec, {"p1", "judge", "q"}, 1), InputError);
}

TEST(SynthesizeCorpus, InvariantsAndByteIdenticalOutput) {
  ScratchDir dir("synth");
  testing::DeskCorpusOptions o;
  const auto a = testing::desk_corpus(o, dir.path());
  validate_corpus(a);
  for (const auto& r : a.recruiters) {
    ASSERT_EQ(r.episodic_memory.size(), r.posting_ids.size());
    for (const auto& m : r.episodic_memory) {
      const auto& posting = a.posting(m.posting_id);
      for (const auto& id : m.sampled_candidate_ids) {
        EXPECT_EQ(a.candidate(id).profession, posting.profession);
        EXPECT_EQ(a.candidate(id).split, Split::Test);
      }
      EXPECT_EQ(a.candidate(m.shortlisted_candidate_id).gender, m.shortlist_gender);
    }
  }
  write_corpus(dir / "one", a, true);
  const auto b = testing::desk_corpus(o, dir.path());
  write_corpus(dir / "two", b, true);
  for (const char* f : {"candidates.jsonl", "postings.jsonl", "recruiters.jsonl", "stats.json", "scrubbed/candidates.jsonl"}) {
    EXPECT_EQ(slurp(dir / "one" / f), slurp(dir / "two" / f)) << f;
  }
  const auto loaded = load_corpus(dir / "one");
  EXPECT_EQ(loaded.candidates.size(), a.candidates.size());
  EXPECT_EQ(loaded.recruiters.size(), a.recruiters.size());
  EXPECT_EQ(loaded.recruiters[3].episodic_memory[0].shortlisted_candidate_id,
            a.recruiters[3].episodic_memory[0].shortlisted_candidate_id);
  EXPECT_EQ(loaded.candidates[5].scrubbed_bio, a.candidates[5].scrubbed_bio);
}

}  // namespace
}  // namespace membias
