#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "membias/metrics.hpp"
#include "membias/rng.hpp"
#include "membias/text.hpp"

namespace membias {
namespace {

// Direct summation of the discount, independent of the library.
double s_n(int n) {
  double s = 0;
  for (int r = 1; r <= n; ++r) s += 1.0 / std::log2(r + 1.0);
  return s;
}

TEST(Gain, SpotValues) {
  EXPECT_NEAR(gain(1), 1.0, 1e-15);
  EXPECT_NEAR(gain(3), 0.5, 1e-15);
  EXPECT_NEAR(gain(7), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(gain(0), std::invalid_argument);
}

TEST(Attention, NormalizationAndOracle) {
  EXPECT_DOUBLE_EQ(attention(1, 1), 1.0);
  EXPECT_NEAR(attention(1, 20), 1.0 / s_n(20), 1e-15);
  EXPECT_THROW(attention(0, 20), std::invalid_argument);
  EXPECT_THROW(attention(21, 20), std::invalid_argument);
  for (int n = 1; n <= 1000; n += (n < 100 ? 1 : 37)) {
    const auto p = AttentionProfile::for_length(n);
    double sum = 0;
    for (int r = 0; r < n; ++r) {
      sum += p.weights[r];
      if (r > 0) ASSERT_LT(p.weights[r], p.weights[r - 1]);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12) << n;
  }
}

TEST(GroupAttention, Examples) {
  std::vector<Gender> all_male(20, Gender::Male);
  const auto g = group_attention(all_male);
  EXPECT_DOUBLE_EQ(g.a_male, 1.0);
  EXPECT_DOUBLE_EQ(g.a_female, 0.0);

  std::vector<Gender> split(20, Gender::Female);
  std::fill(split.begin(), split.begin() + 10, Gender::Male);
  double top10 = 0;
  for (int r = 1; r <= 10; ++r) top10 += 1.0 / std::log2(r + 1.0);
  EXPECT_NEAR(group_attention(split).a_male, top10 / s_n(20), 1e-12);
}

TEST(GroupAttention, ByIdRequiresGender) {
  RankedList list;
  list.entries = {{"a", 0.9, 1}, {"b", 0.8, 2}};
  GenderMap genders{{"a", Gender::Female}};
  EXPECT_THROW(group_attention(list, genders), InputError);
  genders["b"] = Gender::Male;
  EXPECT_NEAR(group_attention(list, genders).a_female, 1.0 / (1.0 + 1.0 / std::log2(3.0)), 1e-15);
}

TEST(GroupAttentionProperties, PartitionAndSwapMonotonicity) {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    const int n = static_cast<int>(rng.uniform_int(1, 40));
    std::vector<Gender> gs(n);
    for (auto& g : gs) g = rng.bernoulli(0.5) ? Gender::Male : Gender::Female;
    const auto ga = group_attention(gs);
    EXPECT_NEAR(ga.a_male + ga.a_female, 1.0, 1e-12);
    for (int r = 1; r < n; ++r) {
      if (gs[r] == Gender::Male && gs[r - 1] == Gender::Female) {
        auto swapped = gs;
        std::swap(swapped[r], swapped[r - 1]);
        EXPECT_GT(group_attention(swapped).a_male, ga.a_male);
        break;
      }
    }
  }
}

TEST(Cohort, BoundariesAsWritten) {
  EXPECT_EQ(cohort_of(0.0), Cohort::HFB);
  EXPECT_EQ(cohort_of(0.3), Cohort::HFB);
  EXPECT_EQ(cohort_of(0.300001), Cohort::BAL);
  EXPECT_EQ(cohort_of(0.7), Cohort::BAL);
  EXPECT_EQ(cohort_of(0.700001), Cohort::HMB);
  EXPECT_EQ(cohort_of(0.71), Cohort::HMB);
  EXPECT_EQ(cohort_of(1.0), Cohort::HMB);
  EXPECT_THROW(cohort_of(-0.01), std::invalid_argument);
  EXPECT_THROW(cohort_of(1.01), std::invalid_argument);
  EXPECT_THROW(cohort_of(std::nan("")), std::invalid_argument);
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) EXPECT_NO_THROW(cohort_of(rng.uniform01()));
}

// Pairwise brute force over all (i, j) pairs, written before the library.
int unfairness_oracle(std::size_t pos, const std::vector<MeritItem>& items) {
  int count = 0;
  for (std::size_t j = 0; j < items.size(); ++j) {
    const bool ranked_higher = j < pos;
    const bool opposite = items[j].gender != items[pos].gender;
    const bool less_relevant = items[j].relevance < items[pos].relevance;
    count += ranked_higher && opposite && less_relevant;
  }
  return count;
}

TEST(MeritocraticUnfairness, Examples) {
  std::vector<MeritItem> list = {{Gender::Male, 0.4}, {Gender::Female, 0.6}, {Gender::Female, 0.3}};
  EXPECT_EQ(meritocratic_unfairness(0, list), 0);
  EXPECT_EQ(meritocratic_unfairness(1, list), unfairness_oracle(1, list));
  EXPECT_EQ(meritocratic_unfairness(1, list), 1);
  EXPECT_EQ(meritocratic_unfairness(2, list), 0);
  // Equal relevance is not a violation.
  std::vector<MeritItem> tie = {{Gender::Male, 0.5}, {Gender::Female, 0.5}};
  EXPECT_EQ(meritocratic_unfairness(1, tie), 0);
  EXPECT_THROW(meritocratic_unfairness(3, list), std::out_of_range);
}

TEST(MeritocraticUnfairness, ByIdLookupErrors) {
  RankedList list;
  list.entries = {{"a", 0.9, 1}, {"b", 0.8, 2}};
  GenderMap g{{"a", Gender::Male}, {"b", Gender::Female}};
  RelevanceMap rel{{"a", 0.1}, {"b", 0.2}};
  EXPECT_EQ(meritocratic_unfairness("b", list, g, rel), 1);
  EXPECT_THROW(meritocratic_unfairness("z", list, g, rel), InputError);
  rel.erase("a");
  EXPECT_THROW(meritocratic_unfairness("b", list, g, rel), InputError);
}

std::vector<MeritItem> random_items(Rng& rng, std::size_t n) {
  std::vector<MeritItem> items(n);
  for (auto& it : items) {
    it.gender = rng.bernoulli(0.5) ? Gender::Male : Gender::Female;
    it.relevance = static_cast<double>(rng.uniform_int(0, 8)) / 8.0;  // frequent ties
  }
  return items;
}

TEST(MeritocraticUnfairnessProperties, MatchesBruteForceOracle) {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto items = random_items(rng, static_cast<std::size_t>(rng.uniform_int(1, 20)));
    long male_sum = 0;
    for (std::size_t p = 0; p < items.size(); ++p) {
      ASSERT_EQ(meritocratic_unfairness(p, items), unfairness_oracle(p, items));
      if (items[p].gender == Gender::Male) male_sum += unfairness_oracle(p, items);
    }
    EXPECT_EQ(aggregate_unfairness(items, Gender::Male), male_sum);
  }
}

TEST(UnfairnessIncrease, IdentityDemotionAndMeritOrder) {
  Rng rng(9);
  const auto items = random_items(rng, 20);
  EXPECT_FALSE(unfairness_increase_flag(items, items, Gender::Male));

  // Memory favors Male: every female is pushed below a less relevant male.
  std::vector<MeritItem> retrieval = {{Gender::Female, 0.9}, {Gender::Female, 0.8}, {Gender::Male, 0.5},
                                      {Gender::Male, 0.4}};
  std::vector<MeritItem> reranked = {{Gender::Male, 0.5}, {Gender::Male, 0.4}, {Gender::Female, 0.9},
                                     {Gender::Female, 0.8}};
  long before = 0, after = 0;
  for (std::size_t p = 0; p < 4; ++p) {
    if (retrieval[p].gender == Gender::Female) before += unfairness_oracle(p, retrieval);
    if (reranked[p].gender == Gender::Female) after += unfairness_oracle(p, reranked);
  }
  ASSERT_EQ(before, 0);
  ASSERT_EQ(after, 4);
  EXPECT_TRUE(unfairness_increase_flag(retrieval, reranked, Gender::Male));
  EXPECT_FALSE(unfairness_increase_flag(retrieval, reranked, Gender::Female));

  auto merit = items;
  std::sort(merit.begin(), merit.end(), [](auto& a, auto& b) { return a.relevance > b.relevance; });
  EXPECT_EQ(aggregate_unfairness(merit, Gender::Female), 0);
  EXPECT_FALSE(unfairness_increase_flag(items, merit, Gender::Male));
  EXPECT_FALSE(unfairness_increase_flag(items, merit, Gender::Female));
}

TEST(UtilityAt5, TrivialAndDoubleLoopOracle) {
  const EmbeddingVector x{1, 2, 3};
  std::vector<EmbeddingVector> same(5, x);
  std::vector<EmbeddingVector> one{x};
  EXPECT_NEAR(utility_at_5(one, same), 1.0, 1e-15);
  std::vector<EmbeddingVector> ortho(6, EmbeddingVector{0, 0, 1});
  std::vector<EmbeddingVector> base{{1, 0, 0}, {0, 1, 0}};
  EXPECT_EQ(utility_at_5(base, ortho), 0.0);
  EXPECT_THROW(utility_at_5(one, std::vector<EmbeddingVector>(4, x)), InputError);
  EXPECT_THROW(utility_at_5(std::vector<EmbeddingVector>{}, same), InputError);

  HashingEmbedder embedder;
  Rng rng(33);
  const std::vector<std::string> words = {"nurse", "patient", "code", "python", "court", "law", "chef", "bread"};
  auto bio = [&] {
    std::string s;
    for (int i = 0; i < 6; ++i) s += words[rng.uniform_index(words.size())] + " ";
    return s;
  };
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> shortlisted(rng.uniform_int(1, 4)), ranked(rng.uniform_int(5, 20));
    for (auto& s : shortlisted) s = bio();
    for (auto& s : ranked) s = bio();
    double sum = 0;
    int pairs = 0;
    for (const auto& s : shortlisted) {
      for (int j = 0; j < 5; ++j) {
        sum += cosine_similarity(embedder.embed(s), embedder.embed(ranked[j]));
        ++pairs;
      }
    }
    EXPECT_NEAR(utility_at_5(shortlisted, ranked, embedder), sum / pairs, 1e-12);
  }
}

std::vector<std::string> split_terms(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string t;
  while (std::getline(ss, t, ',')) {
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

TEST(GenderMentions, LabeledFixture) {
  std::ifstream in(std::string(MEMBIAS_FIXTURES) + "/gender_mentions.tsv");
  ASSERT_TRUE(in) << "fixture missing";
  std::string line;
  int cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream row(line);
    std::string text, expected, terms;
    std::getline(row, text, '\t');
    std::getline(row, expected, '\t');
    std::getline(row, terms, '\t');
    const auto got = detect_gender_mentions(text);
    EXPECT_EQ(got.found, expected == "1") << text;
    EXPECT_EQ(got.terms, split_terms(terms)) << text;
    ++cases;
  }
  EXPECT_EQ(cases, 50);
}

TEST(GenderMentions, CaseInvariant) {
  Rng rng(6);
  const std::vector<std::string> words = {"She", "prefers", "MALE", "candidates", "women", "the", "Manager", "hers"};
  for (int i = 0; i < 300; ++i) {
    std::string t;
    for (int j = 0; j < 8; ++j) t += words[rng.uniform_index(words.size())] + " ";
    std::string flipped = t;
    for (char& c : flipped) {
      if (rng.bernoulli(0.5)) c = static_cast<char>(std::isupper(static_cast<unsigned char>(c)) ? std::tolower(c) : std::toupper(c));
    }
    EXPECT_EQ(detect_gender_mentions(t).terms, detect_gender_mentions(flipped).terms);
  }
}

}  // namespace
}  // namespace membias
