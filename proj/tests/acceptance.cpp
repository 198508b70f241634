// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances and time limits are pinned below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "membias/corpus.hpp"
#include "membias/harness.hpp"
#include "membias/metrics.hpp"
#include "membias/pipeline.hpp"
#include "membias/report.hpp"
#include "membias/rng.hpp"
#include "membias/text.hpp"
#include "membias/trace_io.hpp"
#include "support.hpp"

namespace membias {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kAttentionTol = 1e-12;
constexpr double kGainTol = 1e-15;
constexpr double kPartitionTol = 1e-12;
constexpr double kSignTestAlpha = 0.01;
constexpr double kMetricSeconds = 5.0;
constexpr double kSynthSeconds = 10.0;
constexpr double kDirectionalSeconds = 60.0;

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// Exact two-sided sign test over nonzero differences.
double sign_test_p(std::size_t positive, std::size_t negative) {
  const std::size_t n = positive + negative;
  if (n == 0) return 1.0;
  const std::size_t k = std::min(positive, negative);
  double tail = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double log_term = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0) -
                            static_cast<double>(n) * std::log(2.0);
    tail += std::exp(log_term);
  }
  return std::min(1.0, 2.0 * tail);
}

int unfairness_oracle(std::size_t pos, const std::vector<MeritItem>& items) {
  int count = 0;
  for (std::size_t j = 0; j < pos; ++j) {
    if (items[j].gender != items[pos].gender && items[j].relevance < items[pos].relevance) ++count;
  }
  return count;
}

Verdict criterion1() {
  Verdict v;
  Rng rng(101);
  const auto t0 = Clock::now();
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<MeritItem> items(static_cast<std::size_t>(rng.uniform_int(1, 20)));
    for (auto& it : items) {
      it.gender = rng.bernoulli(0.5) ? Gender::Male : Gender::Female;
      it.relevance = rng.bernoulli(0.3) ? 0.5 : rng.uniform01() * 2.0 - 1.0;
    }
    for (std::size_t p = 0; p < items.size(); ++p) {
      mismatches += meritocratic_unfairness(p, items) != unfairness_oracle(p, items);
    }
  }
  const double secs = seconds_since(t0);
  v.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  v.require(secs < kMetricSeconds, "took " + fmt(secs) + " s");
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("1000 lists, ") + fmt(secs, 3) + " s";
  return v;
}

Verdict criterion2() {
  Verdict v;
  double worst = 0.0;
  for (int n = 1; n <= 100; ++n) {
    double sum = 0.0;
    for (int r = 1; r <= n; ++r) sum += attention(r, n);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  v.require(worst <= kAttentionTol, "max |sum-1| = " + fmt(worst));
  v.require(std::abs(gain(1) - 1.0) <= kGainTol, "gain(1)");
  v.require(std::abs(gain(3) - 0.5) <= kGainTol, "gain(3)");
  v.require(std::abs(gain(7) - 1.0 / 3.0) <= kGainTol, "gain(7)");
  if (v.pass) v.detail = "max |sum-1| = " + fmt(worst, 3);
  return v;
}

Verdict criterion3() {
  Verdict v;
  Rng rng(303);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Gender> g(static_cast<std::size_t>(rng.uniform_int(1, 20)));
    for (auto& x : g) x = rng.bernoulli(0.5) ? Gender::Male : Gender::Female;
    const auto ga = group_attention(g);
    worst = std::max(worst, std::abs(ga.a_male + ga.a_female - 1.0));
  }
  const auto all_male = group_attention(std::vector<Gender>(20, Gender::Male));
  v.require(worst <= kPartitionTol, "max |sum-1| = " + fmt(worst));
  v.require(all_male.a_male == 1.0 && all_male.a_female == 0.0, "all-male list not (1, 0)");
  if (v.pass) v.detail = "max |sum-1| = " + fmt(worst, 3);
  return v;
}

Verdict criterion4() {
  Verdict v;
  const std::vector<std::pair<double, Cohort>> cases = {{0.0, Cohort::HFB},      {0.3, Cohort::HFB},
                                                        {0.300001, Cohort::BAL}, {0.7, Cohort::BAL},
                                                        {0.700001, Cohort::HMB}, {1.0, Cohort::HMB}};
  for (const auto& [x, want] : cases) {
    const auto got = cohort_of(x);
    v.require(got == want, fmt(x, 7) + " -> " + std::string(to_string(got)));
  }
  return v;
}

Verdict criterion5() {
  Verdict v;
  Rng rng(505);
  std::size_t topk_bad = 0, balanced_bad = 0, balanced_checked = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(20, 500));
    const std::size_t k = static_cast<std::size_t>(rng.uniform_int(1, 20));
    const std::size_t dim = 2 + rng.uniform_index(15);
    const bool coarse = rng.bernoulli(0.5);
    std::vector<std::string> ids;
    std::vector<Gender> genders;
    std::vector<EmbeddingVector> vecs;
    auto draw = [&] {
      EmbeddingVector x(dim);
      do {
        for (auto& c : x) c = coarse ? static_cast<double>(rng.uniform_int(-1, 1)) : rng.uniform01() - 0.5;
      } while (std::all_of(x.begin(), x.end(), [](double c) { return c == 0.0; }));
      return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("c" + std::to_string(rng.uniform_int(0, 999999)) + "-" + std::to_string(i));
      genders.push_back(rng.bernoulli(0.5) ? Gender::Male : Gender::Female);
      vecs.push_back(draw());
    }
    const auto q = draw();
    EmbeddedPool pool(ids, genders, vecs);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::vector<double> score(n);
    for (std::size_t i = 0; i < n; ++i) score[i] = cosine_similarity(q, vecs[i]);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return score[a] != score[b] ? score[a] > score[b] : ids[a] < ids[b];
    });
    const auto got = retrieve_top_k(q, pool, k);
    for (std::size_t i = 0; i < k; ++i) topk_bad += got.entries[i].candidate_id != ids[order[i]];

    const std::size_t even_k = k + (k % 2);
    const auto males = static_cast<std::size_t>(std::count(genders.begin(), genders.end(), Gender::Male));
    if (males >= even_k / 2 && n - males >= even_k / 2) {
      ++balanced_checked;
      const auto bal = retrieve_balanced(q, pool, even_k);
      std::size_t m = 0;
      std::map<std::string, Gender> g;
      for (std::size_t i = 0; i < n; ++i) g[ids[i]] = genders[i];
      for (const auto& e : bal.entries) m += g[e.candidate_id] == Gender::Male;
      balanced_bad += m != even_k / 2 || bal.size() != even_k;
    }
  }
  v.require(topk_bad == 0, std::to_string(topk_bad) + " top-k mismatches");
  v.require(balanced_bad == 0, std::to_string(balanced_bad) + " unbalanced lists");
  if (v.pass) v.detail = "500 pools, " + std::to_string(balanced_checked) + " balanced checks";
  return v;
}

struct Desk {
  testing::ScratchDir dir{"acceptance"};
  std::vector<CandidateRecord> bios;
  Corpus corpus;
  double synth_seconds = 0.0;
};

Verdict criterion6(Desk& desk) {
  Verdict v;
  DemoBioOptions demo;
  demo.count = 2400;
  demo.seed = 17;
  desk.bios = testing::demo_candidates(demo, desk.dir.path());
  HashingEmbedder embedder;
  const SynthOptions options{200, 40, 2024};
  const auto t0 = Clock::now();
  desk.corpus = synthesize_corpus(desk.bios, options, embedder);
  desk.synth_seconds = seconds_since(t0);
  const auto again = synthesize_corpus(desk.bios, options, embedder);

  const auto& c = desk.corpus;
  std::map<std::string, int> owners;
  std::size_t min_load = SIZE_MAX;
  std::size_t bad_entries = 0;
  for (const auto& r : c.recruiters) {
    min_load = std::min(min_load, r.posting_ids.size());
    for (const auto& pid : r.posting_ids) owners[pid] += 1;
    for (const auto& m : r.episodic_memory) {
      const auto& prof = c.posting(m.posting_id).profession;
      bool ok = m.sampled_candidate_ids.size() >= 4 && m.sampled_candidate_ids.size() <= 10;
      ok = ok && std::find(m.sampled_candidate_ids.begin(), m.sampled_candidate_ids.end(),
                           m.shortlisted_candidate_id) != m.sampled_candidate_ids.end();
      for (const auto& id : m.sampled_candidate_ids) {
        ok = ok && c.candidate(id).profession == prof && c.candidate(id).split == Split::Test;
      }
      ok = ok && c.candidate(m.shortlisted_candidate_id).gender == m.shortlist_gender;
      bad_entries += !ok;
    }
  }
  bool once = owners.size() == c.postings.size();
  for (const auto& [pid, n] : owners) once = once && n == 1;
  v.require(once, "postings not assigned exactly once");
  v.require(min_load >= 1, "a recruiter has no posting");
  v.require(bad_entries == 0, std::to_string(bad_entries) + " bad memory entries");

  write_corpus(desk.dir / "a", desk.corpus, true);
  write_corpus(desk.dir / "b", again, true);
  bool identical = true;
  for (const char* f : {"candidates.jsonl", "postings.jsonl", "recruiters.jsonl", "stats.json", "scrubbed/candidates.jsonl"}) {
    identical = identical && testing::slurp(desk.dir / "a" / f) == testing::slurp(desk.dir / "b" / f);
  }
  v.require(identical, "same seed produced different files");
  v.require(desk.synth_seconds < kSynthSeconds, "synth took " + fmt(desk.synth_seconds) + " s");
  if (v.pass) v.detail = "200 postings, 40 recruiters, " + fmt(desk.synth_seconds, 3) + " s";
  return v;
}

Verdict criterion7(const Desk& desk) {
  Verdict v;
  const auto& lex = explicit_indicator_lexicon();
  std::size_t leaks = 0, unstable = 0;
  for (const auto& c : desk.corpus.candidates) {
    leaks += !lex.find(c.scrubbed_bio).empty();
    unstable += scrub_gender_indicators(c.scrubbed_bio, c.first_name) != c.scrubbed_bio;
  }
  const auto husband = scrub_gender_indicators("She supported her husband's career as a waitress.");
  v.require(leaks == 0, std::to_string(leaks) + " scrubbed bios with indicators");
  v.require(unstable == 0, std::to_string(unstable) + " non-idempotent bios");
  v.require(husband.find("husband") != std::string::npos, "latent term removed");
  if (v.pass) v.detail = std::to_string(desk.corpus.candidates.size()) + " bios";
  return v;
}

struct TaskRef {
  const RecruiterProfile* recruiter;
  const JobPosting* posting;
  Gender favored;
};

std::vector<TaskRef> directed_tasks(const Corpus& c) {
  std::vector<TaskRef> out;
  for (const auto& r : c.recruiters) {
    for (const auto& pid : r.posting_ids) {
      const auto& p = c.posting(pid);
      if (auto d = memory_direction(task_memory(c, r, p))) out.push_back({&r, &p, *d});
    }
  }
  return out;
}

Verdict criterion8(const Desk& desk) {
  Verdict v;
  const auto t0 = Clock::now();
  // A larger population than the synthesis check so that >= 200 tasks carry a direction.
  HashingEmbedder embedder;
  const auto corpus = synthesize_corpus(desk.bios, SynthOptions{400, 80, 88}, embedder);
  const auto tasks = directed_tasks(corpus);
  v.require(tasks.size() >= 200, "only " + std::to_string(tasks.size()) + " directed tasks");
  const PipelineContext ctx(corpus, embedder, nullptr, 20);

  StubPersonaConfig biased_cfg;
  biased_cfg.beta = 0.5;
  StubBackend biased(biased_cfg);
  StubPersonaConfig neutral_cfg;
  neutral_cfg.beta = 0.0;
  StubBackend neutral(neutral_cfg);

  std::string summary;
  for (auto e : {ExperimentId::E1, ExperimentId::E4, ExperimentId::E5}) {
    std::size_t up = 0, down = 0;
    double before = 0.0, after = 0.0;
    std::size_t identity_breaks = 0;
    for (const auto& t : tasks) {
      const auto seed = task_seed(7, t.recruiter->id, t.posting->id);
      const auto tr = run_task(ctx, biased, *t.recruiter, *t.posting, e, seed);
      const double a = group_attention(tr.retrieval.genders).of(t.favored);
      const double b = group_attention(tr.reranked->genders).of(t.favored);
      before += a;
      after += b;
      up += b > a;
      down += b < a;
      const auto tn = run_task(ctx, neutral, *t.recruiter, *t.posting, e, seed);
      identity_breaks += tn.reranked->list.ids() != tn.retrieval.list.ids();
    }
    const double n = static_cast<double>(tasks.size());
    const double p = sign_test_p(up, down);
    const std::string name(to_string(e));
    v.require(after > before, name + " mean did not rise");
    v.require(p < kSignTestAlpha, name + " sign test p = " + fmt(p));
    v.require(identity_breaks == 0, name + " beta=0 changed " + std::to_string(identity_breaks) + " lists");
    summary += name + " " + fmt(before / n, 3) + "->" + fmt(after / n, 3) + " (+" + std::to_string(up) + "/-" +
               std::to_string(down) + ", p=" + fmt(p, 2) + ") ";
  }
  const double secs = seconds_since(t0);
  v.require(secs < kDirectionalSeconds, "took " + fmt(secs) + " s");
  v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(tasks.size()) + " tasks, " + summary + fmt(secs, 3) + " s";
  return v;
}

Verdict criterion9(const Desk& desk) {
  Verdict v;
  HashingEmbedder embedder;
  const auto& corpus = desk.corpus;
  const PipelineContext ctx(corpus, embedder, nullptr, 20);
  StubPersonaConfig cfg;
  cfg.beta = 0.5;
  cfg.gender_signal = GenderSignal::ExplicitIndicators;
  StubBackend stub(cfg);
  double gap4 = 0.0, gap6 = 0.0;
  std::size_t n = 0;
  for (const auto& r : corpus.recruiters) {
    for (const auto& pid : r.posting_ids) {
      const auto& p = corpus.posting(pid);
      const auto seed = task_seed(9, r.id, pid);
      const auto e4 = run_task(ctx, stub, r, p, ExperimentId::E4, seed);
      const auto e6 = run_task(ctx, stub, r, p, ExperimentId::E6, seed);
      const auto g4 = group_attention(e4.reranked->genders);
      const auto g6 = group_attention(e6.reranked->genders);
      gap4 += std::abs(g4.a_male - g4.a_female);
      gap6 += std::abs(g6.a_male - g6.a_female);
      ++n;
    }
  }
  gap4 /= static_cast<double>(n);
  gap6 /= static_cast<double>(n);
  v.require(gap6 < gap4, "E6 gap " + fmt(gap6) + " not below E4 gap " + fmt(gap4));
  v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(n) + " tasks, mean |A(m)-A(f)| at re-ranking E4 " +
              fmt(gap4) + " vs E6 " + fmt(gap6);
  return v;
}

std::map<std::string, double> utility_by_category(const ExperimentReport& r) {
  std::map<std::string, double> out;
  for (const auto& row : r.utility) out[row.metric] = row.value;
  return out;
}

Verdict criterion10(const Desk& desk) {
  Verdict v;
  HashingEmbedder embedder;
  RunConfig cfg;
  cfg.experiments = {ExperimentId::E0, ExperimentId::E3, ExperimentId::E4};
  cfg.out_root = desk.dir / "runs";
  cfg.run_id = "utility";
  cfg.seed = 10;
  cfg.stub.beta = 0.5;
  cfg.stub.alignment_weight = 1.0;
  StubBackend stub(cfg.stub);
  const auto out = run_suite(cfg, desk.corpus, stub, embedder, nullptr);
  const auto u = utility_by_category(*out.report);
  const double np = u.at("non_personalized"), pr = u.at("personalized_retrieved"), rr = u.at("personalized_reranked");
  v.require(rr >= pr, "reranked " + fmt(rr) + " < retrieved " + fmt(pr));
  v.require(pr >= np, "retrieved " + fmt(pr) + " < non-personalized " + fmt(np));
  v.detail += (v.detail.empty() ? "" : "; ") + std::string("reranked ") + fmt(rr) + " >= retrieved " + fmt(pr) +
              " >= non-personalized " + fmt(np);
  return v;
}

Verdict criterion11(const Desk& desk) {
  Verdict v;
  HashingEmbedder embedder;
  auto cfg = RunConfig();
  cfg.out_root = desk.dir / "runs";
  cfg.seed = 11;
  cfg.stub.beta = 0.5;
  auto run = [&](const std::string& id, RunControl control) {
    cfg.run_id = id;
    StubBackend stub(cfg.stub);
    return run_suite(cfg, desk.corpus, stub, embedder, nullptr, control);
  };
  const auto whole = run("uninterrupted", {});
  std::size_t units = 0;
  for (const auto& r : desk.corpus.recruiters) units += r.posting_ids.size();
  RunControl half;
  half.max_units = units / 2;
  const auto first = run("interrupted", half);
  v.require(!first.complete, "interrupted run claims completion");
  const auto resumed = run("interrupted", {});
  v.require(resumed.complete, "resumed run incomplete");
  for (const char* f : {"table1.csv", "table2.csv", "utility.csv", "analysis.csv"}) {
    v.require(testing::slurp(whole.run_dir / "report" / f) == testing::slurp(resumed.run_dir / "report" / f),
              std::string(f) + " differs after resume");
  }

  // Table-1 shape: 5 columns x 2 directions x 2 stages, each with both gender means.
  std::istringstream in(testing::slurp(whole.run_dir / "report" / "table1.csv"));
  std::string line;
  std::getline(in, line);
  v.require(line == "experiment,direction,stage,a_male,a_female,n_tasks", "table1 header: " + line);
  std::set<std::tuple<std::string, std::string, std::string>> cells;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    if (f.size() == 6) cells.insert({f[0], f[1], f[2]});
    ++rows;
  }
  std::set<std::tuple<std::string, std::string, std::string>> expected;
  for (const char* col : {"E0-1", "E2", "E3-4", "E5", "E6"}) {
    for (const char* d : {"rm_male", "rm_female"}) {
      for (const char* s : {"retrieval", "reranking"}) expected.insert({col, d, s});
    }
  }
  v.require(rows == 20 && cells == expected, "table1 has " + std::to_string(rows) + " rows of unexpected shape");
  if (v.pass) v.detail = std::to_string(units * kAllExperiments.size()) + " traces, interrupted after " +
                         std::to_string(*half.max_units) + " of " + std::to_string(units) + " units";
  return v;
}

Verdict criterion12(const Desk& desk) {
  Verdict v;
  HashingEmbedder embedder;
  const PipelineContext ctx(desk.corpus, embedder, nullptr, 20);
  StubPersonaConfig cfg;
  cfg.beta = 0.5;
  cfg.gender_token_emission = true;
  StubBackend stub(cfg);
  std::size_t total = 0, mentions = 0;
  for (const auto& r : desk.corpus.recruiters) {
    for (const auto& pid : r.posting_ids) {
      const auto t = run_task(ctx, stub, r, desk.corpus.posting(pid), ExperimentId::E3, 12);
      ++total;
      mentions += detect_gender_mentions(*t.personalized_query).found;
    }
  }
  v.require(mentions == 0, std::to_string(mentions) + " of " + std::to_string(total) + " E3 queries mention gender");

  std::ifstream in(std::string(MEMBIAS_FIXTURES) + "/gender_mentions.tsv");
  std::string line;
  std::size_t cases = 0, wrong = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream row(line);
    std::string text, expected, terms;
    std::getline(row, text, '\t');
    std::getline(row, expected, '\t');
    std::getline(row, terms, '\t');
    std::vector<std::string> want;
    std::stringstream ts(terms);
    for (std::string t; std::getline(ts, t, ',');) {
      if (!t.empty()) want.push_back(t);
    }
    const auto got = detect_gender_mentions(text);
    wrong += got.found != (expected == "1") || got.terms != want;
    ++cases;
  }
  v.require(cases == 50, "fixture has " + std::to_string(cases) + " cases");
  v.require(wrong == 0, std::to_string(wrong) + " fixture mismatches");
  if (v.pass) v.detail = std::to_string(total) + " E3 queries gender-free, 50/50 fixture cases exact";
  return v;
}

}  // namespace
}  // namespace membias

int main() {
  using namespace membias;
  Desk desk;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"metric oracle equivalence", criterion1},
      {"attention normalization", criterion2},
      {"group-attention partition", criterion3},
      {"cohort boundaries", criterion4},
      {"retrieval oracle", criterion5},
      {"synthesis invariants", [&] { return criterion6(desk); }},
      {"scrubbing", [&] { return criterion7(desk); }},
      {"directional bias reproduction", [&] { return criterion8(desk); }},
      {"scrubbing reduces stub-measurable bias", [&] { return criterion9(desk); }},
      {"utility ordering", [&] { return criterion10(desk); }},
      {"trace/report integrity", [&] { return criterion11(desk); }},
      {"E3 gender-free contract", [&] { return criterion12(desk); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
    if (!v.detail.empty()) std::cout << " (" << v.detail << ")";
    std::cout << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
