#include "membias/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "membias/rng.hpp"
#include "membias/text.hpp"

namespace membias {
namespace {

using nlohmann::json;

// RFC 4180 records; quoted fields may contain separators and newlines.
std::vector<std::vector<std::string>> read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      row.push_back(std::move(field));
      field.clear();
      if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (in_quotes) throw InputError("unterminated quoted field at end of file");
  if (any) {
    row.push_back(std::move(field));
    if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
  }
  return rows;
}

struct RawRow {
  std::size_t number;  // 1-based data row
  std::string bio, profession, gender, split, name;
};

std::vector<RawRow> read_rows(const std::filesystem::path& path, const BioFields& f) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open bios file '" + path.string() + "'");
  std::vector<RawRow> rows;
  const std::string ext = to_lower(path.extension().string());
  if (ext == ".jsonl" || ext == ".json") {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      ++number;
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw InputError("malformed record at row " + std::to_string(number) + ": " + e.what());
      }
      if (!obj.is_object()) throw InputError("row " + std::to_string(number) + " is not an object");
      auto get = [&](const std::string& key) -> std::string {
        auto it = obj.find(key);
        if (it == obj.end() || it->is_null()) return {};
        if (!it->is_string()) {
          throw InputError("row " + std::to_string(number) + ": field '" + key + "' is not a string");
        }
        return it->get<std::string>();
      };
      rows.push_back({number, get(f.bio), get(f.profession), get(f.gender), get(f.split), get(f.name)});
    }
    return rows;
  }

  auto records = read_csv(in);
  if (records.empty()) return rows;
  const auto& header = records.front();
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
  };
  const auto c_bio = column(f.bio), c_prof = column(f.profession), c_gender = column(f.gender);
  const auto c_split = column(f.split), c_name = column(f.name);
  if (!c_bio || !c_prof || !c_gender) {
    throw InputError("bios file '" + path.string() + "' must have columns '" + f.bio + "', '" +
                     f.profession + "' and '" + f.gender + "'");
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    auto cell = [&](std::optional<std::size_t> c) -> std::string {
      return (c && *c < rec.size()) ? rec[*c] : std::string{};
    };
    rows.push_back({r, cell(c_bio), cell(c_prof), cell(c_gender), cell(c_split), cell(c_name)});
  }
  return rows;
}

json candidate_json(const CandidateRecord& c, bool scrubbed) {
  json j = {{"id", c.id},
            {"profession", c.profession},
            {"gender", to_string(c.gender)},
            {"split", to_string(c.split)},
            {"bio", scrubbed ? c.scrubbed_bio : c.raw_bio}};
  if (!scrubbed && !c.first_name.empty()) j["name"] = c.first_name;
  return j;
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& items) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& j : items) out << j.dump() << '\n';
}

std::vector<json> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw InputError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<CandidateRecord> load_bios(const std::filesystem::path& path,
                                       std::optional<Split> default_split,
                                       const BioFields& fields, std::size_t id_offset,
                                       std::ostream* warnings) {
  const auto rows = read_rows(path, fields);
  if (rows.empty() && warnings) {
    *warnings << "warning: bios file '" << path.string() << "' has no records\n";
  }
  std::vector<CandidateRecord> pool;
  pool.reserve(rows.size());
  for (const auto& row : rows) {
    const std::string where = "row " + std::to_string(row.number) + " of '" + path.string() + "'";
    if (trim(row.profession).empty()) throw InputError(where + ": missing " + fields.profession);
    if (trim(row.bio).empty()) throw InputError(where + ": missing " + fields.bio);
    CandidateRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "c%07zu", id_offset + row.number - 1);
    rec.id = id;
    rec.profession = std::string(trim(row.profession));
    try {
      rec.gender = parse_gender(row.gender);
      if (!trim(row.split).empty()) {
        rec.split = parse_split(row.split);
      } else if (default_split) {
        rec.split = *default_split;
      } else {
        throw InputError("missing " + fields.split);
      }
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
    rec.raw_bio = row.bio;
    rec.first_name = std::string(trim(row.name));
    // Only the first word of a full name is treated as the first name.
    if (auto sp = rec.first_name.find(' '); sp != std::string::npos) rec.first_name.resize(sp);
    rec.scrubbed_bio = scrub_gender_indicators(rec.raw_bio, rec.first_name);
    pool.push_back(std::move(rec));
  }
  return pool;
}

std::string scrub_gender_indicators(std::string_view text, std::string_view first_name) {
  const auto& lex = explicit_indicator_lexicon();
  const std::string name = to_lower(trim(first_name));
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (const auto& tok : tokenize(text)) {
    if (lex.contains_token(tok.lower) || (!name.empty() && tok.lower == name)) {
      out.append(text.substr(pos, tok.begin - pos));
      out += '_';
      pos = tok.end;
    }
  }
  out.append(text.substr(pos));
  return out;
}

ProfessionStats profession_gender_distribution(std::span<const CandidateRecord> pool) {
  if (pool.empty()) throw InputError("cannot compute profession statistics of an empty pool");
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  for (const auto& c : pool) {
    auto& [m, f] = tally[c.profession];
    (c.gender == Gender::Male ? m : f) += 1;
  }
  ProfessionStats stats;
  for (const auto& [prof, mf] : tally) {
    const std::size_t n = mf.first + mf.second;
    const double p_male = static_cast<double>(mf.first) / static_cast<double>(n);
    stats[prof] = {p_male, 1.0 - p_male, n};
  }
  return stats;
}

std::map<std::string, std::size_t> allocate_postings(const ProfessionStats& stats, std::size_t n) {
  if (stats.empty()) throw InputError("profession statistics are empty");
  if (n < stats.size()) {
    throw InputError("cannot create " + std::to_string(n) + " postings over " +
                     std::to_string(stats.size()) + " professions");
  }
  std::size_t total = 0;
  for (const auto& [p, s] : stats) total += s.count;
  std::map<std::string, std::size_t> alloc;
  std::vector<std::pair<std::string, double>> remainders;
  std::size_t assigned = 0;
  for (const auto& [prof, s] : stats) {
    // Exact integer arithmetic: quota = n*count/total.
    const std::size_t base = n * s.count / total;
    const std::size_t rem = n * s.count % total;
    alloc[prof] = base;
    assigned += base;
    remainders.emplace_back(prof, static_cast<double>(rem));
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) alloc[remainders[i].first] += 1;
  return alloc;
}

std::string profession_label(std::string_view profession) {
  std::string label(profession);
  std::replace(label.begin(), label.end(), '_', ' ');
  return label;
}

std::string raw_query_for(std::string_view profession) {
  return "Find candidates for a " + profession_label(profession) + " position.";
}

std::vector<JobPosting> synthesize_postings(const ProfessionStats& stats, std::size_t n,
                                            std::uint64_t seed) {
  const auto alloc = allocate_postings(stats, n);
  std::vector<std::string> professions;
  professions.reserve(n);
  for (const auto& [prof, count] : alloc) professions.insert(professions.end(), count, prof);
  Rng rng(derive_seed(seed, {"postings"}));
  rng.shuffle(std::span<std::string>(professions));
  std::vector<JobPosting> postings;
  postings.reserve(n);
  for (std::size_t i = 0; i < professions.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "p%06zu", i);
    postings.push_back({id, professions[i], raw_query_for(professions[i])});
  }
  return postings;
}

std::vector<RecruiterProfile> assign_postings(std::span<const JobPosting> postings,
                                              std::size_t n_recruiters, std::uint64_t seed) {
  if (n_recruiters == 0) throw InputError("need at least one recruiter");
  if (postings.size() < n_recruiters) {
    throw InputError("cannot give each of " + std::to_string(n_recruiters) +
                     " recruiters a posting with only " + std::to_string(postings.size()) +
                     " postings");
  }
  std::vector<std::size_t> order(postings.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, {"assignment"}));
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::vector<std::size_t>> owned(n_recruiters);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t r = i < n_recruiters ? i : rng.uniform_index(n_recruiters);
    owned[r].push_back(order[i]);
  }
  std::vector<RecruiterProfile> recruiters(n_recruiters);
  for (std::size_t r = 0; r < n_recruiters; ++r) {
    char id[32];
    std::snprintf(id, sizeof id, "r%05zu", r);
    recruiters[r].id = id;
    std::sort(owned[r].begin(), owned[r].end());
    for (std::size_t idx : owned[r]) recruiters[r].posting_ids.push_back(postings[idx].id);
  }
  return recruiters;
}

MemoryCurator::MemoryCurator(std::span<const CandidateRecord> candidates,
                             const ProfessionStats& stats, EmbeddingProvider& embedder,
                             EmbeddingCache* cache)
    : candidates_(candidates), stats_(stats), bio_vecs_(candidates.size()) {
  std::vector<std::string> texts;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].split != Split::Test) continue;
    by_profession_[candidates[i].profession].members.push_back(i);
    texts.push_back(candidates[i].raw_bio);
    rows.push_back(i);
  }
  auto vecs = embed_batch(texts, embedder, cache);
  for (std::size_t j = 0; j < rows.size(); ++j) bio_vecs_[rows[j]] = std::move(vecs[j]);

  std::vector<std::string> labels;
  for (const auto& [prof, pool] : by_profession_) labels.push_back(profession_label(prof));
  auto label_vecs = embed_batch(labels, embedder, cache);
  std::size_t j = 0;
  for (auto& [prof, pool] : by_profession_) pool.label_vec = std::move(label_vecs[j++]);
}

std::size_t MemoryCurator::available(std::string_view profession) const {
  auto it = by_profession_.find(profession);
  return it == by_profession_.end() ? 0 : it->second.members.size();
}

MemoryEntry MemoryCurator::curate(const RecruiterProfile& recruiter, const JobPosting& posting,
                                  std::uint64_t seed) const {
  auto it = by_profession_.find(posting.profession);
  const std::size_t avail = it == by_profession_.end() ? 0 : it->second.members.size();
  if (avail < 4) {
    throw InputError("profession '" + posting.profession + "' has " + std::to_string(avail) +
                     " test candidates; memory curation needs at least 4");
  }
  const auto& pool = it->second;
  const auto stat_it = stats_.find(posting.profession);
  const double p_male = stat_it == stats_.end() ? 0.5 : stat_it->second.p_male;

  Rng rng(seed);
  const Gender drawn = rng.bernoulli(p_male) ? Gender::Male : Gender::Female;
  const auto max_size = static_cast<std::int64_t>(std::min<std::size_t>(10, avail));

  auto draw_sample = [&] {
    std::vector<std::size_t> members = pool.members;
    const auto size = static_cast<std::size_t>(rng.uniform_int(4, max_size));
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = i + rng.uniform_index(members.size() - i);
      std::swap(members[i], members[j]);
    }
    members.resize(size);
    return members;
  };
  auto has_gender = [&](const std::vector<std::size_t>& s, Gender g) {
    return std::any_of(s.begin(), s.end(), [&](std::size_t i) { return candidates_[i].gender == g; });
  };

  std::vector<std::size_t> sample = draw_sample();
  for (int attempt = 0; attempt < kMaxResamples && !has_gender(sample, drawn); ++attempt) {
    sample = draw_sample();
  }
  MemoryEntry entry;
  entry.posting_id = posting.id;
  entry.shortlist_gender = drawn;
  if (!has_gender(sample, drawn)) {
    entry.shortlist_gender = opposite(drawn);
    entry.gender_fallback = true;
  }

  std::size_t best = sample.size();
  double best_sim = -2.0;
  for (std::size_t pos = 0; pos < sample.size(); ++pos) {
    const auto& cand = candidates_[sample[pos]];
    if (cand.gender != entry.shortlist_gender) continue;
    const double sim = cosine_similarity(bio_vecs_[sample[pos]], pool.label_vec);
    if (best == sample.size() || sim > best_sim ||
        (sim == best_sim && cand.id < candidates_[sample[best]].id)) {
      best = pos;
      best_sim = sim;
    }
  }
  for (std::size_t i : sample) entry.sampled_candidate_ids.push_back(candidates_[i].id);
  entry.shortlisted_candidate_id = candidates_[sample[best]].id;

  const auto ord = std::find(recruiter.posting_ids.begin(), recruiter.posting_ids.end(), posting.id);
  entry.timestamp_ordinal = ord - recruiter.posting_ids.begin();
  return entry;
}

const CandidateRecord& Corpus::candidate(std::string_view id) const {
  auto it = candidate_index_.find(std::string(id));
  if (it == candidate_index_.end()) throw InputError("unknown candidate id '" + std::string(id) + "'");
  return candidates[it->second];
}

const JobPosting& Corpus::posting(std::string_view id) const {
  auto it = posting_index_.find(std::string(id));
  if (it == posting_index_.end()) throw InputError("unknown posting id '" + std::string(id) + "'");
  return postings[it->second];
}

void Corpus::build_index() {
  candidate_index_.clear();
  posting_index_.clear();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidate_index_.emplace(candidates[i].id, i).second) {
      throw InputError("duplicate candidate id '" + candidates[i].id + "'");
    }
  }
  for (std::size_t i = 0; i < postings.size(); ++i) {
    if (!posting_index_.emplace(postings[i].id, i).second) {
      throw InputError("duplicate posting id '" + postings[i].id + "'");
    }
  }
}

Corpus synthesize_corpus(std::vector<CandidateRecord> candidates, const SynthOptions& options,
                         EmbeddingProvider& embedder, EmbeddingCache* cache) {
  Corpus corpus;
  corpus.candidates = std::move(candidates);
  corpus.stats = profession_gender_distribution(corpus.candidates);
  corpus.postings = synthesize_postings(corpus.stats, options.n_postings, options.seed);
  corpus.recruiters = assign_postings(corpus.postings, options.n_recruiters, options.seed);
  corpus.build_index();

  const MemoryCurator curator(corpus.candidates, corpus.stats, embedder, cache);
  for (const auto& [prof, n] : allocate_postings(corpus.stats, options.n_postings)) {
    if (n > 0 && curator.available(prof) < 4) {
      throw InputError("profession '" + prof + "' has " + std::to_string(curator.available(prof)) +
                       " test candidates; memory curation needs at least 4");
    }
  }

  std::exception_ptr failure;
  auto& recruiters = corpus.recruiters;
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(recruiters.size()); ++r) {
    try {
      auto& rec = recruiters[r];
      for (const auto& pid : rec.posting_ids) {
        const auto seed = derive_seed(options.seed, {"memory", rec.id, pid});
        rec.episodic_memory.push_back(curator.curate(rec, corpus.posting(pid), seed));
      }
    } catch (...) {
#pragma omp critical(membias_synth_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return corpus;
}

void write_corpus(const std::filesystem::path& dir, const Corpus& corpus, bool write_scrubbed) {
  std::filesystem::create_directories(dir);
  std::vector<json> lines;
  for (const auto& c : corpus.candidates) lines.push_back(candidate_json(c, false));
  write_lines(dir / "candidates.jsonl", lines);

  lines.clear();
  for (const auto& p : corpus.postings) {
    lines.push_back({{"id", p.id}, {"profession", p.profession}, {"raw_query", p.raw_query}});
  }
  write_lines(dir / "postings.jsonl", lines);

  lines.clear();
  for (const auto& r : corpus.recruiters) {
    json memory = json::array();
    for (const auto& m : r.episodic_memory) {
      memory.push_back({{"posting_id", m.posting_id},
                        {"sampled_candidate_ids", m.sampled_candidate_ids},
                        {"shortlisted_candidate_id", m.shortlisted_candidate_id},
                        {"shortlist_gender", to_string(m.shortlist_gender)},
                        {"timestamp_ordinal", m.timestamp_ordinal},
                        {"gender_fallback", m.gender_fallback}});
    }
    lines.push_back({{"id", r.id},
                     {"posting_ids", r.posting_ids},
                     {"episodic_memory", memory},
                     {"semantic_memory", r.semantic_memory}});
  }
  write_lines(dir / "recruiters.jsonl", lines);

  json stats = json::object();
  for (const auto& [prof, s] : corpus.stats) {
    stats[prof] = {{"p_male", s.p_male}, {"p_female", s.p_female}, {"count", s.count}};
  }
  std::ofstream(dir / "stats.json", std::ios::binary | std::ios::trunc) << stats.dump(2) << '\n';

  if (write_scrubbed) {
    std::filesystem::create_directories(dir / "scrubbed");
    lines.clear();
    for (const auto& c : corpus.candidates) lines.push_back(candidate_json(c, true));
    write_lines(dir / "scrubbed" / "candidates.jsonl", lines);
  }
}

Corpus load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InputError("corpus directory '" + dir.string() + "' does not exist");
  }
  Corpus corpus;
  for (const auto& j : read_lines(dir / "candidates.jsonl")) {
    CandidateRecord c;
    c.id = j.at("id").get<std::string>();
    c.profession = j.at("profession").get<std::string>();
    c.gender = parse_gender(j.at("gender").get<std::string>());
    c.split = parse_split(j.at("split").get<std::string>());
    c.raw_bio = j.at("bio").get<std::string>();
    c.first_name = j.value("name", std::string{});
    corpus.candidates.push_back(std::move(c));
  }
  const auto scrubbed_path = dir / "scrubbed" / "candidates.jsonl";
  if (std::filesystem::exists(scrubbed_path)) {
    std::unordered_map<std::string, std::string> scrubbed;
    for (const auto& j : read_lines(scrubbed_path)) {
      scrubbed[j.at("id").get<std::string>()] = j.at("bio").get<std::string>();
    }
    for (auto& c : corpus.candidates) {
      auto it = scrubbed.find(c.id);
      c.scrubbed_bio = it != scrubbed.end() ? it->second : scrub_gender_indicators(c.raw_bio, c.first_name);
    }
  } else {
    for (auto& c : corpus.candidates) c.scrubbed_bio = scrub_gender_indicators(c.raw_bio, c.first_name);
  }
  for (const auto& j : read_lines(dir / "postings.jsonl")) {
    corpus.postings.push_back({j.at("id").get<std::string>(), j.at("profession").get<std::string>(),
                               j.at("raw_query").get<std::string>()});
  }
  for (const auto& j : read_lines(dir / "recruiters.jsonl")) {
    RecruiterProfile r;
    r.id = j.at("id").get<std::string>();
    r.posting_ids = j.at("posting_ids").get<std::vector<std::string>>();
    r.semantic_memory = j.value("semantic_memory", std::string{});
    for (const auto& m : j.at("episodic_memory")) {
      MemoryEntry e;
      e.posting_id = m.at("posting_id").get<std::string>();
      e.sampled_candidate_ids = m.at("sampled_candidate_ids").get<std::vector<std::string>>();
      e.shortlisted_candidate_id = m.at("shortlisted_candidate_id").get<std::string>();
      e.shortlist_gender = parse_gender(m.at("shortlist_gender").get<std::string>());
      e.timestamp_ordinal = m.at("timestamp_ordinal").get<std::int64_t>();
      e.gender_fallback = m.value("gender_fallback", false);
      r.episodic_memory.push_back(std::move(e));
    }
    corpus.recruiters.push_back(std::move(r));
  }
  corpus.stats = profession_gender_distribution(corpus.candidates);
  corpus.build_index();
  return corpus;
}

void validate_corpus(const Corpus& corpus) {
  std::map<std::string, int> seen;
  for (const auto& p : corpus.postings) seen[p.id] = 0;
  for (const auto& r : corpus.recruiters) {
    if (r.posting_ids.empty()) throw InputError("recruiter " + r.id + " has no postings");
    for (const auto& pid : r.posting_ids) {
      auto it = seen.find(pid);
      if (it == seen.end()) throw InputError("recruiter " + r.id + " owns unknown posting " + pid);
      ++it->second;
    }
    for (const auto& m : r.episodic_memory) {
      if (std::find(r.posting_ids.begin(), r.posting_ids.end(), m.posting_id) == r.posting_ids.end()) {
        throw InputError("recruiter " + r.id + " has memory for a posting it does not own");
      }
      const auto& posting = corpus.posting(m.posting_id);
      const auto n = m.sampled_candidate_ids.size();
      if (n < 4 || n > 10) throw InputError("memory for " + m.posting_id + " samples " + std::to_string(n));
      if (std::find(m.sampled_candidate_ids.begin(), m.sampled_candidate_ids.end(),
                    m.shortlisted_candidate_id) == m.sampled_candidate_ids.end()) {
        throw InputError("shortlist of " + m.posting_id + " is not among the sampled candidates");
      }
      for (const auto& cid : m.sampled_candidate_ids) {
        const auto& c = corpus.candidate(cid);
        if (c.split != Split::Test) throw InputError("memory sample " + cid + " is not a test candidate");
        if (c.profession != posting.profession) {
          throw InputError("memory sample " + cid + " has profession " + c.profession);
        }
      }
      if (corpus.candidate(m.shortlisted_candidate_id).gender != m.shortlist_gender) {
        throw InputError("shortlist gender mismatch for " + m.posting_id);
      }
    }
  }
  for (const auto& [pid, count] : seen) {
    if (count != 1) {
      throw InputError("posting " + pid + " assigned " + std::to_string(count) + " times");
    }
  }
}

}  // namespace membias
