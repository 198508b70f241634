#include "membias/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>

#include "membias/text.hpp"

namespace membias {
namespace {

constexpr std::array<Gender, 2> kDirections = {Gender::Male, Gender::Female};
constexpr std::array<Stage, 2> kStages = {Stage::Retrieval, Stage::Reranking};
constexpr std::array<Cohort, 3> kCohorts = {Cohort::HFB, Cohort::BAL, Cohort::HMB};

using TaskTraces = std::array<const StageTrace*, kAllExperiments.size()>;

std::size_t index_of(ExperimentId e) { return static_cast<std::size_t>(e); }

// (recruiter, posting) -> trace per experiment, in key order.
std::map<std::pair<std::string, std::string>, TaskTraces> group_by_task(std::span<const StageTrace> traces) {
  std::map<std::pair<std::string, std::string>, TaskTraces> tasks;
  for (const auto& t : traces) {
    auto [it, inserted] = tasks.try_emplace({t.recruiter_id, t.posting_id});
    if (inserted) it->second.fill(nullptr);
    auto& slot = it->second[index_of(t.experiment)];
    if (slot) throw InputError("duplicate trace for task " + t.key());
    slot = &t;
  }
  return tasks;
}

const StageTrace* first_present(const TaskTraces& task, std::span<const ExperimentId> sources) {
  for (auto e : sources) {
    if (task[index_of(e)]) return task[index_of(e)];
  }
  return nullptr;
}

// Attention sums can exceed 1 by an ulp on single-gender lists.
Cohort retrieval_cohort(const GroupAttention& ga) { return cohort_of(std::clamp(ga.a_male, 0.0, 1.0)); }

struct Accumulator {
  double a_male = 0.0;
  double a_female = 0.0;
  std::size_t n = 0;
  void add(const GroupAttention& ga) {
    a_male += ga.a_male;
    a_female += ga.a_female;
    ++n;
  }
};

std::vector<MeritItem> merit_items(const TracedList& t) {
  std::vector<MeritItem> items;
  for (std::size_t i = 0; i < t.genders.size(); ++i) items.push_back({t.genders[i], t.relevance[i]});
  return items;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12f", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

ScalarRow share(std::string metric, std::string scope, std::size_t hits, std::size_t n) {
  return {std::move(metric), std::move(scope), n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0, n};
}

std::string cells_csv(const std::vector<AttentionCell>& cells, bool with_cohort) {
  std::string out = with_cohort ? "cohort,experiment,direction,stage,a_male,a_female,n_tasks\n"
                                : "experiment,direction,stage,a_male,a_female,n_tasks\n";
  for (const auto& c : cells) {
    if (with_cohort) out += std::string(to_string(*c.cohort)) + ",";
    out += c.column + "," + std::string(direction_label(c.direction)) + "," + std::string(to_string(c.stage)) + ",";
    if (c.n_tasks) out += fmt(c.a_male) + "," + fmt(c.a_female);
    else out += ",";
    out += "," + std::to_string(c.n_tasks) + "\n";
  }
  return out;
}

std::string scalar_csv(const std::vector<ScalarRow>& rows, std::string_view header) {
  std::string out = std::string(header) + "\n";
  for (const auto& r : rows) {
    out += r.metric;
    if (!r.scope.empty()) out += "," + r.scope;
    out += "," + fmt(r.value) + "," + std::to_string(r.n) + "\n";
  }
  return out;
}

// Table-1 lookalike: one row per (direction, stage), two columns per
// experiment column.
std::string attention_markdown(const std::vector<AttentionCell>& cells, std::optional<Cohort> cohort) {
  std::vector<std::string> columns;
  for (const auto& c : cells) {
    if (c.cohort != cohort) continue;
    if (std::find(columns.begin(), columns.end(), c.column) == columns.end()) columns.push_back(c.column);
  }
  std::string out = "| Memory | Stage |";
  std::string rule = "|---|---|";
  for (const auto& col : columns) {
    out += " " + col + " A(m) | " + col + " A(f) |";
    rule += "---:|---:|";
  }
  out += "\n" + rule + "\n";
  for (Gender d : kDirections) {
    for (Stage s : kStages) {
      std::string row = "| " + std::string(direction_label(d)) + " | " + std::string(to_string(s)) + " |";
      bool any = false;
      for (const auto& col : columns) {
        const AttentionCell* hit = nullptr;
        for (const auto& c : cells) {
          if (c.cohort == cohort && c.column == col && c.direction == d && c.stage == s) hit = &c;
        }
        if (hit) any = true;
        if (hit && hit->n_tasks) row += " " + fmt_short(hit->a_male) + " | " + fmt_short(hit->a_female) + " |";
        else row += " – | – |";
      }
      if (any) out += row + "\n";
    }
  }
  return out;
}

std::string scalar_markdown(const std::vector<ScalarRow>& rows, bool with_scope) {
  std::string out = with_scope ? "| Metric | Scope | Value | n |\n|---|---|---:|---:|\n"
                               : "| Category | Value | n |\n|---|---:|---:|\n";
  for (const auto& r : rows) {
    out += "| " + r.metric + " |";
    if (with_scope) out += " " + r.scope + " |";
    out += " " + fmt_short(r.value) + " | " + std::to_string(r.n) + " |\n";
  }
  return out;
}

}  // namespace

const std::vector<ReportColumn>& report_columns() {
  using E = ExperimentId;
  static const std::vector<ReportColumn> columns = {
      {"E0-1", {E::E0, E::E1}, E::E1},
      {"E2", {E::E2}, E::E2},
      {"E3-4", {E::E3, E::E4}, E::E4},
      {"E5", {E::E5}, E::E5},
      {"E6", {E::E6}, E::E6},
  };
  return columns;
}

std::string_view direction_label(Gender favored) {
  return favored == Gender::Male ? "rm_male" : "rm_female";
}

ExperimentReport build_report(std::span<const StageTrace> traces) {
  ExperimentReport report;
  report.n_traces = traces.size();
  const auto tasks = group_by_task(traces);

  std::array<bool, kAllExperiments.size()> present{};
  for (const auto& t : traces) present[index_of(t.experiment)] = true;

  // ---- Table 1 / Table 2 ----
  for (const auto& column : report_columns()) {
    const bool has_retrieval = std::any_of(column.retrieval_sources.begin(), column.retrieval_sources.end(),
                                           [&](ExperimentId e) { return present[index_of(e)]; });
    if (!has_retrieval) continue;
    const bool has_rerank = column.rerank_source && present[index_of(*column.rerank_source)];

    std::map<std::pair<Gender, Stage>, Accumulator> t1;
    std::map<std::tuple<Cohort, Gender, Stage>, Accumulator> t2;
    for (const auto& [key, task] : tasks) {
      const StageTrace* rt = first_present(task, column.retrieval_sources);
      const StageTrace* any = rt ? rt : (column.rerank_source ? task[index_of(*column.rerank_source)] : nullptr);
      if (!any || !any->memory.direction) continue;
      const Gender d = *any->memory.direction;
      if (rt) {
        const auto ga = group_attention(rt->retrieval.genders);
        t1[{d, Stage::Retrieval}].add(ga);
        t2[{retrieval_cohort(ga), d, Stage::Retrieval}].add(ga);
      }
      if (has_rerank) {
        const StageTrace* rr = task[index_of(*column.rerank_source)];
        if (rr && rr->reranked) {
          const auto ga = group_attention(rr->reranked->genders);
          const auto cohort = retrieval_cohort(group_attention(rr->retrieval.genders));
          t1[{d, Stage::Reranking}].add(ga);
          t2[{cohort, d, Stage::Reranking}].add(ga);
        }
      }
    }
    auto cell = [&](const Accumulator& acc, Gender d, Stage s, std::optional<Cohort> c) {
      AttentionCell out{column.name, d, s, c, 0.0, 0.0, acc.n};
      if (acc.n) {
        out.a_male = acc.a_male / static_cast<double>(acc.n);
        out.a_female = acc.a_female / static_cast<double>(acc.n);
      }
      return out;
    };
    for (Gender d : kDirections) {
      for (Stage s : kStages) {
        if (s == Stage::Reranking && !has_rerank) continue;
        report.table1.push_back(cell(t1[{d, s}], d, s, std::nullopt));
      }
    }
    for (Cohort c : kCohorts) {
      for (Gender d : kDirections) {
        for (Stage s : kStages) {
          if (s == Stage::Reranking && !has_rerank) continue;
          report.table2.push_back(cell(t2[{c, d, s}], d, s, c));
        }
      }
    }
  }
  // Table 2 reads cohort-major.
  std::stable_sort(report.table2.begin(), report.table2.end(),
                   [](const AttentionCell& a, const AttentionCell& b) { return *a.cohort < *b.cohort; });

  // ---- Utility ----
  struct UtilitySource {
    const char* category;
    std::vector<ExperimentId> sources;
    Stage stage;
  };
  using E = ExperimentId;
  const std::vector<UtilitySource> utility_sources = {
      {"non_personalized", {E::E0, E::E1}, Stage::Retrieval},
      {"personalized_retrieved", {E::E3, E::E4, E::E5}, Stage::Retrieval},
      {"personalized_reranked", {E::E4, E::E5}, Stage::Reranking},
  };
  for (const auto& src : utility_sources) {
    const auto it = std::find_if(src.sources.begin(), src.sources.end(),
                                 [&](ExperimentId e) { return present[index_of(e)]; });
    if (it == src.sources.end()) continue;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& [key, task] : tasks) {
      const StageTrace* t = task[index_of(*it)];
      if (!t) continue;
      if (src.stage == Stage::Retrieval) {
        sum += t->retrieval.utility_at_5;
      } else if (t->reranked) {
        sum += t->reranked->utility_at_5;
      } else {
        continue;
      }
      ++n;
    }
    if (n) report.utility.push_back({src.category, std::string(to_string(*it)), sum / static_cast<double>(n), n});
  }

  // ---- Analyses ----
  std::size_t mention_hits = 0, mention_n = 0;
  std::array<std::size_t, 3> label_all{};
  std::size_t label_n = 0;
  for (ExperimentId e : kAllExperiments) {
    if (!present[index_of(e)]) continue;
    std::size_t hits = 0, n = 0;
    for (const auto& [key, task] : tasks) {
      const StageTrace* t = task[index_of(e)];
      if (!t || !t->personalized_query) continue;
      ++n;
      if (detect_gender_mentions(*t->personalized_query).found) ++hits;
    }
    if (n) report.analysis.push_back(share("gender_mention_share", std::string(to_string(e)), hits, n));
    mention_hits += hits;
    mention_n += n;
  }
  if (mention_n) report.analysis.push_back(share("gender_mention_share", "all", mention_hits, mention_n));

  for (ExperimentId e : kAllExperiments) {
    if (!present[index_of(e)]) continue;
    std::array<std::size_t, 3> counts{};
    std::size_t n = 0;
    for (const auto& [key, task] : tasks) {
      const StageTrace* t = task[index_of(e)];
      if (!t || !t->summary_label) continue;
      ++counts[static_cast<std::size_t>(*t->summary_label)];
      ++n;
    }
    if (!n) continue;
    for (auto label : {SummaryLabel::Biased, SummaryLabel::Neutral, SummaryLabel::Fair}) {
      report.analysis.push_back(share("summary_" + to_lower(to_string(label)) + "_share",
                                      std::string(to_string(e)), counts[static_cast<std::size_t>(label)], n));
      label_all[static_cast<std::size_t>(label)] += counts[static_cast<std::size_t>(label)];
    }
    label_n += n;
  }
  if (label_n) {
    for (auto label : {SummaryLabel::Biased, SummaryLabel::Neutral, SummaryLabel::Fair}) {
      report.analysis.push_back(share("summary_" + to_lower(to_string(label)) + "_share", "all",
                                      label_all[static_cast<std::size_t>(label)], label_n));
    }
  }

  for (ExperimentId e : kAllExperiments) {
    if (!present[index_of(e)] || !has_rerank(e)) continue;
    std::size_t increases = 0, n = 0, repaired = 0, reranked = 0;
    for (const auto& [key, task] : tasks) {
      const StageTrace* t = task[index_of(e)];
      if (!t || !t->reranked) continue;
      ++reranked;
      if (!t->repairs.empty()) ++repaired;
      if (!t->memory.direction) continue;
      ++n;
      if (unfairness_increase_flag(merit_items(t->retrieval), merit_items(*t->reranked), *t->memory.direction)) {
        ++increases;
      }
    }
    if (n) report.analysis.push_back(share("unfairness_increase_share", std::string(to_string(e)), increases, n));
    if (reranked) report.analysis.push_back(share("rerank_repair_share", std::string(to_string(e)), repaired, reranked));
  }

  std::size_t ties = 0;
  for (const auto& [key, task] : tasks) {
    const StageTrace* t = nullptr;
    for (auto* p : task) {
      if (p) {
        t = p;
        break;
      }
    }
    if (t && !t->memory.direction) ++ties;
  }
  if (!tasks.empty()) {
    report.analysis.push_back({"memory_tie_tasks", "all", static_cast<double>(ties), tasks.size()});
  }
  return report;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "md" || text == "markdown") return ReportFormat::Markdown;
  throw InputError("unknown report format '" + std::string(text) + "' (expected csv or md)");
}

std::map<std::string, std::string> render_report(const ExperimentReport& report, ReportFormat format) {
  std::map<std::string, std::string> files;
  if (format == ReportFormat::Csv) {
    files["table1.csv"] = cells_csv(report.table1, false);
    files["table2.csv"] = cells_csv(report.table2, true);
    files["utility.csv"] = scalar_csv(report.utility, "category,source,value,n_tasks");
    files["analysis.csv"] = scalar_csv(report.analysis, "metric,scope,value,n");
    return files;
  }
  std::string md = "# Experiment report\n\n";
  md += "Traces: " + std::to_string(report.n_traces) + "\n\n";
  md += "## Cumulative attention by memory direction and stage\n\n";
  md += attention_markdown(report.table1, std::nullopt) + "\n";
  md += "## Cumulative attention by retrieval cohort\n\n";
  for (Cohort c : kCohorts) {
    md += "### " + std::string(to_string(c)) + "\n\n" + attention_markdown(report.table2, c) + "\n";
  }
  md += "## Utility at 5\n\n";
  std::vector<ScalarRow> utility = report.utility;
  for (auto& r : utility) r.metric += " (" + r.scope + ")";
  md += scalar_markdown(utility, false) + "\n";
  md += "## Analyses\n\n" + scalar_markdown(report.analysis, true);
  files["report.md"] = md;
  return files;
}

void write_report(const std::filesystem::path& report_dir, const ExperimentReport& report,
                  ReportFormat format) {
  std::filesystem::create_directories(report_dir);
  for (const auto& [name, content] : render_report(report, format)) {
    const auto path = report_dir / name;
    const auto tmp = report_dir / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out << content;
    }
    std::filesystem::rename(tmp, path);
  }
}

std::string report_summary(const ExperimentReport& report) {
  std::string out = "traces: " + std::to_string(report.n_traces) + "\n";
  for (const auto& c : report.table1) {
    out += c.column + " " + std::string(direction_label(c.direction)) + " " + std::string(to_string(c.stage)) + ": ";
    out += c.n_tasks ? "A(m)=" + fmt_short(c.a_male) + " A(f)=" + fmt_short(c.a_female) : std::string("-");
    out += " (n=" + std::to_string(c.n_tasks) + ")\n";
  }
  for (const auto& r : report.utility) {
    out += "utility " + r.metric + " [" + r.scope + "]: " + fmt_short(r.value) + "\n";
  }
  return out;
}

}  // namespace membias
