#ifndef MEMBIAS_REPORT_HPP_
#define MEMBIAS_REPORT_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "membias/metrics.hpp"
#include "membias/pipeline.hpp"

namespace membias {

// Table-1 experiment columns. A column's retrieval row comes from the first
// listed retrieval source present in the run, its re-ranking row from the
// re-rank source.
struct ReportColumn {
  std::string name;
  std::vector<ExperimentId> retrieval_sources;
  std::optional<ExperimentId> rerank_source;
};
const std::vector<ReportColumn>& report_columns();

std::string_view direction_label(Gender favored);  // "rm_male" / "rm_female"

struct AttentionCell {
  std::string column;
  Gender direction = Gender::Male;
  Stage stage = Stage::Retrieval;
  std::optional<Cohort> cohort;  // Table-2 rows only
  double a_male = 0.0;
  double a_female = 0.0;
  std::size_t n_tasks = 0;  // 0 = empty cell
};

struct ScalarRow {
  std::string metric;  // or utility category
  std::string scope;
  double value = 0.0;
  std::size_t n = 0;
};

struct ExperimentReport {
  std::vector<AttentionCell> table1;
  std::vector<AttentionCell> table2;
  std::vector<ScalarRow> utility;
  std::vector<ScalarRow> analysis;
  std::size_t n_traces = 0;
};

// Pure aggregation over traces; input order does not matter.
ExperimentReport build_report(std::span<const StageTrace> traces);

enum class ReportFormat { Csv, Markdown };
ReportFormat parse_report_format(std::string_view text);

// File name -> contents: table1.csv, table2.csv, analysis.csv, utility.csv
// for CSV; report.md for Markdown.
std::map<std::string, std::string> render_report(const ExperimentReport& report, ReportFormat format);

void write_report(const std::filesystem::path& report_dir, const ExperimentReport& report,
                  ReportFormat format);

// Short human-readable digest printed by the CLI.
std::string report_summary(const ExperimentReport& report);

}  // namespace membias

#endif  // MEMBIAS_REPORT_HPP_
