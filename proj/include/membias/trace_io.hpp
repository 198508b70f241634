#ifndef MEMBIAS_TRACE_IO_HPP_
#define MEMBIAS_TRACE_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "membias/pipeline.hpp"

namespace membias {

nlohmann::json to_json(const RankedList& list);
RankedList ranked_list_from_json(const nlohmann::json& j);

nlohmann::json to_json(const StageTrace& trace);
StageTrace trace_from_json(const nlohmann::json& j);

// One compact JSON object per line, newline terminated.
std::string trace_line(const StageTrace& trace);

struct TraceLog {
  std::vector<StageTrace> traces;
  // Byte length of the complete lines; anything after it is a torn write.
  std::uintmax_t valid_bytes = 0;
  bool torn_tail = false;
};

// Reads traces.jsonl. A final line without its newline, or one that fails to
// parse, is treated as torn and reported rather than thrown; a malformed line
// elsewhere is an InputError naming the line number.
TraceLog read_trace_log(const std::filesystem::path& path);

}  // namespace membias

#endif  // MEMBIAS_TRACE_IO_HPP_
