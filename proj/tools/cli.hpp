#ifndef MEMBIAS_TOOLS_CLI_HPP_
#define MEMBIAS_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace membias::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kInputError = 2;
inline constexpr int kBackendError = 3;
inline constexpr int kIncompleteTraces = 4;

// Runs one `membias` invocation; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace membias::cli

#endif  // MEMBIAS_TOOLS_CLI_HPP_
