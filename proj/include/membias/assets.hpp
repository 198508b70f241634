#ifndef MEMBIAS_ASSETS_HPP_
#define MEMBIAS_ASSETS_HPP_

#include <map>
#include <string>
#include <string_view>

namespace membias {

// Contents of a bundled asset, keyed by its repository path
// (e.g. "prompts/rerank.txt"). Throws std::out_of_range for unknown paths.
std::string_view asset(std::string_view path);

// Replaces every {{name}} placeholder. Unknown placeholders are left as is.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values);

}  // namespace membias

#endif  // MEMBIAS_ASSETS_HPP_
