#include "membias/assets.hpp"

#include <stdexcept>
#include <utility>

namespace membias {
namespace {

struct AssetEntry {
  std::string_view path;
  std::string_view text;
};

constexpr AssetEntry kAssets[] = {
#include "membias/assets.inc"
};

}  // namespace

std::string_view asset(std::string_view path) {
  for (const auto& a : kAssets) {
    if (a.path == path) return a.text;
  }
  throw std::out_of_range("unknown asset: " + std::string(path));
}

std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    std::size_t close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = values.find(key);
    if (it != values.end()) {
      out += it->second;
    } else {
      out.append(tmpl.substr(open, close + 2 - open));
    }
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

}  // namespace membias
