#include "membias/text.hpp"

#include <algorithm>
#include <cctype>

#include "membias/assets.hpp"

namespace membias {
namespace {

bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_byte(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    tokens.push_back({i, j, to_lower(text.substr(i, j - i))});
    i = j;
  }
  return tokens;
}

std::vector<std::string> lowercase_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(std::move(t.lower));
  return out;
}

Lexicon Lexicon::parse(std::string_view text) {
  Lexicon lex;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    if (!line.empty() && line.front() != '#') lex.add(line);
    pos = end + 1;
  }
  return lex;
}

void Lexicon::add(std::string_view term) {
  auto words = lowercase_tokens(term);
  if (!words.empty()) terms_.push_back(std::move(words));
}

bool Lexicon::contains_token(std::string_view lowered_token) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) {
    return t.size() == 1 && t[0] == lowered_token;
  });
}

std::vector<std::string> Lexicon::find(std::string_view text) const {
  const auto tokens = lowercase_tokens(text);
  std::vector<std::string> found;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    for (const auto& term : terms_) {
      if (i + term.size() > tokens.size()) continue;
      if (!std::equal(term.begin(), term.end(), tokens.begin() + i)) continue;
      std::string joined;
      for (std::size_t w = 0; w < term.size(); ++w) joined += (w ? " " : "") + term[w];
      if (std::find(found.begin(), found.end(), joined) == found.end()) {
        found.push_back(std::move(joined));
      }
    }
  }
  return found;
}

const Lexicon& gender_terms_lexicon() {
  static const Lexicon lex = Lexicon::parse(asset("lexicons/gender_terms.txt"));
  return lex;
}

const Lexicon& explicit_indicator_lexicon() {
  static const Lexicon lex = Lexicon::parse(asset("lexicons/explicit_indicators.txt"));
  return lex;
}

}  // namespace membias
