#ifndef MEMBIAS_TEXT_HPP_
#define MEMBIAS_TEXT_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace membias {

// A maximal run of alphanumeric bytes. Bytes >= 0x80 count as alphanumeric
// so UTF-8 encoded words are never split.
struct Token {
  std::size_t begin;
  std::size_t end;
  std::string lower;
};

std::vector<Token> tokenize(std::string_view text);
std::vector<std::string> lowercase_tokens(std::string_view text);
std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text);

// Whole-word, case-insensitive term list. A line with several words is a
// phrase that matches consecutive tokens.
class Lexicon {
 public:
  Lexicon() = default;
  // One term per line; blank lines and '#' comments are ignored.
  static Lexicon parse(std::string_view text);

  void add(std::string_view term);
  const std::vector<std::vector<std::string>>& terms() const { return terms_; }

  // Matched terms in order of appearance (duplicates kept once).
  std::vector<std::string> find(std::string_view text) const;
  bool contains_token(std::string_view lowered_token) const;

 private:
  std::vector<std::vector<std::string>> terms_;
};

// Versioned lexicon assets compiled into the library.
const Lexicon& gender_terms_lexicon();
const Lexicon& explicit_indicator_lexicon();

}  // namespace membias

#endif  // MEMBIAS_TEXT_HPP_
