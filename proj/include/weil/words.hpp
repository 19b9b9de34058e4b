#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "weil/errors.hpp"

namespace weil::words {

struct Letter {
  int generator = 0;  // index into the presentation's generator list
  int exponent = 1;   // +1 or -1
  friend bool operator==(const Letter&, const Letter&) = default;
};

// Word in a free group, stored as a letter sequence. Operations in this
// module produce reduced words (no adjacent canceling pair).
struct Word {
  std::vector<Letter> letters;

  bool empty() const { return letters.empty(); }
  std::size_t size() const { return letters.size(); }
  bool is_reduced() const;
  Word inverse() const;
  friend bool operator==(const Word&, const Word&) = default;
};

// Free reduction: repeatedly drop adjacent (g, e)(g, -e) pairs. Idempotent.
Word reduce(const Word& w);

Word concat(const Word& a, const Word& b);  // reduced concatenation

// Parses whitespace-separated tokens `name` or `name^k` (k a nonzero
// integer) against the generator list, expands powers and reduces.
// The empty word is a valid result.
Word parse_word(const std::string& text, const std::vector<std::string>& generators);

// Canonical run-length text form; parse_word(render(w)) == w for reduced w.
std::string render(const Word& w, const std::vector<std::string>& generators);

struct RelatorPrefix {
  Word prefix;    // s_1^{e_1} ... s_{j-1}^{e_{j-1}} s_j^{e'_j}
  int sign;       // e_j
  int generator;  // index of s_j
};

// Prefix expansion driving the relator coboundary: entry j carries the
// group element acting on the cochain value at s_j. e'_j is 0 for a
// positive letter and -1 for a negative one, so a negative letter's prefix
// includes its own inverse.
std::vector<RelatorPrefix> relator_prefixes(const Word& t);

class Presentation {
 public:
  // Validates: nonempty unique generator names, relators reduced, nonempty
  // and within index range.
  Presentation(std::vector<std::string> generators, std::vector<Word> relators);

  const std::vector<std::string>& generators() const { return generators_; }
  const std::vector<Word>& relators() const { return relators_; }
  std::size_t num_generators() const { return generators_.size(); }
  std::size_t num_relators() const { return relators_.size(); }
  int generator_index(const std::string& name) const;  // -1 when absent

 private:
  std::vector<std::string> generators_;
  std::vector<Word> relators_;
};

// Text format, one directive per line, `#` comments and blank lines allowed:
//   generators: a b
//   relator: a b a^-1 b^-1
// The generators line must precede every relator line.
Presentation parse_presentation(std::istream& in);
Presentation load_presentation(const std::string& path);

}  // namespace weil::words
