#include "weil/words.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace weil::words {

bool Word::is_reduced() const {
  for (std::size_t i = 0; i + 1 < letters.size(); ++i)
    if (letters[i].generator == letters[i + 1].generator &&
        letters[i].exponent == -letters[i + 1].exponent)
      return false;
  return true;
}

Word Word::inverse() const {
  Word out;
  out.letters.reserve(letters.size());
  for (auto it = letters.rbegin(); it != letters.rend(); ++it)
    out.letters.push_back({it->generator, -it->exponent});
  return out;
}

Word reduce(const Word& w) {
  Word out;
  out.letters.reserve(w.letters.size());
  for (const Letter& letter : w.letters) {
    if (!out.letters.empty() && out.letters.back().generator == letter.generator &&
        out.letters.back().exponent == -letter.exponent)
      out.letters.pop_back();
    else
      out.letters.push_back(letter);
  }
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word joined = a;
  joined.letters.insert(joined.letters.end(), b.letters.begin(), b.letters.end());
  return reduce(joined);
}

namespace {

int parse_exponent(const std::string& token, std::size_t caret) {
  const char* first = token.data() + caret + 1;
  const char* last = token.data() + token.size();
  int value = 0;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || value == 0)
    fail(errc::malformed_exponent, "token '" + token + "' needs a nonzero integer exponent");
  return value;
}

}  // namespace

Word parse_word(const std::string& text, const std::vector<std::string>& generators) {
  Word out;
  std::istringstream stream(text);
  std::string token;
  while (stream >> token) {
    std::string name = token;
    int exponent = 1;
    if (const std::size_t caret = token.find('^'); caret != std::string::npos) {
      name = token.substr(0, caret);
      exponent = parse_exponent(token, caret);
    }
    const auto it = std::find(generators.begin(), generators.end(), name);
    if (it == generators.end())
      fail(errc::unknown_generator, "'" + name + "' is not a generator");
    const int index = static_cast<int>(it - generators.begin());
    const int sign = exponent > 0 ? 1 : -1;
    for (int k = 0; k < std::abs(exponent); ++k) out.letters.push_back({index, sign});
  }
  return reduce(out);
}

std::string render(const Word& w, const std::vector<std::string>& generators) {
  std::ostringstream out;
  std::size_t i = 0;
  while (i < w.letters.size()) {
    std::size_t run = i + 1;
    while (run < w.letters.size() && w.letters[run].generator == w.letters[i].generator &&
           w.letters[run].exponent == w.letters[i].exponent)
      ++run;
    const int power = static_cast<int>(run - i) * w.letters[i].exponent;
    if (i > 0) out << ' ';
    out << generators.at(w.letters[i].generator);
    if (power != 1) out << '^' << power;
    i = run;
  }
  return out.str();
}

std::vector<RelatorPrefix> relator_prefixes(const Word& t) {
  if (!t.is_reduced()) fail(errc::invalid_argument, "relator must be reduced");
  std::vector<RelatorPrefix> out;
  out.reserve(t.size());
  Word prefix;  // letters before position j
  for (const Letter& letter : t.letters) {
    RelatorPrefix entry;
    entry.sign = letter.exponent;
    entry.generator = letter.generator;
    entry.prefix = prefix;
    // e' = -1: the letter itself, s_j^{-1}, joins its prefix.
    if (letter.exponent < 0) entry.prefix.letters.push_back(letter);
    out.push_back(std::move(entry));
    prefix.letters.push_back(letter);
  }
  return out;
}

Presentation::Presentation(std::vector<std::string> generators, std::vector<Word> relators)
    : generators_(std::move(generators)), relators_(std::move(relators)) {
  std::unordered_set<std::string> seen;
  for (const std::string& name : generators_) {
    if (name.empty()) fail(errc::invalid_argument, "generator names must be nonempty");
    if (!seen.insert(name).second)
      fail(errc::invalid_argument, "duplicate generator '" + name + "'");
  }
  for (std::size_t i = 0; i < relators_.size(); ++i) {
    const Word& t = relators_[i];
    if (t.empty())
      fail(errc::invalid_argument, "relator " + std::to_string(i) + " is empty");
    if (!t.is_reduced())
      fail(errc::invalid_argument, "relator " + std::to_string(i) + " is not reduced");
    for (const Letter& letter : t.letters)
      if (letter.generator < 0 || letter.generator >= static_cast<int>(generators_.size()))
        fail(errc::invalid_argument,
             "relator " + std::to_string(i) + " uses an out-of-range generator index");
  }
}

int Presentation::generator_index(const std::string& name) const {
  const auto it = std::find(generators_.begin(), generators_.end(), name);
  return it == generators_.end() ? -1 : static_cast<int>(it - generators_.begin());
}

namespace {

std::string strip(const std::string& line) {
  std::string out = line;
  if (const auto hash = out.find('#'); hash != std::string::npos) out.resize(hash);
  const auto begin = out.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = out.find_last_not_of(" \t\r");
  return out.substr(begin, end - begin + 1);
}

}  // namespace

Presentation parse_presentation(std::istream& in) {
  std::vector<std::string> generators;
  std::vector<Word> relators;
  bool have_generators = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip(line);
    if (body.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (body.rfind("generators:", 0) == 0) {
      if (have_generators)
        fail(errc::parse_error, where + ": repeated generators line");
      std::istringstream names(body.substr(std::string("generators:").size()));
      std::string name;
      while (names >> name) generators.push_back(name);
      have_generators = true;
    } else if (body.rfind("relator:", 0) == 0) {
      if (!have_generators)
        fail(errc::parse_error, where + ": relator before generators line");
      try {
        Word w = parse_word(body.substr(std::string("relator:").size()), generators);
        if (w.empty())
          fail(errc::parse_error, where + ": relator reduces to the empty word");
        relators.push_back(std::move(w));
      } catch (const error& e) {
        if (e.code() == errc::parse_error) throw;
        fail(errc::parse_error, where + ": " + e.what());
      }
    } else {
      fail(errc::parse_error, where + ": expected 'generators:' or 'relator:'");
    }
  }
  if (!have_generators) fail(errc::parse_error, "missing generators line");
  return Presentation(std::move(generators), std::move(relators));
}

Presentation load_presentation(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_error, "cannot open '" + path + "'");
  return parse_presentation(in);
}

}  // namespace weil::words
