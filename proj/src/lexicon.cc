#include "lowres/lexicon.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "lowres/error.h"
#include "lowres/text_util.h"

namespace lowres {

void Lexicon::add(const std::string& source, const std::string& target, double weight) {
  if (!(weight >= 0.0)) throw InvalidArgument("negative lexicon weight for " + source);
  auto& targets = entries_[source];
  for (auto& t : targets) {
    if (t.target == target) {
      t.weight = std::max(t.weight, weight);
      return;
    }
  }
  targets.push_back({target, weight});
}

const std::vector<Translation>* Lexicon::find(const std::string& source) const {
  auto it = entries_.find(source);
  return it == entries_.end() ? nullptr : &it->second;
}

void Lexicon::sort_by_weight() {
  for (auto& [src, targets] : entries_)
    std::stable_sort(targets.begin(), targets.end(),
                     [](const Translation& a, const Translation& b) {
                       if (a.weight != b.weight) return a.weight > b.weight;
                       return a.target < b.target;
                     });
}

Lexicon Lexicon::inverted() const {
  Lexicon inv;
  inv.source_lang = target_lang;
  inv.target_lang = source_lang;
  for (const auto& [src, targets] : entries_)
    for (const auto& t : targets) inv.add(t.target, src, t.weight);
  return inv;
}

Lexicon read_lexicon_tsv(std::istream& in) {
  Lexicon lex;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() < 2 || cols.size() > 3)
      throw ParseError("lexicon line " + std::to_string(lineno) +
                       ": expected src<TAB>tgt<TAB>weight?");
    double w = 1.0;
    if (cols.size() == 3 && !trim(cols[2]).empty()) {
      try {
        w = std::stod(cols[2]);
      } catch (const std::exception&) {
        throw ParseError("lexicon line " + std::to_string(lineno) + ": bad weight");
      }
    }
    lex.add(std::string(trim(cols[0])), std::string(trim(cols[1])), w);
  }
  return lex;
}

Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open lexicon " + path);
  return read_lexicon_tsv(in);
}

void write_lexicon_tsv(const Lexicon& lex, std::ostream& out) {
  for (const auto& [src, targets] : lex.entries())
    for (const auto& t : targets) out << src << '\t' << t.target << '\t' << t.weight << '\n';
}

}  // namespace lowres
