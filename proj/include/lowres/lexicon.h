#ifndef LOWRES_LEXICON_H_
#define LOWRES_LEXICON_H_

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lowres {

struct Translation {
  std::string target;
  double weight = 1.0;

  friend bool operator==(const Translation&, const Translation&) = default;
};

// source word -> ordered, de-duplicated target list. Order is meaningful: the
// first entry is the "top" translation.
class Lexicon {
 public:
  std::string source_lang;
  std::string target_lang;

  // Appends (target, weight) unless the target is already listed for source,
  // in which case the larger weight is kept. Negative weights are rejected.
  void add(const std::string& source, const std::string& target, double weight = 1.0);

  const std::vector<Translation>* find(const std::string& source) const;
  const std::map<std::string, std::vector<Translation>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  // Sorts each target list by weight descending, then target ascending.
  void sort_by_weight();
  Lexicon inverted() const;

 private:
  std::map<std::string, std::vector<Translation>> entries_;
};

// TSV: src<TAB>tgt<TAB>weight? ; weight defaults to 1. Lines keep file order.
Lexicon read_lexicon_tsv(std::istream& in);
Lexicon load_lexicon(const std::string& path);
void write_lexicon_tsv(const Lexicon& lex, std::ostream& out);

}  // namespace lowres

#endif  // LOWRES_LEXICON_H_
