#ifndef LOWRES_TRANSLITERATE_H_
#define LOWRES_TRANSLITERATE_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lowres {

struct Rule {
  std::string lhs;  // non-empty
  std::string rhs;
};

// Ordered rewrite rules for one language-script pair. At each position the
// longest matching left-hand side wins; equal lengths go to the earlier rule.
class RuleTable {
 public:
  RuleTable() = default;
  RuleTable(std::string id, std::vector<Rule> rules);

  const std::string& id() const { return id_; }
  std::span<const Rule> rules() const { return rules_; }
  bool empty() const { return rules_.empty(); }

  // Index of the winning rule at code point `pos`, and its length in code
  // points; returns false when nothing matches.
  bool match(const std::u32string& text, std::size_t pos, std::size_t& rule,
             std::size_t& len) const;

 private:
  std::string id_;
  std::vector<Rule> rules_;
  std::vector<std::u32string> lhs_;
  // first code point -> rule indices, longest first then file order
  std::unordered_map<char32_t, std::vector<std::size_t>> by_first_;
};

// Swaps both sides of every rule, dropping rules whose rhs is empty.
RuleTable invert(const RuleTable& table);

struct G2pResult {
  std::string output;
  std::vector<bool> consumed;  // one flag per input code point
};

G2pResult g2p_apply(std::string_view token, const RuleTable& table);

// Runs left unconsumed by table k are retried with table k+1; characters no
// table covers are copied through. Throws InvalidArgument on an empty chain.
std::string g2p_backoff(std::string_view token, std::span<const RuleTable> chain);

// Longest-match IPA to romanization; unmapped characters pass through.
std::string reromanize(std::string_view ipa, const RuleTable& roman_table);

// CSV of `lhs,rhs` lines in application order. A leading "lhs,rhs" or
// "Orth,Phon" header and '#' comments are skipped. Both sides are NFC.
RuleTable read_rule_table_csv(std::istream& in, std::string id);
RuleTable load_rule_table(const std::string& path, std::string id = {});

}  // namespace lowres

#endif  // LOWRES_TRANSLITERATE_H_
