#include "lowres/transliterate.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>

#include "lowres/error.h"
#include "lowres/text_util.h"
#include "lowres/unicode.h"

namespace lowres {

namespace {

std::u32string to_u32(std::string_view s) {
  const auto cps = unicode::decode(s);
  return std::u32string(cps.begin(), cps.end());
}

std::string to_utf8(const std::u32string& s, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) unicode::append_utf8(s[i], out);
  return out;
}

}  // namespace

RuleTable::RuleTable(std::string id, std::vector<Rule> rules)
    : id_(std::move(id)), rules_(std::move(rules)) {
  lhs_.reserve(rules_.size());
  for (std::size_t r = 0; r < rules_.size(); ++r) {
    if (rules_[r].lhs.empty())
      throw InvalidArgument("rule " + std::to_string(r) + " of " + id_ + " has an empty lhs");
    lhs_.push_back(to_u32(rules_[r].lhs));
    by_first_[lhs_.back()[0]].push_back(r);
  }
  for (auto& [cp, list] : by_first_)
    std::stable_sort(list.begin(), list.end(), [this](std::size_t a, std::size_t b) {
      return lhs_[a].size() > lhs_[b].size();
    });
}

bool RuleTable::match(const std::u32string& text, std::size_t pos, std::size_t& rule,
                      std::size_t& len) const {
  auto it = by_first_.find(text[pos]);
  if (it == by_first_.end()) return false;
  for (std::size_t r : it->second) {
    const auto& l = lhs_[r];
    if (text.compare(pos, l.size(), l) == 0) {
      rule = r;
      len = l.size();
      return true;
    }
  }
  return false;
}

RuleTable invert(const RuleTable& table) {
  std::vector<Rule> rules;
  for (const auto& r : table.rules())
    if (!r.rhs.empty()) rules.push_back({r.rhs, r.lhs});
  return RuleTable(table.id() + "-inv", std::move(rules));
}

namespace {

struct Piece {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string out;
  bool consumed = false;
};

std::vector<Piece> scan(const std::u32string& text, std::size_t begin, std::size_t end,
                        const RuleTable& table) {
  std::vector<Piece> pieces;
  std::size_t pos = begin;
  while (pos < end) {
    std::size_t rule = 0, len = 0;
    // A rule may not reach past the run being converted.
    if (table.match(text, pos, rule, len) && pos + len <= end) {
      pieces.push_back({pos, pos + len, table.rules()[rule].rhs, true});
      pos += len;
    } else {
      pieces.push_back({pos, pos + 1, to_utf8(text, pos, pos + 1), false});
      ++pos;
    }
  }
  return pieces;
}

std::string backoff(const std::u32string& text, std::size_t begin, std::size_t end,
                    std::span<const RuleTable> chain) {
  if (chain.empty()) return to_utf8(text, begin, end);
  std::string out;
  const auto pieces = scan(text, begin, end, chain[0]);
  for (std::size_t p = 0; p < pieces.size();) {
    if (pieces[p].consumed) {
      out += pieces[p].out;
      ++p;
      continue;
    }
    std::size_t q = p;
    while (q < pieces.size() && !pieces[q].consumed) ++q;
    out += backoff(text, pieces[p].begin, pieces[q - 1].end, chain.subspan(1));
    p = q;
  }
  return out;
}

}  // namespace

G2pResult g2p_apply(std::string_view token, const RuleTable& table) {
  const auto text = to_u32(token);
  G2pResult r;
  r.consumed.assign(text.size(), false);
  for (const auto& p : scan(text, 0, text.size(), table)) {
    r.output += p.out;
    for (std::size_t i = p.begin; i < p.end; ++i) r.consumed[i] = p.consumed;
  }
  return r;
}

std::string g2p_backoff(std::string_view token, std::span<const RuleTable> chain) {
  if (chain.empty()) throw InvalidArgument("empty backoff chain");
  const auto text = to_u32(token);
  return backoff(text, 0, text.size(), chain);
}

std::string reromanize(std::string_view ipa, const RuleTable& roman_table) {
  return g2p_apply(ipa, roman_table).output;
}

RuleTable read_rule_table_csv(std::istream& in, std::string id) {
  std::vector<Rule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);
    if (line.empty() || line[0] == '#') continue;
    if (rules.empty() && (line == "lhs,rhs" || line == "Orth,Phon")) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0)
      throw ParseError(id + " line " + std::to_string(lineno) + ": expected lhs,rhs");
    rules.push_back({unicode::nfc(line.substr(0, comma)), unicode::nfc(line.substr(comma + 1))});
  }
  return RuleTable(std::move(id), std::move(rules));
}

RuleTable load_rule_table(const std::string& path, std::string id) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open rule table " + path);
  if (id.empty()) id = std::filesystem::path(path).stem().string();
  return read_rule_table_csv(in, std::move(id));
}

}  // namespace lowres
