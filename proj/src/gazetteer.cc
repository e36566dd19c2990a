#include "lowres/gazetteer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "lowres/corpus.h"
#include "lowres/error.h"
#include "lowres/text_util.h"
#include "lowres/unicode.h"

namespace lowres {

// ---------------------------------------------------------------------------
// Tags

std::string Tag::str() const {
  switch (kind) {
    case TagKind::kO: return "O";
    case TagKind::kUnk: return "UNK";
    case TagKind::kB: return "B-" + std::string(to_string(type));
    case TagKind::kI: return "I-" + std::string(to_string(type));
  }
  return "O";
}

std::optional<Tag> Tag::parse(std::string_view s) {
  if (s == "O") return Tag::O();
  if (s == "UNK") return Tag::Unk();
  if (s.size() > 2 && s[1] == '-' && (s[0] == 'B' || s[0] == 'I')) {
    auto t = parse_entity_type(s.substr(2));
    if (!t) return std::nullopt;
    return s[0] == 'B' ? Tag::B(*t) : Tag::I(*t);
  }
  return std::nullopt;
}

std::optional<std::size_t> find_bio_violation(std::span<const Tag> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i].kind != TagKind::kI) continue;
    if (i == 0) return i;
    const Tag& prev = tags[i - 1];
    if ((prev.kind != TagKind::kB && prev.kind != TagKind::kI) || prev.type != tags[i].type)
      return i;
  }
  return std::nullopt;
}

std::vector<TaggedSpan> spans_of(std::span<const Tag> tags) {
  std::vector<TaggedSpan> out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i].kind != TagKind::kB) continue;
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j].kind == TagKind::kI && tags[j].type == tags[i].type) ++j;
    out.push_back({i, j, tags[i].type});
  }
  return out;
}

namespace {

void tag_span(TagSequence& tags, std::size_t begin, std::size_t end, EntityType t) {
  tags[begin] = Tag::B(t);
  for (std::size_t k = begin + 1; k < end; ++k) tags[k] = Tag::I(t);
}

// Majority vote with the fixed type priority as tie-break.
EntityType majority(const std::map<EntityType, std::size_t>& votes) {
  EntityType best = votes.begin()->first;
  std::size_t best_n = 0;
  for (const auto& [t, n] : votes) {
    if (n > best_n || (n == best_n && tie_rank(t) < tie_rank(best))) {
      best = t;
      best_n = n;
    }
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Normalization

std::string normalize_token(std::string_view token) {
  std::string stripped;
  stripped.reserve(token.size());
  std::size_t pos = 0;
  while (pos < token.size()) {
    char32_t cp = unicode::next_code_point(token, pos);
    if (!unicode::is_punct(cp)) unicode::append_utf8(cp, stripped);
  }
  return unicode::has_latin(stripped) ? unicode::to_lower(stripped) : stripped;
}

TokenKey normalize_key(std::span<const std::string> tokens) {
  TokenKey key;
  for (const auto& t : tokens) {
    std::string n = normalize_token(t);
    if (!n.empty()) key.push_back(std::move(n));
  }
  return key;
}

std::optional<TokenKey> normalize_span(std::span<const std::string> tokens) {
  TokenKey key;
  key.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::string n = normalize_token(t);
    if (n.empty()) return std::nullopt;
    key.push_back(std::move(n));
  }
  return key;
}

// ---------------------------------------------------------------------------
// Gazetteer

void Gazetteer::set_negatives(const std::set<std::string>& words) {
  negatives_.clear();
  for (const auto& w : words) {
    std::string n = normalize_token(w);
    if (!n.empty()) negatives_.insert(std::move(n));
  }
  prune_negatives();
}

void Gazetteer::prune_negatives() {
  std::erase_if(entries_, [&](const auto& kv) {
    return kv.first.size() == 1 && negatives_.count(kv.first[0]);
  });
  std::erase_if(originals_, [&](const auto& kv) {
    return kv.first.size() == 1 && negatives_.count(normalize_token(kv.first[0]));
  });
}

void Gazetteer::add_entry(const TokenKey& key, GazEntry entry) {
  if (key.empty()) return;
  if (key.size() == 1 && negatives_.count(key[0])) return;
  if (entries_.emplace(key, std::move(entry)).second) max_len_ = std::max(max_len_, key.size());
}

const GazEntry* Gazetteer::lookup(std::span<const std::string> raw,
                                  std::span<const std::string> normalized) const {
  if (raw.size() == 1 && negatives_.count(normalized.empty() ? normalize_token(raw[0])
                                                             : normalized[0]))
    return nullptr;
  if (!originals_.empty()) {
    TokenKey key(raw.begin(), raw.end());
    if (auto it = originals_.find(key); it != originals_.end()) return &it->second;
  }
  if (normalized.size() != raw.size()) return nullptr;
  TokenKey key(normalized.begin(), normalized.end());
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const GazEntry* Gazetteer::lookup(std::span<const std::string> raw) const {
  auto norm = normalize_span(raw);
  if (!norm) {
    // Only an exact original match can still apply.
    if (raw.size() == 1 && negatives_.count(normalize_token(raw[0]))) return nullptr;
    auto it = originals_.find(TokenKey(raw.begin(), raw.end()));
    return it == originals_.end() ? nullptr : &it->second;
  }
  return lookup(raw, *norm);
}

Gazetteer normalize_gazetteer(std::span<const RawGazEntry> raw) {
  struct Votes {
    std::map<EntityType, std::size_t> counts;
    std::map<EntityType, std::string> kb_ids;
  };
  std::map<TokenKey, Votes> norm_votes, orig_votes;
  auto vote = [](Votes& v, const RawGazEntry& e) {
    ++v.counts[e.type];
    if (e.kb_id && !v.kb_ids.count(e.type)) v.kb_ids[e.type] = *e.kb_id;
  };
  for (const auto& e : raw) {
    TokenKey original;
    for (const auto& t : tokenize(unicode::nfc(e.surface))) original.push_back(t.surface);
    if (original.empty()) continue;
    vote(orig_votes[original], e);
    TokenKey norm = normalize_key(original);
    if (!norm.empty()) vote(norm_votes[norm], e);
  }
  auto resolve = [](const Votes& v) {
    GazEntry g;
    g.type = majority(v.counts);
    if (auto it = v.kb_ids.find(g.type); it != v.kb_ids.end()) g.kb_id = it->second;
    return g;
  };
  Gazetteer gaz;
  for (const auto& [k, v] : norm_votes) {
    gaz.entries_.emplace(k, resolve(v));
    gaz.max_len_ = std::max(gaz.max_len_, k.size());
  }
  for (const auto& [k, v] : orig_votes) {
    gaz.originals_.emplace(k, resolve(v));
    gaz.max_len_ = std::max(gaz.max_len_, k.size());
  }
  return gaz;
}

std::vector<RawGazEntry> read_gazetteer_tsv(std::istream& in) {
  std::vector<RawGazEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() < 2)
      throw ParseError("gazetteer line " + std::to_string(lineno) + ": expected surface<TAB>TYPE");
    auto type = parse_entity_type(trim(cols[1]));
    if (!type)
      throw ParseError("gazetteer line " + std::to_string(lineno) + ": unknown type " + cols[1]);
    RawGazEntry e{cols[0], *type, std::nullopt};
    if (cols.size() > 2 && !trim(cols[2]).empty()) e.kb_id = std::string(trim(cols[2]));
    out.push_back(std::move(e));
  }
  return out;
}

std::set<std::string> read_word_list(std::istream& in) {
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto w = trim(line);
    if (!w.empty()) out.emplace(w);
  }
  return out;
}

Gazetteer load_gazetteer(const std::string& path, const std::string& negatives_path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open gazetteer " + path);
  Gazetteer gaz = normalize_gazetteer(read_gazetteer_tsv(in));
  if (!negatives_path.empty()) {
    std::ifstream neg(negatives_path);
    if (!neg) throw ParseError("cannot open negatives " + negatives_path);
    gaz.set_negatives(read_word_list(neg));
  }
  return gaz;
}

// ---------------------------------------------------------------------------
// Capitalization

CapStats CapStats::from_sentences(std::span<const std::vector<std::string>> sentences) {
  CapStats stats;
  for (const auto& sent : sentences) {
    for (const auto& tok : sent) {
      if (tok.empty()) continue;
      std::size_t pos = 0;
      if (!unicode::is_word_char(unicode::next_code_point(tok, pos))) continue;
      auto& c = stats.counts_[unicode::to_lower(tok)];
      ++c.total;
      if (unicode::is_capitalized(tok)) ++c.capitalized;
    }
  }
  return stats;
}

double CapStats::ratio(const CapCount& c) {
  return (static_cast<double>(c.capitalized) + 0.5) / (static_cast<double>(c.total) + 1.0);
}

double CapStats::ratio(const std::string& word) const { return ratio(count(word)); }

CapCount CapStats::count(const std::string& word) const {
  auto it = counts_.find(unicode::to_lower(word));
  return it == counts_.end() ? CapCount{} : it->second;
}

std::size_t cap_bucket(double ratio, std::size_t n_buckets) {
  if (n_buckets < 2) throw InvalidArgument("n_buckets must be >= 2");
  const double b = std::floor(ratio * static_cast<double>(n_buckets));
  if (b <= 0) return 0;
  return std::min(static_cast<std::size_t>(b), n_buckets - 1);
}

std::vector<std::string> negative_candidates(const CapStats& stats, std::size_t top_k) {
  std::vector<std::pair<std::string, CapCount>> words(stats.counts().begin(),
                                                      stats.counts().end());
  std::sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    const double ra = CapStats::ratio(a.second), rb = CapStats::ratio(b.second);
    if (ra != rb) return ra > rb;
    if (a.second.total != b.second.total) return a.second.total > b.second.total;
    return a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < words.size() && i < top_k; ++i) out.push_back(words[i].first);
  return out;
}

// ---------------------------------------------------------------------------
// Propagation

TagSequence propagate_gazetteer(std::span<const std::string> tokens, const Gazetteer& gaz,
                                std::size_t window) {
  if (window < 1) throw InvalidArgument("window must be >= 1");
  const std::size_t n = tokens.size();
  std::vector<std::string> norm(n);
  for (std::size_t i = 0; i < n; ++i) norm[i] = normalize_token(tokens[i]);

  TagSequence tags(n, Tag::O());
  std::size_t i = 0;
  while (i < n) {
    bool matched = false;
    for (std::size_t len = std::min(window, n - i); len >= 1; --len) {
      auto raw = tokens.subspan(i, len);
      std::span<const std::string> nspan(norm.data() + i, len);
      bool clean = std::none_of(nspan.begin(), nspan.end(),
                                [](const std::string& s) { return s.empty(); });
      const GazEntry* e = clean ? gaz.lookup(raw, nspan) : gaz.lookup(raw);
      if (e) {
        tag_span(tags, i, i + len, e->type);
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  return tags;
}

TagSequence mark_unknown_capitalized(std::span<const Tag> tags,
                                     std::span<const std::string> tokens,
                                     const std::set<std::string>& negatives) {
  if (tags.size() != tokens.size()) throw InvalidArgument("tags and tokens differ in length");
  TagSequence out(tags.begin(), tags.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].kind != TagKind::kO || !unicode::is_capitalized(tokens[i])) continue;
    if (negatives.count(normalize_token(tokens[i])) || negatives.count(tokens[i])) continue;
    out[i] = Tag::Unk();
  }
  return out;
}

std::map<std::string, EntityType> propagate_edit_distance(const std::set<std::string>& vocabulary,
                                                          const Gazetteer& gaz,
                                                          std::size_t min_edit_dist) {
  if (min_edit_dist < 1) throw InvalidArgument("min_edit_dist must be >= 1");
  std::vector<std::pair<std::u32string, EntityType>> keys;
  for (const auto& [k, e] : gaz.entries()) {
    if (k.size() != 1) continue;
    auto cps = unicode::decode(k[0]);
    keys.emplace_back(std::u32string(cps.begin(), cps.end()), e.type);
  }
  std::map<std::string, EntityType> added;
  for (const auto& raw_word : vocabulary) {
    const std::string word = normalize_token(raw_word);
    if (word.empty() || gaz.negatives().count(word)) continue;
    if (gaz.entries().count(TokenKey{word}) || gaz.originals().count(TokenKey{raw_word})) continue;
    auto cps = unicode::decode(word);
    const std::u32string w(cps.begin(), cps.end());
    std::map<EntityType, std::size_t> votes;
    for (const auto& [key, type] : keys) {
      const std::size_t gap = w.size() > key.size() ? w.size() - key.size() : key.size() - w.size();
      if (gap >= min_edit_dist) continue;
      if (levenshtein(w, key) < min_edit_dist) ++votes[type];
    }
    if (!votes.empty()) added[word] = majority(votes);
  }
  return added;
}

TaggedCorpus propagate_documents(const TaggedCorpus& corpus) {
  using VoteMap = std::map<TokenKey, std::map<EntityType, std::size_t>>;
  VoteMap global;
  std::vector<VoteMap> local(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    for (const auto& seg : corpus[d].segments) {
      if (seg.tags.size() != seg.tokens.size())
        throw InvalidArgument("tags and tokens differ in length in " + corpus[d].doc_id);
      if (auto bad = find_bio_violation(seg.tags))
        throw InvalidArgument("invalid BIO input in " + corpus[d].doc_id + " at token " +
                              std::to_string(*bad));
      for (const auto& sp : spans_of(seg.tags)) {
        auto key = normalize_span(std::span<const std::string>(seg.tokens).subspan(
            sp.begin, sp.end - sp.begin));
        if (!key) continue;
        ++global[*key][sp.type];
        ++local[d][*key][sp.type];
      }
    }
  }

  TaggedCorpus out = corpus;
  if (global.empty()) return out;

  std::map<std::size_t, std::map<TokenKey, EntityType>, std::greater<>> by_length;
  for (const auto& [key, votes] : global) by_length[key.size()][key] = majority(votes);

  for (std::size_t d = 0; d < out.size(); ++d) {
    for (auto& seg : out[d].segments) {
      std::vector<std::string> norm(seg.tokens.size());
      for (std::size_t i = 0; i < norm.size(); ++i) norm[i] = normalize_token(seg.tokens[i]);
      for (const auto& [len, surfaces] : by_length) {
        if (len > norm.size()) continue;
        TokenKey window;
        for (std::size_t i = 0; i + len <= norm.size();) {
          bool open = true;
          for (std::size_t k = i; k < i + len && open; ++k)
            open = seg.tags[k].untagged() && !norm[k].empty();
          if (!open) {
            ++i;
            continue;
          }
          window.assign(norm.begin() + i, norm.begin() + i + len);
          auto hit = surfaces.find(window);
          if (hit == surfaces.end()) {
            ++i;
            continue;
          }
          EntityType type = hit->second;
          if (auto lv = local[d].find(window); lv != local[d].end()) type = majority(lv->second);
          tag_span(seg.tags, i, i + len, type);
          i += len;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// KB exact matching

KbNameIndex KbNameIndex::build(std::span<const std::pair<std::string, EntityType>> names) {
  std::map<std::string, std::map<EntityType, std::size_t>> votes, compact_votes;
  for (const auto& [name, type] : names) {
    std::string lowered = unicode::to_lower(trim(name));
    if (lowered.empty()) continue;
    ++votes[join(split_whitespace(lowered), " ")][type];
    std::string compact;
    for (char c : lowered)
      if (c != ' ' && c != '\t') compact += c;
    ++compact_votes[compact][type];
  }
  KbNameIndex idx;
  for (const auto& [k, v] : votes) idx.names_[k] = majority(v);
  for (const auto& [k, v] : compact_votes) idx.compact_[k] = majority(v);
  return idx;
}

std::optional<EntityType> KbNameIndex::find(const std::string& lowered) const {
  auto it = names_.find(lowered);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

std::optional<EntityType> KbNameIndex::find_without_spaces(const std::string& lowered) const {
  auto it = compact_.find(lowered);
  if (it == compact_.end()) return std::nullopt;
  return it->second;
}

TagSequence kb_exact_match(std::span<const std::string> tokens, const KbNameIndex& index,
                           const std::set<std::string>& stopwords, std::size_t n_max) {
  const std::size_t n = tokens.size();
  std::vector<std::string> lower(n);
  for (std::size_t i = 0; i < n; ++i) lower[i] = unicode::to_lower(tokens[i]);
  TagSequence tags(n, Tag::O());
  std::vector<bool> used(n, false);
  for (std::size_t len = std::min(n_max, n); len >= 1; --len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      bool ok = true;
      for (std::size_t k = i; k < i + len && ok; ++k)
        ok = !used[k] && !stopwords.count(lower[k]);
      if (!ok) continue;
      auto type = index.find(join(std::span<const std::string>(lower).subspan(i, len), " "));
      if (!type) continue;
      tag_span(tags, i, i + len, *type);
      for (std::size_t k = i; k < i + len; ++k) used[k] = true;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i] || lower[i].size() < 2 || lower[i][0] != '#') continue;
    if (auto type = index.find_without_spaces(lower[i].substr(1))) {
      tags[i] = Tag::B(*type);
      used[i] = true;
    }
  }
  return tags;
}

// ---------------------------------------------------------------------------
// CoNLL

void write_conll(const TaggedCorpus& corpus, std::ostream& out, bool unk_column) {
  for (const auto& doc : corpus) {
    for (const auto& seg : doc.segments) {
      for (std::size_t i = 0; i < seg.tokens.size(); ++i) {
        const Tag& t = seg.tags[i];
        if (unk_column) {
          out << seg.tokens[i] << '\t' << (t.kind == TagKind::kUnk ? "O" : t.str()) << '\t'
              << (t.kind == TagKind::kUnk ? "UNK" : "-") << '\n';
        } else {
          out << seg.tokens[i] << '\t' << (t.kind == TagKind::kUnk ? "O" : t.str()) << '\n';
        }
      }
      out << '\n';
    }
  }
}

}  // namespace lowres
