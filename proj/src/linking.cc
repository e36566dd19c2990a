#include "lowres/linking.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_set>

#include "lowres/concurrency.h"
#include "lowres/error.h"
#include "lowres/text_util.h"
#include "lowres/unicode.h"

namespace lowres {

std::vector<KbEntry> read_kb_tsv(std::istream& in) {
  std::vector<KbEntry> kb;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != 7)
      throw ParseError("kb line " + std::to_string(lineno) + ": expected 7 columns");
    KbEntry e;
    e.kb_id = cols[0];
    auto type = parse_entity_type(cols[1]);
    if (!type) throw ParseError("kb line " + std::to_string(lineno) + ": bad type " + cols[1]);
    e.type = *type;
    e.name = cols[2];
    e.ascii_name = cols[3];
    if (!cols[4].empty())
      for (auto& alt : split(cols[4], '|'))
        if (!trim(alt).empty()) e.alternate_names.emplace_back(trim(alt));
    e.country_code = cols[5];
    try {
      e.population = cols[6].empty() ? 0 : std::stoll(cols[6]);
    } catch (const std::exception&) {
      throw ParseError("kb line " + std::to_string(lineno) + ": bad population");
    }
    if (e.population < 0) throw ParseError("kb line " + std::to_string(lineno) + ": negative population");
    if (e.kb_id.empty() || !ids.insert(e.kb_id).second)
      throw ParseError("kb line " + std::to_string(lineno) + ": missing or duplicate kb_id");
    kb.push_back(std::move(e));
  }
  return kb;
}

std::vector<KbEntry> load_kb(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open kb " + path);
  return read_kb_tsv(in);
}

std::vector<KbEntry> prune_kb(std::span<const KbEntry> kb,
                              const std::set<std::string>& incident_countries,
                              const std::set<std::string>& neighbor_countries,
                              std::int64_t population_floor) {
  std::vector<KbEntry> out;
  for (const auto& e : kb) {
    const bool place = e.type == EntityType::kGPE || e.type == EntityType::kLOC;
    if (!place || incident_countries.count(e.country_code) ||
        neighbor_countries.count(e.country_code) || e.population > population_floor)
      out.push_back(e);
  }
  return out;
}

std::vector<std::pair<std::string, EntityType>> kb_names(std::span<const KbEntry> kb) {
  std::vector<std::pair<std::string, EntityType>> out;
  for (const auto& e : kb) {
    out.emplace_back(e.name, e.type);
    if (!e.ascii_name.empty()) out.emplace_back(e.ascii_name, e.type);
    for (const auto& a : e.alternate_names) out.emplace_back(a, e.type);
  }
  return out;
}

std::string Mention::surface() const { return join(tokens, " "); }

std::vector<Mention> mentions_from_tags(const std::string& doc_id, int seg_id,
                                        std::span<const std::string> tokens,
                                        std::span<const Tag> tags) {
  std::vector<Mention> out;
  for (const auto& sp : spans_of(tags)) {
    Mention m;
    m.doc_id = doc_id;
    m.seg_id = seg_id;
    m.begin = sp.begin;
    m.end = sp.end;
    m.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(sp.begin),
                    tokens.begin() + static_cast<std::ptrdiff_t>(sp.end));
    m.type = sp.type;
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

std::vector<std::string> token_set(std::string_view s) {
  auto toks = split_whitespace(unicode::to_lower(s));
  std::sort(toks.begin(), toks.end());
  toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
  return toks;
}

double jaccard_sets(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::size_t inter = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

}  // namespace

double jaccard_similarity(std::string_view a, std::string_view b) {
  return jaccard_sets(token_set(a), token_set(b));
}

std::vector<std::string> candidate_translations(std::span<const std::string> tokens,
                                                std::span<const Lexicon> lexicons,
                                                std::size_t k_per_token,
                                                std::size_t max_candidates) {
  std::vector<std::vector<std::string>> options;
  for (const auto& tok : tokens) {
    std::vector<std::string> opts;
    const std::string lower = unicode::to_lower(tok);
    for (const auto& lex : lexicons) {
      const auto* tr = lex.find(tok);
      if (!tr && lower != tok) tr = lex.find(lower);
      if (!tr) continue;
      for (std::size_t k = 0; k < tr->size() && k < k_per_token; ++k) {
        const std::string& t = (*tr)[k].target;
        if (!t.empty() && std::find(opts.begin(), opts.end(), t) == opts.end()) opts.push_back(t);
      }
    }
    if (opts.empty()) opts.push_back(tok);
    options.push_back(std::move(opts));
  }

  const std::string original = join(tokens, " ");
  std::vector<std::string> out;
  if (!options.empty() && max_candidates > 0) {
    // Enumerate index tuples in order of increasing rank sum; within one sum,
    // lexicographic order of the tuple.
    std::size_t max_sum = 0;
    for (const auto& o : options) max_sum += o.size() - 1;
    std::vector<std::size_t> idx(options.size());
    for (std::size_t sum = 0; sum <= max_sum && out.size() < max_candidates; ++sum) {
      // Depth-first walk over tuples with the given sum, lexicographic.
      std::vector<std::vector<std::size_t>> found;
      std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t pos, std::size_t left) {
        if (out.size() + found.size() >= max_candidates) return;
        if (pos + 1 == options.size()) {
          if (left < options[pos].size()) {
            idx[pos] = left;
            found.push_back(idx);
          }
          return;
        }
        for (std::size_t v = 0; v < options[pos].size() && v <= left; ++v) {
          idx[pos] = v;
          walk(pos + 1, left - v);
        }
      };
      walk(0, sum);
      for (const auto& tuple : found) {
        std::vector<std::string> words;
        for (std::size_t p = 0; p < tuple.size(); ++p) words.push_back(options[p][tuple[p]]);
        std::string cand = join(words, " ");
        if (std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(std::move(cand));
      }
    }
  }
  if (std::find(out.begin(), out.end(), original) == out.end()) out.push_back(original);
  return out;
}

std::string_view to_string(LinkMethod m) {
  switch (m) {
    case LinkMethod::kTranslation: return "translation";
    case LinkMethod::kExact: return "exact";
    case LinkMethod::kNil: return "nil";
  }
  return "nil";
}

KbIndex::KbIndex(std::vector<KbEntry> kb) : kb_(std::move(kb)) {
  names_.resize(kb_.size());
  for (std::size_t i = 0; i < kb_.size(); ++i) {
    const auto& e = kb_[i];
    std::vector<std::string> all = {e.name};
    if (!e.ascii_name.empty()) all.push_back(e.ascii_name);
    all.insert(all.end(), e.alternate_names.begin(), e.alternate_names.end());
    std::set<std::string> seen_tokens;
    for (const auto& n : all) {
      auto set = token_set(n);
      for (const auto& t : set)
        if (seen_tokens.insert(t).second) postings_[t].push_back(i);
      names_[i].push_back(std::move(set));
    }
  }
}

const std::vector<std::size_t>* KbIndex::with_token(const std::string& token) const {
  auto it = postings_.find(token);
  return it == postings_.end() ? nullptr : &it->second;
}

bool types_compatible(EntityType mention, EntityType entry, bool gpe_loc_compatible) {
  if (mention == entry) return true;
  auto place = [](EntityType t) { return t == EntityType::kGPE || t == EntityType::kLOC; };
  return gpe_loc_compatible && place(mention) && place(entry);
}

LinkResult link_mention(const Mention& mention, std::size_t mention_index, const KbIndex& kb,
                        std::span<const Lexicon> lexicons, const LinkOptions& options) {
  const auto candidates =
      candidate_translations(mention.tokens, lexicons, options.k_per_token, options.max_candidates);
  const std::string original = mention.surface();
  std::vector<std::vector<std::string>> cand_sets;
  for (const auto& c : candidates) cand_sets.push_back(token_set(c));

  const auto& entries = kb.entries();
  auto better = [&](std::size_t a, double sa, std::size_t b, double sb) {
    if (sa != sb) return sa > sb;
    if (entries[a].population != entries[b].population)
      return entries[a].population > entries[b].population;
    return entries[a].kb_id < entries[b].kb_id;
  };

  // Only entries sharing a token with some candidate can score above zero.
  std::set<std::size_t> pool;
  for (const auto& cs : cand_sets)
    for (const auto& t : cs)
      if (const auto* post = kb.with_token(t)) pool.insert(post->begin(), post->end());

  std::optional<std::size_t> best, runner_up;
  double best_score = 0.0, runner_score = 0.0;
  std::size_t best_cand = 0;
  auto consider = [&](std::size_t e, double s, std::size_t cand) {
    if (!best || better(e, s, *best, best_score)) {
      if (best) {
        runner_up = best;
        runner_score = best_score;
      }
      best = e;
      best_score = s;
      best_cand = cand;
    } else if (!runner_up || better(e, s, *runner_up, runner_score)) {
      runner_up = e;
      runner_score = s;
    }
  };
  for (std::size_t e : pool) {
    if (!types_compatible(mention.type, entries[e].type, options.gpe_loc_compatible)) continue;
    double s = 0.0;
    std::size_t which = 0;
    for (std::size_t c = 0; c < cand_sets.size(); ++c)
      for (const auto& names : kb.name_sets(e)) {
        double j = jaccard_sets(cand_sets[c], names);
        if (j > s) {
          s = j;
          which = c;
        }
      }
    consider(e, s, which);
  }
  if (!best || best_score == 0.0 || !runner_up) {
    // Zero-score entries only matter for tie-breaking among themselves.
    for (std::size_t e = 0; e < entries.size(); ++e) {
      if (pool.count(e)) continue;
      if (!types_compatible(mention.type, entries[e].type, options.gpe_loc_compatible)) continue;
      consider(e, 0.0, 0);
    }
  }

  LinkResult r;
  r.mention = mention_index;
  if (!best) return r;
  r.score = best_score;
  bool nil = best_score < options.threshold;
  if (options.nil_margin && runner_up && best_score - runner_score < *options.nil_margin) nil = true;
  if (nil) return r;
  r.kb_id = entries[*best].kb_id;
  r.method = candidates[best_cand] == original ? LinkMethod::kExact : LinkMethod::kTranslation;
  return r;
}

std::vector<LinkResult> link_mentions(std::span<const Mention> mentions, const KbIndex& kb,
                                      std::span<const Lexicon> lexicons,
                                      const LinkOptions& options, unsigned threads) {
  std::vector<LinkResult> out(mentions.size());
  parallel_for(mentions.size(), threads, [&](std::size_t i) {
    out[i] = link_mention(mentions[i], i, kb, lexicons, options);
  });
  return out;
}

std::string nil_surface_key(const Mention& m) {
  std::vector<std::string> parts;
  for (const auto& t : m.tokens) {
    std::string stripped;
    std::size_t pos = 0;
    while (pos < t.size()) {
      char32_t cp = unicode::next_code_point(t, pos);
      if (!unicode::is_punct(cp)) unicode::append_utf8(cp, stripped);
    }
    if (!stripped.empty()) parts.push_back(unicode::to_lower(stripped));
  }
  return join(parts, " ");
}

void cluster_nil(std::vector<LinkResult>& results, std::span<const Mention> mentions) {
  std::map<std::string, std::string> ids;
  for (auto& r : results) {
    if (!r.is_nil()) continue;
    const std::string key = nil_surface_key(mentions[r.mention]);
    auto it = ids.find(key);
    if (it == ids.end()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "NIL%04zu", ids.size() + 1);
      it = ids.emplace(key, buf).first;
    }
    r.kb_id = it->second;
  }
}

void write_edl_tsv(std::span<const LinkResult> results, std::span<const Mention> mentions,
                   std::ostream& out) {
  char buf[64];
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const auto& m = mentions[r.mention];
    std::snprintf(buf, sizeof buf, "M%06zu", i);
    out << m.doc_id << '\t' << buf << '\t' << m.surface() << '\t' << m.doc_id << ':' << m.seg_id
        << ':' << m.begin << '-' << m.end << '\t' << r.kb_id << '\t' << to_string(m.type) << '\t';
    std::snprintf(buf, sizeof buf, "%.4f", r.score);
    out << buf << '\n';
  }
}

}  // namespace lowres
