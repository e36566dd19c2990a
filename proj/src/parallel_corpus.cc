#include "lowres/parallel_corpus.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "lowres/corpus.h"
#include "lowres/error.h"
#include "lowres/rng.h"
#include "lowres/text_util.h"
#include "lowres/unicode.h"

namespace lowres {

// ---------------------------------------------------------------------------
// Realignment

double length_mismatch_cost(std::size_t src_len, std::size_t tgt_len) {
  const double ls = static_cast<double>(src_len), lt = static_cast<double>(tgt_len);
  const double d = ls - lt;
  return d * d / ((ls + lt) / 2.0 + 1.0);
}

namespace {

struct Move {
  std::size_t ds, dt;
};

// Order is the tie-break: earlier moves win on equal cost.
constexpr Move kMoves[] = {{1, 1}, {1, 0}, {0, 1}, {2, 1}, {1, 2}};

double move_penalty(const Move& m, const AlignmentCosts& c) {
  if (m.ds == 1 && m.dt == 1) return c.one_one;
  if (m.ds == 0 || m.dt == 0) return c.skip;
  return c.merge;
}

}  // namespace

Realignment realign_document(std::span<const std::string> src_segments,
                             std::span<const std::string> tgt_segments,
                             const AlignmentCosts& costs) {
  if (src_segments.empty() || tgt_segments.empty())
    throw InvalidArgument("realign_document needs segments on both sides");
  const std::size_t n = src_segments.size(), m = tgt_segments.size();
  std::vector<std::size_t> src_prefix(n + 1, 0), tgt_prefix(m + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    src_prefix[i + 1] = src_prefix[i] + unicode::length(src_segments[i]);
  for (std::size_t j = 0; j < m; ++j)
    tgt_prefix[j + 1] = tgt_prefix[j] + unicode::length(tgt_segments[j]);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t width = m + 1;
  std::vector<double> cost((n + 1) * width, kInf);
  std::vector<signed char> back((n + 1) * width, -1);
  cost[0] = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      if (i == 0 && j == 0) continue;
      double best = kInf;
      signed char best_move = -1;
      for (std::size_t k = 0; k < std::size(kMoves); ++k) {
        const Move& mv = kMoves[k];
        if (mv.ds > i || mv.dt > j) continue;
        const double prev = cost[(i - mv.ds) * width + (j - mv.dt)];
        if (prev == kInf) continue;
        const double c = prev + move_penalty(mv, costs) +
                         length_mismatch_cost(src_prefix[i] - src_prefix[i - mv.ds],
                                              tgt_prefix[j] - tgt_prefix[j - mv.dt]);
        if (c < best) {
          best = c;
          best_move = static_cast<signed char>(k);
        }
      }
      cost[i * width + j] = best;
      back[i * width + j] = best_move;
    }
  }

  Realignment result;
  result.cost = cost[n * width + m];
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const Move& mv = kMoves[back[i * width + j]];
    result.beads.push_back({{i - mv.ds, i}, {j - mv.dt, j}});
    i -= mv.ds;
    j -= mv.dt;
  }
  std::reverse(result.beads.begin(), result.beads.end());
  return result;
}

// ---------------------------------------------------------------------------
// Noise injection

std::vector<LabeledPair> make_noisy_training(std::span<const SentencePair> pairs,
                                             double swap_rate, std::uint64_t seed) {
  if (!(swap_rate >= 0.0 && swap_rate <= 0.5))
    throw InvalidArgument("swap_rate must lie in [0, 0.5]");
  const std::size_t n = pairs.size();
  if (n < 2) throw TooFewPairs("need at least 2 pairs, got " + std::to_string(n));

  std::vector<LabeledPair> out;
  out.reserve(n);
  for (const auto& p : pairs) out.push_back({p, 1});

  const auto k = static_cast<std::size_t>(std::floor(swap_rate * static_cast<double>(n) + 1e-9));
  if (k == 0) return out;

  // A placement of k disjoint dominoes over n cells is a choice of k items
  // out of n - k units; domino j then starts at chosen[j] + j.
  const std::size_t units = n - k;
  std::vector<std::size_t> pool(units);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng.uniform(units - j));
    std::swap(pool[j], pool[r]);
  }
  std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(chosen.begin(), chosen.end());
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t a = chosen[j] + j;
    std::swap(out[a].pair.tgt, out[a + 1].pair.tgt);
    out[a].label = 0;
    out[a + 1].label = 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Features

const std::vector<std::string>& pair_feature_names() {
  static const std::vector<std::string> names = {
      "abs_log_length_ratio", "src_coverage",   "tgt_coverage",
      "shared_tokens",        "len_diff_0",     "len_diff_1_2",
      "len_diff_3_5",         "len_diff_6_10",  "len_diff_over_10"};
  return names;
}

namespace {

double coverage(const std::vector<std::string>& from, const std::vector<std::string>& to,
                const Lexicon& lex) {
  if (from.empty()) return 0.0;
  std::unordered_set<std::string> targets(to.begin(), to.end());
  std::size_t covered = 0;
  for (const auto& tok : from) {
    const auto* tr = lex.find(tok);
    if (!tr) continue;
    for (const auto& t : *tr)
      if (targets.count(t.target)) {
        ++covered;
        break;
      }
  }
  return static_cast<double>(covered) / static_cast<double>(from.size());
}

}  // namespace

SparseVector pair_features(const SentencePair& pair, const Lexicon& lexicon,
                           const Lexicon& inverse) {
  const double ls = static_cast<double>(std::max<std::size_t>(pair.src.size(), 1));
  const double lt = static_cast<double>(std::max<std::size_t>(pair.tgt.size(), 1));
  std::vector<SparseVector::Entry> f;
  f.emplace_back(kLogLengthRatio, std::abs(std::log(ls / lt)));
  f.emplace_back(kSrcCoverage, coverage(pair.src, pair.tgt, lexicon));
  f.emplace_back(kTgtCoverage, coverage(pair.tgt, pair.src, inverse));

  std::set<std::string> s(pair.src.begin(), pair.src.end());
  std::set<std::string> t(pair.tgt.begin(), pair.tgt.end());
  std::size_t shared = 0;
  for (const auto& w : s) shared += t.count(w);
  const std::size_t uni = s.size() + t.size() - shared;
  f.emplace_back(kSharedTokens, uni ? static_cast<double>(shared) / static_cast<double>(uni) : 0.0);

  const std::size_t diff = pair.src.size() > pair.tgt.size() ? pair.src.size() - pair.tgt.size()
                                                             : pair.tgt.size() - pair.src.size();
  PairFeature bucket = diff == 0    ? kLenDiff0
                       : diff <= 2  ? kLenDiff1To2
                       : diff <= 5  ? kLenDiff3To5
                       : diff <= 10 ? kLenDiff6To10
                                    : kLenDiffOver10;
  f.emplace_back(bucket, 1.0);
  return SparseVector::from_entries(std::move(f));
}

SparseVector pair_features(const SentencePair& pair, const Lexicon& lexicon) {
  return pair_features(pair, lexicon, lexicon.inverted());
}

// ---------------------------------------------------------------------------
// Entity augmentation

namespace {

void check_ranges(std::vector<Range> ranges, std::size_t len, const char* side) {
  std::sort(ranges.begin(), ranges.end(),
            [](const Range& a, const Range& b) { return a.begin < b.begin; });
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    if (ranges[k].begin >= ranges[k].end || ranges[k].end > len)
      throw InvalidSpan(std::string(side) + " span out of bounds");
    if (k && ranges[k].begin < ranges[k - 1].end)
      throw InvalidSpan(std::string(side) + " spans overlap");
  }
}

void splice(std::vector<std::string>& tokens,
            std::vector<std::pair<Range, std::vector<std::string>>> edits) {
  std::sort(edits.begin(), edits.end(),
            [](const auto& a, const auto& b) { return a.first.begin > b.first.begin; });
  for (auto& [r, repl] : edits) {
    auto first = tokens.erase(tokens.begin() + static_cast<std::ptrdiff_t>(r.begin),
                              tokens.begin() + static_cast<std::ptrdiff_t>(r.end));
    tokens.insert(first, repl.begin(), repl.end());
  }
}

}  // namespace

std::vector<SentencePair> augment_with_entities(
    std::span<const SentencePair> pairs,
    std::span<const std::vector<SpanPair>> spans, const Lexicon& entity_lexicon,
    std::size_t n_copies, std::uint64_t seed) {
  if (spans.size() != pairs.size())
    throw InvalidSpan("one span list per sentence pair is required");
  std::vector<std::pair<std::string, std::string>> entities;
  for (const auto& [src, targets] : entity_lexicon.entries())
    for (const auto& t : targets) entities.emplace_back(src, t.target);
  if (entities.empty()) throw EmptyEntityLexicon("entity lexicon has no entries");

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<Range> s, t;
    for (const auto& sp : spans[i]) {
      s.push_back(sp.src);
      t.push_back(sp.tgt);
    }
    check_ranges(s, pairs[i].src.size(), "source");
    check_ranges(t, pairs[i].tgt.size(), "target");
  }

  std::vector<SentencePair> out(pairs.begin(), pairs.end());
  SplitMix64 rng(seed);
  for (std::size_t c = 0; c < n_copies; ++c) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      SentencePair copy = pairs[i];
      std::vector<std::pair<Range, std::vector<std::string>>> src_edits, tgt_edits;
      for (const auto& sp : spans[i]) {
        const auto& ent = entities[rng.uniform(entities.size())];
        src_edits.emplace_back(sp.src, split_whitespace(ent.first));
        tgt_edits.emplace_back(sp.tgt, split_whitespace(ent.second));
      }
      splice(copy.src, std::move(src_edits));
      splice(copy.tgt, std::move(tgt_edits));
      out.push_back(std::move(copy));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// DNT

DntMask dnt_tag(std::span<const std::string> tokens) {
  DntMask mask;
  mask.masked.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (classify_special(tok) == SpecialToken::kNone) {
      mask.masked.push_back(tok);
      continue;
    }
    std::string ph = "DNT_" + std::to_string(mask.order.size());
    mask.slots.emplace(ph, tok);
    mask.order.push_back(ph);
    mask.masked.push_back(std::move(ph));
  }
  return mask;
}

DntRestoreResult dnt_restore(std::span<const std::string> translated, const DntMask& mask) {
  std::map<std::string, std::size_t> seen;
  for (const auto& tok : translated)
    if (mask.slots.count(tok) && ++seen[tok] > 1)
      throw InvalidArgument("placeholder " + tok + " occurs more than once");
  DntRestoreResult r;
  r.tokens.reserve(translated.size());
  for (const auto& tok : translated) {
    auto it = mask.slots.find(tok);
    r.tokens.push_back(it == mask.slots.end() ? tok : it->second);
  }
  for (const auto& ph : mask.order) {
    if (!seen.count(ph)) {
      r.missing.push_back(ph);
      r.tokens.push_back(mask.slots.at(ph));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Word-by-word transfer

std::vector<std::string> translate_corpus_fallback(
    std::span<const std::string> tokens, const Lexicon& lexicon,
    const std::set<std::string>& vocab_target, const NeighborMap& neighbors,
    std::size_t max_edit) {
  std::unordered_map<std::string, std::string> cache;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    auto hit = cache.find(tok);
    if (hit != cache.end()) {
      out.push_back(hit->second);
      continue;
    }
    std::string result = tok;
    bool done = false;
    if (const auto* tr = lexicon.find(tok); tr && !tr->empty()) {
      result = tr->front().target;
      done = true;
    }
    if (!done) {
      const auto tok_cps = unicode::decode(tok);
      for (const auto& cand : vocab_target) {
        const auto cand_cps = unicode::decode(cand);
        const std::size_t gap = tok_cps.size() > cand_cps.size() ? tok_cps.size() - cand_cps.size()
                                                                 : cand_cps.size() - tok_cps.size();
        if (gap > max_edit) continue;
        if (levenshtein_bounded(tok, cand, max_edit) <= max_edit) {
          result = cand;
          done = true;
          break;
        }
      }
    }
    if (!done) {
      auto nb = neighbors.find(tok);
      if (nb != neighbors.end() && !nb->second.empty()) result = nb->second.front();
    }
    cache.emplace(tok, result);
    out.push_back(std::move(result));
  }
  return out;
}

Lexicon pivot_lexicon(const Lexicon& src_to_pivot, const Lexicon& pivot_to_tgt) {
  Lexicon out;
  out.source_lang = src_to_pivot.source_lang;
  out.target_lang = pivot_to_tgt.target_lang;
  for (const auto& [src, pivots] : src_to_pivot.entries()) {
    std::map<std::string, double> acc;
    for (const auto& p : pivots) {
      const auto* targets = pivot_to_tgt.find(p.target);
      if (!targets) continue;
      for (const auto& t : *targets) acc[t.target] += p.weight * t.weight;
    }
    for (const auto& [tgt, w] : acc) out.add(src, tgt, w);
  }
  out.sort_by_weight();
  return out;
}

// ---------------------------------------------------------------------------
// NI phrases

std::vector<PhraseCount> select_ni_phrases(
    std::span<const std::vector<std::string>> monolingual,
    std::span<const std::vector<std::string>> bilingual_src, std::size_t n_max,
    std::size_t top_n) {
  if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
  std::set<std::vector<std::string>> bilingual;
  for (const auto& sent : bilingual_src)
    for (std::size_t i = 0; i < sent.size(); ++i)
      for (std::size_t n = 1; n <= n_max && i + n <= sent.size(); ++n)
        bilingual.emplace(sent.begin() + i, sent.begin() + i + n);

  std::map<std::vector<std::string>, std::size_t> counts;
  for (const auto& sent : monolingual)
    for (std::size_t i = 0; i < sent.size(); ++i)
      for (std::size_t n = 1; n <= n_max && i + n <= sent.size(); ++n) {
        std::vector<std::string> g(sent.begin() + i, sent.begin() + i + n);
        if (!bilingual.count(g)) ++counts[std::move(g)];
      }

  std::set<std::vector<std::string>> subsumed;
  for (const auto& [g, c] : counts) {
    for (std::size_t len = 1; len < g.size(); ++len)
      for (std::size_t i = 0; i + len <= g.size(); ++i)
        subsumed.emplace(g.begin() + i, g.begin() + i + len);
  }

  std::vector<std::pair<std::string, PhraseCount>> kept;
  for (const auto& [g, c] : counts)
    if (!subsumed.count(g)) kept.push_back({join(g, " "), {g, c}});
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second.frequency != b.second.frequency)
      return a.second.frequency > b.second.frequency;
    return a.first < b.first;
  });
  std::vector<PhraseCount> out;
  for (std::size_t i = 0; i < kept.size() && i < top_n; ++i)
    out.push_back(std::move(kept[i].second));
  return out;
}

// ---------------------------------------------------------------------------
// I/O

std::vector<SentencePair> read_parallel_tsv(std::istream& in, const std::string& origin) {
  std::vector<SentencePair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError("parallel line " + std::to_string(lineno) + ": missing tab");
    SentencePair p;
    p.src = split_whitespace(line.substr(0, tab));
    p.tgt = split_whitespace(line.substr(tab + 1));
    p.origin_doc = origin;
    p.index = pairs.size();
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void write_parallel_tsv(std::span<const SentencePair> pairs, std::ostream& out) {
  for (const auto& p : pairs) out << join(p.src, " ") << '\t' << join(p.tgt, " ") << '\n';
}

}  // namespace lowres
