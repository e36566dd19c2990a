#include "lowres/relevance.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>

#include "lowres/concurrency.h"
#include "lowres/error.h"
#include "lowres/text_util.h"
#include "lowres/unicode.h"

namespace lowres {

DfTable DfTable::build(std::span<const std::vector<std::string>> sentences) {
  if (sentences.empty()) throw EmptyCorpus("no sentences to build DF table from");
  DfTable t;
  t.n_sentences_ = sentences.size();
  std::vector<std::size_t> last_seen;  // sentence index + 1 of last df increment
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (const auto& tok : sentences[s]) {
      auto [it, inserted] = t.vocab_.try_emplace(tok, static_cast<TermId>(t.terms_.size()));
      if (inserted) {
        t.terms_.push_back(tok);
        t.df_.push_back(0);
        last_seen.push_back(0);
      }
      const TermId id = it->second;
      if (last_seen[id] != s + 1) {
        last_seen[id] = s + 1;
        ++t.df_[id];
      }
    }
  }
  return t;
}

std::optional<TermId> DfTable::id(const std::string& term) const {
  auto it = vocab_.find(term);
  if (it == vocab_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t DfTable::df(const std::string& term) const {
  auto i = id(term);
  return i ? df_[*i] : 0;
}

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  SparseVector v;
  for (const auto& [id, w] : entries) {
    if (!std::isfinite(w)) throw InvalidArgument("non-finite sparse weight");
    if (!v.entries_.empty() && v.entries_.back().first == id)
      v.entries_.back().second += w;
    else
      v.entries_.emplace_back(id, w);
  }
  std::erase_if(v.entries_, [](const Entry& e) { return e.second == 0.0; });
  return v;
}

double SparseVector::get(TermId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, TermId t) { return e.first < t; });
  return it != entries_.end() && it->first == id ? it->second : 0.0;
}

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  auto a = entries_.begin(), b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      sum += a->second * b->second;
      ++a;
      ++b;
    }
  }
  return sum;
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.second * e.second;
  return sum;
}

SparseVector SparseVector::scaled(double alpha) const {
  std::vector<Entry> e(entries_);
  for (auto& x : e) x.second *= alpha;
  return from_entries(std::move(e));
}

SparseVector tfidf_vector(std::span<const std::string> tokens, const DfTable& table) {
  std::vector<SparseVector::Entry> counts;
  counts.reserve(tokens.size());
  for (const auto& tok : tokens)
    if (auto id = table.id(tok)) counts.emplace_back(*id, 1.0);
  SparseVector tf = SparseVector::from_entries(std::move(counts));
  std::vector<SparseVector::Entry> weighted(tf.entries().begin(), tf.entries().end());
  for (auto& [id, w] : weighted) w = w / static_cast<double>(table.df(id));
  return SparseVector::from_entries(std::move(weighted));
}

double cosine(const SparseVector& a, const SparseVector& b) {
  if (a.empty() || b.empty()) return 0.0;
  const double dot = a.dot(b);
  const double denom = std::sqrt(a.squared_norm()) * std::sqrt(b.squared_norm());
  if (denom == 0.0) return 0.0;
  return std::clamp(dot / denom, 0.0, 1.0);
}

std::vector<RankedSentence> rank_by_relevance(
    std::span<const std::vector<std::string>> sentences,
    std::span<const QueryTerm> query, const DfTable& table, unsigned threads) {
  std::vector<SparseVector::Entry> q;
  for (const auto& term : query)
    if (auto id = table.id(term.term))
      q.emplace_back(*id, term.frequency / static_cast<double>(table.df(*id)));
  const SparseVector qv = SparseVector::from_entries(std::move(q));

  std::vector<RankedSentence> ranked(sentences.size());
  parallel_for(sentences.size(), threads, [&](std::size_t i) {
    ranked[i] = {i, qv.empty() ? 0.0 : cosine(tfidf_vector(sentences[i], table), qv)};
  });
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedSentence& a, const RankedSentence& b) {
                     return a.score > b.score;
                   });
  return ranked;
}

NgramSet NgramSet::from_sentences(std::span<const std::vector<std::string>> sentences,
                                  std::size_t n_max) {
  NgramSet set;
  for (const auto& sent : sentences) {
    std::vector<std::string> lower;
    lower.reserve(sent.size());
    for (const auto& t : sent) lower.push_back(unicode::to_lower(t));
    for (std::size_t i = 0; i < lower.size(); ++i)
      for (std::size_t n = 1; n <= n_max && i + n <= lower.size(); ++n) {
        set.ngrams.emplace(lower.begin() + i, lower.begin() + i + n);
        set.max_len = std::max(set.max_len, n);
      }
  }
  return set;
}

double score_sentence_heuristic(std::span<const std::string> tokens,
                                const DfTable& table,
                                const std::set<std::string>& keywords,
                                const NgramSet& ngrams,
                                const HeuristicWeights& weights) {
  if (weights.tfidf < 0 || weights.keywords < 0 || weights.ngram < 0 ||
      weights.capitalized < 0)
    throw InvalidArgument("heuristic weights must be non-negative");
  double score = 0.0;

  if (weights.tfidf != 0.0) {
    SparseVector v = tfidf_vector(tokens, table);
    std::vector<double> w;
    w.reserve(v.size());
    for (const auto& e : v.entries()) w.push_back(e.second);
    const std::size_t m = std::min(weights.top_m, w.size());
    std::partial_sort(w.begin(), w.begin() + m, w.end(), std::greater<>());
    score += weights.tfidf * std::accumulate(w.begin(), w.begin() + m, 0.0);
  }

  std::vector<std::string> lower;
  if (weights.keywords != 0.0 || weights.ngram != 0.0) {
    lower.reserve(tokens.size());
    for (const auto& t : tokens) lower.push_back(unicode::to_lower(t));
  }

  if (weights.keywords != 0.0) {
    std::set<std::string> hits;
    for (const auto& t : lower)
      if (keywords.count(t)) hits.insert(t);
    score += weights.keywords * static_cast<double>(hits.size());
  }

  if (weights.ngram != 0.0) {
    std::size_t best = 0;
    for (std::size_t n = std::min(ngrams.max_len, lower.size()); n >= 1 && !best; --n) {
      std::vector<std::string> window;
      for (std::size_t i = 0; i + n <= lower.size(); ++i) {
        window.assign(lower.begin() + i, lower.begin() + i + n);
        if (ngrams.ngrams.count(window)) {
          best = n;
          break;
        }
      }
    }
    score += weights.ngram * static_cast<double>(best);
  }

  if (weights.capitalized != 0.0) {
    std::size_t caps = 0;
    for (const auto& t : tokens) caps += unicode::is_capitalized(t) ? 1 : 0;
    score += weights.capitalized * static_cast<double>(caps);
  }
  return score;
}

GenreRatio::GenreRatio(std::map<Genre, double> ratio) : ratio_(std::move(ratio)) {
  double sum = 0.0;
  for (const auto& [g, f] : ratio_) {
    if (!(f >= 0.0 && f <= 1.0))
      throw InvalidArgument("genre fraction out of [0,1] for " + std::string(to_string(g)));
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidArgument("genre fractions must sum to 1, got " + std::to_string(sum));
}

GenreRatio GenreRatio::parse(const std::string& spec) {
  std::map<Genre, double> ratio;
  for (const auto& part : split(spec, ',')) {
    auto kv = split(trim(part), '=');
    if (kv.size() != 2) throw InvalidArgument("bad genre ratio entry '" + part + "'");
    std::string key(trim(kv[0]));
    Genre g = parse_genre(key);
    if (g == Genre::kOther && key != "OTHER")
      throw InvalidArgument("unknown genre '" + key + "'");
    try {
      ratio[g] += std::stod(std::string(trim(kv[1])));
    } catch (const std::exception&) {
      throw InvalidArgument("bad genre fraction '" + kv[1] + "'");
    }
  }
  return GenreRatio(std::move(ratio));
}

GenreRatio GenreRatio::from_counts(const std::map<Genre, std::size_t>& counts) {
  std::size_t total = 0;
  for (const auto& [g, c] : counts) total += c;
  if (total == 0) throw InvalidArgument("cannot derive a genre ratio from zero counts");
  std::map<Genre, double> ratio;
  for (const auto& [g, c] : counts)
    ratio[g] = static_cast<double>(c) / static_cast<double>(total);
  double sum = 0.0;
  for (const auto& [g, f] : ratio) sum += f;
  // Push any rounding residue onto the largest share.
  auto largest = std::max_element(ratio.begin(), ratio.end(), [](const auto& a, const auto& b) {
    return a.second < b.second;
  });
  largest->second += 1.0 - sum;
  return GenreRatio(std::move(ratio));
}

double GenreRatio::operator[](Genre g) const {
  auto it = ratio_.find(g);
  return it == ratio_.end() ? 0.0 : it->second;
}

std::map<Genre, std::size_t> genre_quotas(const GenreRatio& ratio, std::size_t budget) {
  std::map<Genre, std::size_t> quota;
  // Remainders are compared at 1e-9 resolution so that products such as
  // 10 * 0.3 land on the integer and equal fractions tie exactly.
  std::vector<std::pair<std::int64_t, Genre>> remainders;
  std::size_t assigned = 0;
  for (Genre g : kAllGenres) {
    double exact = static_cast<double>(budget) * ratio[g];
    const double nearest = std::round(exact);
    if (std::abs(exact - nearest) < 1e-9 * std::max(1.0, exact)) exact = nearest;
    const double base = std::floor(exact);
    quota[g] = static_cast<std::size_t>(base);
    assigned += quota[g];
    if (ratio[g] > 0.0) remainders.emplace_back(std::llround((exact - base) * 1e9), g);
  }
  while (assigned > budget) {
    // Only reachable through rounding in ratios that sum to 1 + 1e-9.
    for (auto it = quota.rbegin(); it != quota.rend() && assigned > budget; ++it)
      if (it->second > 0) {
        --it->second;
        --assigned;
      }
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < budget && !remainders.empty(); ++k) {
    ++quota[remainders[k % remainders.size()].second];
    ++assigned;
  }
  return quota;
}

std::vector<std::size_t> select_with_genre_ratio(std::span<const ScoredCandidate> scored,
                                                 const GenreRatio& ratio,
                                                 std::size_t budget) {
  if (scored.size() < budget)
    throw InsufficientCandidates("budget " + std::to_string(budget) + " exceeds " +
                                 std::to_string(scored.size()) + " candidates");
  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scored[a].score > scored[b].score;
  });

  const auto quota = genre_quotas(ratio, budget);
  std::map<Genre, std::size_t> taken;
  std::vector<bool> selected(scored.size(), false);
  std::size_t count = 0;
  for (std::size_t i : order) {
    const Genre g = scored[i].genre;
    auto q = quota.find(g);
    if (q != quota.end() && taken[g] < q->second) {
      ++taken[g];
      selected[i] = true;
      ++count;
    }
  }
  for (std::size_t i : order) {
    if (count >= budget) break;
    if (!selected[i]) {
      selected[i] = true;
      ++count;
    }
  }
  std::vector<std::size_t> out;
  out.reserve(budget);
  for (std::size_t i : order)
    if (selected[i]) out.push_back(scored[i].ref);
  return out;
}

std::vector<QueryTerm> read_query_terms_tsv(std::istream& in) {
  std::vector<QueryTerm> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cols = split(line, '\t');
    QueryTerm q{std::string(trim(cols[0])), 1.0};
    if (cols.size() > 1 && !trim(cols[1]).empty()) {
      try {
        q.frequency = std::stod(cols[1]);
      } catch (const std::exception&) {
        throw ParseError("terms line " + std::to_string(lineno) + ": bad frequency");
      }
    }
    if (q.term.empty() || !(q.frequency >= 0.0))
      throw ParseError("terms line " + std::to_string(lineno) + ": bad entry");
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace lowres
