#include "lowres/active_selection.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "lowres/concurrency.h"
#include "lowres/error.h"

namespace lowres {

void check_marginals(const SentenceMarginals& s) {
  for (std::size_t t = 0; t < s.tokens.size(); ++t) {
    double sum = 0.0;
    for (const auto& [tag, p] : s.tokens[t].probs) {
      if (!(p >= 0.0)) throw InvalidArgument("negative probability at token " + std::to_string(t));
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw InvalidArgument(s.doc_id + ":" + std::to_string(s.seg_id) + " token " +
                            std::to_string(t) + " sums to " + std::to_string(sum));
  }
}

double token_entropy(const TokenMarginal& t) {
  double h = 0.0;
  for (const auto& [tag, p] : t.probs)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double span_entropy(const SentenceMarginals& s, std::size_t i, std::size_t j) {
  if (!(i < j && j <= s.tokens.size()))
    throw InvalidRange("[" + std::to_string(i) + ", " + std::to_string(j) + ") in sentence of " +
                       std::to_string(s.tokens.size()) + " tokens");
  double h = 0.0;
  for (std::size_t t = i; t < j; ++t) h += token_entropy(s.tokens[t]);
  return h;
}

namespace {

std::vector<SpanCandidate> best_spans(const SentenceMarginals& s, const SpanSelectOptions& opts) {
  const std::size_t n = s.tokens.size();
  std::vector<double> h(n);
  for (std::size_t t = 0; t < n; ++t) h[t] = token_entropy(s.tokens[t]);

  std::vector<SpanCandidate> all;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1; j <= n && j - i <= opts.max_span_len; ++j) {
      sum += h[j - 1];
      all.push_back({s.doc_id, s.seg_id, i, j, sum});
    }
  }
  // Enumeration order is already (begin, length), so a stable sort keeps
  // leftmost-then-shortest among equal entropies.
  std::stable_sort(all.begin(), all.end(), [](const SpanCandidate& a, const SpanCandidate& b) {
    return a.entropy > b.entropy;
  });
  std::vector<SpanCandidate> picked;
  for (const auto& c : all) {
    if (picked.size() >= opts.max_per_sentence) break;
    bool overlaps = false;
    for (const auto& p : picked)
      if (c.begin < p.end && p.begin < c.end) overlaps = true;
    if (!overlaps) picked.push_back(c);
  }
  return picked;
}

}  // namespace

std::vector<SpanCandidate> select_uncertain_spans(std::span<const SentenceMarginals> corpus,
                                                  std::size_t budget,
                                                  const SpanSelectOptions& opts,
                                                  unsigned threads) {
  if (budget == 0 || opts.max_span_len == 0 || opts.max_per_sentence == 0) return {};
  std::vector<std::vector<SpanCandidate>> per(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t i) { per[i] = best_spans(corpus[i], opts); });
  std::vector<SpanCandidate> pool;
  for (auto& v : per)
    for (auto& c : v) pool.push_back(std::move(c));
  std::sort(pool.begin(), pool.end(), [](const SpanCandidate& a, const SpanCandidate& b) {
    if (a.entropy != b.entropy) return a.entropy > b.entropy;
    return std::tie(a.doc_id, a.seg_id, a.begin, a.end) <
           std::tie(b.doc_id, b.seg_id, b.begin, b.end);
  });
  if (pool.size() > budget) pool.resize(budget);
  return pool;
}

std::vector<SentenceRef> fallback_rank_sentences(const Corpus& corpus, const DfTable& table,
                                                 const GenreRatio& ratio, std::size_t budget) {
  const HeuristicWeights weights{1.0, 0.0, 0.0, 0.0, 5};
  const std::set<std::string> no_keywords;
  const NgramSet no_ngrams;
  std::vector<SentenceRef> refs;
  std::vector<ScoredCandidate> scored;
  for (std::size_t d = 0; d < corpus.size(); ++d)
    for (std::size_t s = 0; s < corpus[d].segments.size(); ++s) {
      const auto toks = corpus[d].segments[s].surfaces();
      scored.push_back({refs.size(), corpus[d].genre,
                        score_sentence_heuristic(toks, table, no_keywords, no_ngrams, weights)});
      refs.push_back({d, s});
    }
  std::vector<SentenceRef> out;
  for (std::size_t r : select_with_genre_ratio(scored, ratio, budget)) out.push_back(refs[r]);
  return out;
}

std::vector<SentenceMarginals> read_marginals_jsonl(std::istream& in) {
  std::vector<SentenceMarginals> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      SentenceMarginals s;
      s.doc_id = j.at("doc_id").get<std::string>();
      s.seg_id = j.at("seg_id").get<int>();
      for (const auto& tok : j.at("tokens")) {
        TokenMarginal t;
        t.surface = tok.value("surface", "");
        for (const auto& [tag, p] : tok.at("probs").items()) t.probs[tag] = p.get<double>();
        s.tokens.push_back(std::move(t));
      }
      check_marginals(s);
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("marginals line " + std::to_string(lineno) + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError("marginals line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_spans_tsv(std::span<const SpanCandidate> spans, std::ostream& out) {
  char buf[32];
  for (const auto& s : spans) {
    std::snprintf(buf, sizeof buf, "%.6f", s.entropy);
    out << s.doc_id << '\t' << s.seg_id << '\t' << s.begin << '\t' << s.end << '\t' << buf << '\n';
  }
}

}  // namespace lowres
