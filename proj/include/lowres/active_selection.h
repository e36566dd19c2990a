#ifndef LOWRES_ACTIVE_SELECTION_H_
#define LOWRES_ACTIVE_SELECTION_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lowres/corpus.h"
#include "lowres/relevance.h"

namespace lowres {

struct TokenMarginal {
  std::string surface;
  std::map<std::string, double> probs;  // tag -> probability
};

struct SentenceMarginals {
  std::string doc_id;
  int seg_id = 0;
  std::vector<TokenMarginal> tokens;
};

// Throws InvalidArgument unless every distribution is non-negative and sums
// to 1 within 1e-6.
void check_marginals(const SentenceMarginals& s);

// Shannon entropy (nats) of one token; zero-probability terms contribute 0.
double token_entropy(const TokenMarginal& t);

// Sum of token entropies over [i, j). Throws InvalidRange unless
// 0 <= i < j <= size.
double span_entropy(const SentenceMarginals& s, std::size_t i, std::size_t j);

struct SpanCandidate {
  std::string doc_id;
  int seg_id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  double entropy = 0.0;
};

struct SpanSelectOptions {
  std::size_t max_span_len = 5;
  std::size_t max_per_sentence = 1;
};

// Best spans per sentence (entropy desc, then leftmost, then shortest; further
// picks in the same sentence must not overlap earlier ones), then the global
// top `budget` by entropy desc, ties by (doc_id, seg_id, begin).
std::vector<SpanCandidate> select_uncertain_spans(std::span<const SentenceMarginals> corpus,
                                                  std::size_t budget,
                                                  const SpanSelectOptions& opts = {},
                                                  unsigned threads = 1);

struct SentenceRef {
  std::size_t doc = 0;  // index into the corpus
  std::size_t seg = 0;  // index into the document's segments
};

// Top-5 TF-IDF sentence scores, selected under the genre ratio.
std::vector<SentenceRef> fallback_rank_sentences(const Corpus& corpus, const DfTable& table,
                                                 const GenreRatio& ratio, std::size_t budget);

// {"doc_id", "seg_id", "tokens": [{"surface", "probs": {tag: p}}]} per line.
std::vector<SentenceMarginals> read_marginals_jsonl(std::istream& in);
void write_spans_tsv(std::span<const SpanCandidate> spans, std::ostream& out);

}  // namespace lowres

#endif  // LOWRES_ACTIVE_SELECTION_H_
