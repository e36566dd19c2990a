#ifndef LOWRES_RELEVANCE_H_
#define LOWRES_RELEVANCE_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lowres/types.h"

namespace lowres {

using TermId = std::uint32_t;

// Sentence-level document frequencies. Term ids are assigned in order of
// first occurrence, so a table is a pure function of its corpus.
class DfTable {
 public:
  static DfTable build(std::span<const std::vector<std::string>> sentences);

  std::optional<TermId> id(const std::string& term) const;
  // 0 for unknown terms.
  std::uint32_t df(const std::string& term) const;
  std::uint32_t df(TermId id) const { return df_[id]; }
  const std::string& term(TermId id) const { return terms_[id]; }
  std::size_t vocab_size() const { return terms_.size(); }
  std::size_t n_sentences() const { return n_sentences_; }

 private:
  std::unordered_map<std::string, TermId> vocab_;
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::size_t n_sentences_ = 0;
};

// Sorted by term id, no zero weights.
class SparseVector {
 public:
  using Entry = std::pair<TermId, double>;

  SparseVector() = default;
  // Entries may arrive unsorted and with duplicate ids; duplicates are summed
  // and zero weights dropped.
  static SparseVector from_entries(std::vector<Entry> entries);

  std::span<const Entry> entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  double get(TermId id) const;
  double dot(const SparseVector& other) const;
  double squared_norm() const;
  SparseVector scaled(double alpha) const;

 private:
  std::vector<Entry> entries_;
};

// weight(v) = count(v) / df(v); unknown terms are ignored.
SparseVector tfidf_vector(std::span<const std::string> tokens, const DfTable& table);

// Cosine similarity of non-negative vectors, clamped to [0, 1]; 0 when either
// side is empty.
double cosine(const SparseVector& a, const SparseVector& b);

struct QueryTerm {
  std::string term;
  double frequency = 1.0;
};

struct RankedSentence {
  std::size_t index = 0;
  double score = 0.0;
};

// Query weights are frequency / df. Output is sorted by score descending,
// ties by ascending index. Scoring fans out over `threads` workers.
std::vector<RankedSentence> rank_by_relevance(
    std::span<const std::vector<std::string>> sentences,
    std::span<const QueryTerm> query, const DfTable& table, unsigned threads = 1);

struct HeuristicWeights {
  double tfidf = 1.0;
  double keywords = 1.0;
  double ngram = 1.0;
  double capitalized = 0.0;
  std::size_t top_m = 5;
};

// Lowercased token tuples seen in the evaluation set, with the longest length.
struct NgramSet {
  std::set<std::vector<std::string>> ngrams;
  std::size_t max_len = 0;

  static NgramSet from_sentences(std::span<const std::vector<std::string>> sentences,
                                 std::size_t n_max);
};

// w_tfidf * (sum of the top_m largest TF-IDF weights of the sentence's terms)
//  + w_kw * (distinct lowercased tokens that are keywords)
//  + w_ngram * (longest sentence n-gram present in the n-gram set)
//  + w_cap * (number of capitalized tokens)
double score_sentence_heuristic(std::span<const std::string> tokens,
                                const DfTable& table,
                                const std::set<std::string>& keywords,
                                const NgramSet& ngrams,
                                const HeuristicWeights& weights);

// Fractions per genre, summing to 1 within 1e-9.
class GenreRatio {
 public:
  GenreRatio() = default;
  explicit GenreRatio(std::map<Genre, double> ratio);

  // Parses "NW=0.5,SN=0.3,WL=0.2".
  static GenreRatio parse(const std::string& spec);
  // Ratio of genres over the segments of a corpus-like list of genres.
  static GenreRatio from_counts(const std::map<Genre, std::size_t>& counts);

  double operator[](Genre g) const;
  const std::map<Genre, double>& fractions() const { return ratio_; }

 private:
  std::map<Genre, double> ratio_;
};

struct ScoredCandidate {
  std::size_t ref = 0;  // caller-defined reference
  Genre genre = Genre::kOther;
  double score = 0.0;
};

// Largest-remainder quotas: floor(budget * ratio_g) plus one extra unit to
// the genres with the largest fractional parts (ties by genre order).
std::map<Genre, std::size_t> genre_quotas(const GenreRatio& ratio, std::size_t budget);

// Fills each genre's quota with its best candidates (ties by input order),
// then tops up any shortfall from the remaining candidates by global score.
// Returned refs are ordered by score descending, ties by input order.
// Throws InsufficientCandidates when fewer than `budget` candidates exist.
std::vector<std::size_t> select_with_genre_ratio(std::span<const ScoredCandidate> scored,
                                                 const GenreRatio& ratio,
                                                 std::size_t budget);

// TSV term<TAB>frequency; a missing frequency counts as 1.
std::vector<QueryTerm> read_query_terms_tsv(std::istream& in);

}  // namespace lowres

#endif  // LOWRES_RELEVANCE_H_
