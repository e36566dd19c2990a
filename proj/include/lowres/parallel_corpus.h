#ifndef LOWRES_PARALLEL_CORPUS_H_
#define LOWRES_PARALLEL_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lowres/lexicon.h"
#include "lowres/relevance.h"

namespace lowres {

struct SentencePair {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  std::string origin_doc;
  std::size_t index = 0;

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

// Half-open index range.
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Range&, const Range&) = default;
};

// ---------------------------------------------------------------------------
// Sentence realignment

struct AlignmentCosts {
  double one_one = 0.0;
  double skip = 4.0;     // 1-0 and 0-1
  double merge = 1.5;    // 1-2 and 2-1
};

struct AlignedBead {
  Range src;
  Range tgt;
  friend bool operator==(const AlignedBead&, const AlignedBead&) = default;
};

struct Realignment {
  std::vector<AlignedBead> beads;
  double cost = 0.0;
};

// Cost of aligning segment groups of the given code-point lengths:
// (ls - lt)^2 / ((ls + lt) / 2 + 1).
double length_mismatch_cost(std::size_t src_len, std::size_t tgt_len);

// Monotone DP over {1-1, 1-0, 0-1, 1-2, 2-1} moves. Both sides must be
// non-empty. Every segment lands in exactly one bead.
Realignment realign_document(std::span<const std::string> src_segments,
                             std::span<const std::string> tgt_segments,
                             const AlignmentCosts& costs = {});

// ---------------------------------------------------------------------------
// Noise injection

struct LabeledPair {
  SentencePair pair;
  int label = 1;  // 1 parallel, 0 misaligned
};

// Exchanges the target sides of floor(swap_rate * N) disjoint neighbouring
// pairs, drawn uniformly by a SplitMix64 seeded with `seed`.
std::vector<LabeledPair> make_noisy_training(std::span<const SentencePair> pairs,
                                             double swap_rate, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Features

enum PairFeature : TermId {
  kLogLengthRatio = 0,
  kSrcCoverage,
  kTgtCoverage,
  kSharedTokens,
  kLenDiff0,
  kLenDiff1To2,
  kLenDiff3To5,
  kLenDiff6To10,
  kLenDiffOver10,
  kNumPairFeatures
};

const std::vector<std::string>& pair_feature_names();

// `inverse` must be lexicon.inverted(); pass it to avoid rebuilding per pair.
SparseVector pair_features(const SentencePair& pair, const Lexicon& lexicon,
                           const Lexicon& inverse);
SparseVector pair_features(const SentencePair& pair, const Lexicon& lexicon);

// ---------------------------------------------------------------------------
// Entity augmentation

struct SpanPair {
  Range src;
  Range tgt;
};

// Keeps the originals, then appends n_copies rounds in which every marked
// span pair is overwritten with one entity pair sampled from the lexicon.
std::vector<SentencePair> augment_with_entities(
    std::span<const SentencePair> pairs,
    std::span<const std::vector<SpanPair>> spans, const Lexicon& entity_lexicon,
    std::size_t n_copies, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Do-not-translate masking

struct DntMask {
  std::vector<std::string> masked;
  std::map<std::string, std::string> slots;  // DNT_i -> original
  std::vector<std::string> order;            // placeholders by index
};

DntMask dnt_tag(std::span<const std::string> tokens);

struct DntRestoreResult {
  std::vector<std::string> tokens;
  // Placeholders that were absent from the translation; their originals are
  // appended at the end of `tokens` in slot order.
  std::vector<std::string> missing;
};

// Throws InvalidArgument when a placeholder occurs more than once.
DntRestoreResult dnt_restore(std::span<const std::string> translated, const DntMask& mask);

// ---------------------------------------------------------------------------
// Word-by-word transfer

using NeighborMap = std::map<std::string, std::vector<std::string>>;

// Per token: top lexicon translation; else the smallest target-vocabulary
// word within max_edit edits; else the first listed neighbour; else itself.
std::vector<std::string> translate_corpus_fallback(
    std::span<const std::string> tokens, const Lexicon& lexicon,
    const std::set<std::string>& vocab_target, const NeighborMap& neighbors,
    std::size_t max_edit = 1);

// Composes src->pivot and pivot->tgt; weight(s,t) = sum over pivots of w1*w2.
Lexicon pivot_lexicon(const Lexicon& src_to_pivot, const Lexicon& pivot_to_tgt);

// ---------------------------------------------------------------------------
// Native-informant phrase selection

struct PhraseCount {
  std::vector<std::string> phrase;
  std::size_t frequency = 0;
};

std::vector<PhraseCount> select_ni_phrases(
    std::span<const std::vector<std::string>> monolingual,
    std::span<const std::vector<std::string>> bilingual_src, std::size_t n_max,
    std::size_t top_n);

// ---------------------------------------------------------------------------
// I/O

// TSV src<TAB>tgt, whitespace-tokenized on both sides.
std::vector<SentencePair> read_parallel_tsv(std::istream& in, const std::string& origin);
void write_parallel_tsv(std::span<const SentencePair> pairs, std::ostream& out);

}  // namespace lowres

#endif  // LOWRES_PARALLEL_CORPUS_H_
